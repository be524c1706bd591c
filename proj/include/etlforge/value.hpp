// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace etlforge {

/// Column/value kinds supported by the engine. A cell may additionally be
/// null regardless of its column kind.
enum class ValueKind { Integer, Decimal, Text, Boolean };

/// One cell. monostate is the engine-wide null.
using Value = std::variant<std::monostate, std::int64_t, double, std::string, bool>;

inline bool is_null(const Value& v) {
    return std::holds_alternative<std::monostate>(v);
}

/// Kind of a non-null value; nullopt for null.
std::optional<ValueKind> value_kind(const Value& v);

/// True when a cell is legal for a column of `kind` (matching kind or null).
bool value_matches_kind(const Value& v, ValueKind kind);

/// Three-way comparison defining the engine-wide total order:
/// null sorts first; values of different kinds order by kind; same-kind
/// values use their natural order. Returns <0, 0, >0.
int compare_values(const Value& a, const Value& b);

std::string_view kind_name(ValueKind kind);
ValueKind kind_from_name(std::string_view name); // throws ConfigError

/// Text form used by sinks and messages. Integers/decimals round-trip
/// (shortest form); null renders empty.
std::string value_to_string(const Value& v);

/// Hash/equality over Value for keyed lookups.
struct ValueHash {
    std::size_t operator()(const Value& v) const;
};
struct ValueEq {
    bool operator()(const Value& a, const Value& b) const {
        return compare_values(a, b) == 0;
    }
};

} // namespace etlforge
