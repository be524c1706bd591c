// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/value.hpp"

#include <charconv>
#include <cstring>
#include <functional>

#include "etlforge/errors.hpp"

namespace etlforge {

std::optional<ValueKind> value_kind(const Value& v) {
    switch (v.index()) {
    case 1: return ValueKind::Integer;
    case 2: return ValueKind::Decimal;
    case 3: return ValueKind::Text;
    case 4: return ValueKind::Boolean;
    default: return std::nullopt;
    }
}

bool value_matches_kind(const Value& v, ValueKind kind) {
    auto k = value_kind(v);
    return !k || *k == kind;
}

int compare_values(const Value& a, const Value& b) {
    // Null first, then kind order (variant index), then natural order.
    if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
    switch (a.index()) {
    case 0: return 0;
    case 1: {
        auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    case 2: {
        auto x = std::get<double>(a), y = std::get<double>(b);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    case 3: {
        int c = std::get<std::string>(a).compare(std::get<std::string>(b));
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    default: {
        int x = std::get<bool>(a), y = std::get<bool>(b);
        return x - y;
    }
    }
}

std::string_view kind_name(ValueKind kind) {
    switch (kind) {
    case ValueKind::Integer: return "integer";
    case ValueKind::Decimal: return "decimal";
    case ValueKind::Text: return "text";
    case ValueKind::Boolean: return "boolean";
    }
    return "?";
}

ValueKind kind_from_name(std::string_view name) {
    if (name == "integer") return ValueKind::Integer;
    if (name == "decimal") return ValueKind::Decimal;
    if (name == "text") return ValueKind::Text;
    if (name == "boolean") return ValueKind::Boolean;
    throw ConfigError("unknown value kind: '" + std::string(name) + "'");
}

std::string value_to_string(const Value& v) {
    switch (v.index()) {
    case 0: return "";
    case 1: {
        char buf[24];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, std::get<std::int64_t>(v));
        return std::string(buf, p);
    }
    case 2: {
        char buf[40];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(v));
        return std::string(buf, p);
    }
    case 3: return std::get<std::string>(v);
    default: return std::get<bool>(v) ? "true" : "false";
    }
}

std::size_t ValueHash::operator()(const Value& v) const {
    std::size_t h = v.index() * 0x9e3779b97f4a7c15ULL;
    switch (v.index()) {
    case 1: h ^= std::hash<std::int64_t>{}(std::get<std::int64_t>(v)); break;
    case 2: h ^= std::hash<double>{}(std::get<double>(v)); break;
    case 3: h ^= std::hash<std::string>{}(std::get<std::string>(v)); break;
    case 4: h ^= std::hash<bool>{}(std::get<bool>(v)); break;
    default: break;
    }
    return h;
}

} // namespace etlforge
