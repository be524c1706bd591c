// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "etlforge/value.hpp"

namespace etlforge {

struct Column {
    std::string name;
    ValueKind kind = ValueKind::Integer;

    bool operator==(const Column&) const = default;
};

/// Ordered, case-sensitive column list. Names are unique.
class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<Column> columns); // throws ConfigError on duplicates

    const std::vector<Column>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }
    bool empty() const { return columns_.empty(); }
    const Column& at(std::size_t i) const { return columns_.at(i); }

    std::optional<std::size_t> index_of(std::string_view name) const;
    /// Index of a column that must exist; throws ConfigError naming it.
    std::size_t require(std::string_view name) const;
    bool has(std::string_view name) const { return index_of(name).has_value(); }

    bool operator==(const Schema& other) const { return columns_ == other.columns_; }

private:
    std::vector<Column> columns_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// One row: values positionally matching a Schema.
using Row = std::vector<Value>;

/// Length matches and every cell is null or of its column's kind.
bool row_conforms(const Row& row, const Schema& schema);

} // namespace etlforge
