// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/schema.hpp"

#include "etlforge/errors.hpp"

namespace etlforge {

Schema::Schema(std::vector<Column> columns) : columns_(std::move(columns)) {
    index_.reserve(columns_.size());
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        auto [it, inserted] = index_.emplace(columns_[i].name, i);
        if (!inserted) {
            throw ConfigError("duplicate column name: '" + columns_[i].name + "'");
        }
    }
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Schema::require(std::string_view name) const {
    auto i = index_of(name);
    if (!i) throw ConfigError("unknown column: '" + std::string(name) + "'");
    return *i;
}

bool row_conforms(const Row& row, const Schema& schema) {
    if (row.size() != schema.size()) return false;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (!value_matches_kind(row[i], schema.at(i).kind)) return false;
    }
    return true;
}

} // namespace etlforge
