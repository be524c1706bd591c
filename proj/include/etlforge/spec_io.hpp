// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "etlforge/graph.hpp"

namespace etlforge {

/// A dataflow definition file: name, components, edges, lookup tables, and
/// optional config defaults (m, m_prime, batch_rows, shared_cache, intra).
struct DataflowSpec {
    std::string name;
    DataflowGraph graph;
    std::map<std::string, LookupTableDef> tables;
    nlohmann::json config_defaults = nlohmann::json::object();
};

/// Strict parse: unknown fields are rejected, errors carry JSON pointer
/// paths. Throws ConfigError. The parsed graph is NOT validated here;
/// callers run validate_graph (the engine does it on construction).
DataflowSpec parse_dataflow_spec_json(const nlohmann::json& doc);
DataflowSpec parse_dataflow_spec(const std::filesystem::path& path);

/// Canonical serialization: components sorted by id, edges sorted,
/// expressions in canonical text. parse(serialize(parse(x))) == parse(x).
nlohmann::json serialize_dataflow_spec(const DataflowSpec& spec);

} // namespace etlforge
