// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "etlforge/csv.hpp"
#include "etlforge/executor.hpp"
#include "etlforge/graph.hpp"
#include "etlforge/operators.hpp"
#include "etlforge/schema.hpp"

namespace etlforge::test {

inline Value I(std::int64_t v) { return Value(v); }
inline Value D(double v) { return Value(v); }
inline Value T(const char* v) { return Value(std::string(v)); }
inline Value B(bool v) { return Value(v); }
inline Value N() { return Value{}; }

inline Schema make_schema(std::initializer_list<std::pair<const char*, ValueKind>> cols) {
    std::vector<Column> out;
    for (const auto& [name, kind] : cols) out.push_back({name, kind});
    return Schema(std::move(out));
}

/// Unique scratch directory under the system temp dir; removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("etlforge_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::trunc);
    os << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_csv_rows(const std::filesystem::path& path, const std::vector<Row>& rows) {
    std::ofstream os(path, std::ios::trunc);
    write_rows_text(os, rows);
}

// ---- independent oracles ------------------------------------------------------

/// Collect-then-reduce group oracle, independent of the engine's streaming
/// accumulators. Groups emit in ascending key order.
std::vector<Row> oracle_aggregate(const std::vector<Row>& rows, const Schema& schema,
                                  const std::vector<std::string>& group_by, AggregateFn fn,
                                  const std::string& target);

/// Decorated-index reference sort (position-stable by construction).
std::vector<Row> oracle_stable_sort(const std::vector<Row>& rows, const Schema& schema,
                                    const std::vector<std::string>& keys,
                                    const std::vector<bool>& ascending);

/// Concatenate-then-stable-sort merge oracle.
std::vector<Row> oracle_merge(const std::vector<std::vector<Row>>& inputs, const Schema& schema,
                              const std::vector<std::string>& keys);

// ---- random dataflow fixtures ---------------------------------------------------

/// A randomly generated, valid dataflow written under `dir`: a source CSV,
/// zero or more lookup tables, and a graph ending in sinks.
struct RandomFlow {
    DataflowGraph graph;
    std::map<std::string, LookupTableDef> tables;
    std::vector<std::string> sink_paths; // relative to dir
    std::size_t source_rows = 0;
};

RandomFlow make_random_flow(std::mt19937_64& rng, const std::filesystem::path& dir,
                            int max_components);

PipelineConfig random_config(std::mt19937_64& rng, const RandomFlow& flow);

} // namespace etlforge::test
