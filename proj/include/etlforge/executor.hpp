// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etlforge/cache.hpp"
#include "etlforge/graph.hpp"
#include "etlforge/partition.hpp"
#include "etlforge/stats.hpp"

namespace etlforge {

enum class RunMode { Sequential, Pipelined };

std::string_view run_mode_name(RunMode mode);

/// Row subsampling applied at the sources (used by calibration). A row is
/// kept when a seeded hash of its index falls below `fraction`.
struct SourceSample {
    double fraction = 1.0;
    std::uint64_t seed = 0;
};

struct PipelineConfig {
    int m = 1;       // horizontal splits of each tree root's output
    int m_prime = 1; // max caches concurrently in flight within a tree
    std::map<std::string, int> intra_workers; // component id -> worker count
    std::size_t batch_rows = 4096;            // source scan batch size
    bool shared_caching = true;  // false: copy at every in-tree handoff
    bool record_samples = false; // collect per-cache CacheSamples
    bool null_sinks = false;     // collect sink rows but write no files
    std::optional<SourceSample> source_sample;
};

/// Root input for trees that are not source-rooted.
struct TreeInput {
    std::vector<Row> rows;                           // block root (single upstream)
    std::map<std::string, std::vector<Row>> by_edge; // semi-block root, keyed by upstream id
};

struct TreeRunOutput {
    /// Rows leaving the tree across each crossing dataflow edge
    /// (from component, to component), reassembled in split order.
    std::map<std::pair<std::string, std::string>, std::vector<Row>> boundary_rows;
    /// Rows that reached each sink member, reassembled in split order.
    std::map<std::string, std::vector<Row>> sink_rows;
};

struct RunResult {
    RunStats stats;
    std::vector<std::filesystem::path> sink_files;
};

/// Horizontally partition rows into m even splits (sizes differ by at most
/// one, remainder to the lowest indices). Concatenation in split order
/// reproduces the input; trailing splits may be empty.
std::vector<CachePtr> split_root_output(std::vector<Row> rows, const Schema& schema, int m);

/// Apply one single-output row-synchronized operator with n workers: rows
/// are split evenly, processed concurrently, and merged back in sub-split
/// order into a fresh cache, so the output equals the n=1 output exactly.
/// n=1 applies the operator in place. Throws ConfigError for operators that
/// are not row-synchronized.
CachePtr run_intra_parallel(const OperatorDescriptor& op, const LookupTable* table,
                            CachePtr cache, int workers);

/// Owns a validated dataflow: resolved schemas, the execution tree plan, and
/// lookup tables (loaded on first run). Source paths resolve against
/// data_dir, sink paths against out_dir.
class DataflowEngine {
public:
    DataflowEngine(DataflowGraph graph, std::map<std::string, LookupTableDef> table_defs,
                   std::filesystem::path data_dir = ".", std::filesystem::path out_dir = ".");

    const DataflowGraph& graph() const { return graph_; }
    const ExecutionTreeGraph& plan() const { return plan_; }
    const ResolvedSchemas& schemas() const { return schemas_; }
    const std::map<std::string, LookupTableDef>& table_defs() const { return table_defs_; }
    const std::filesystem::path& data_dir() const { return data_dir_; }
    const std::filesystem::path& out_dir() const { return out_dir_; }

    /// Throws ConfigError when the configuration cannot apply to this graph.
    void validate_config(const PipelineConfig& config) const;

    /// Run one execution tree on the given root input (ignored for
    /// source-rooted trees). Stats accumulate into `stats`.
    TreeRunOutput run_tree(const std::string& tree_id, TreeInput input, RunMode mode,
                           const PipelineConfig& config, RunStats& stats);

    /// Run the whole dataflow: trees in topological order, rows crossing
    /// tree edges copied into the downstream root's input buffer, sinks
    /// written deterministically. Partial sink files are removed on abort.
    RunResult run_dataflow(RunMode mode, const PipelineConfig& config);

    void load_tables(); // idempotent; throws ExecError on missing files
    const LookupTableSet& tables() const { return tables_; }

private:
    DataflowGraph graph_;
    std::map<std::string, LookupTableDef> table_defs_;
    std::filesystem::path data_dir_;
    std::filesystem::path out_dir_;
    ResolvedSchemas schemas_;
    ExecutionTreeGraph plan_;
    std::map<std::string, std::string> boundary_target_tree_; // root comp -> tree id
    LookupTableSet tables_;
    bool tables_loaded_ = false;
};

} // namespace etlforge
