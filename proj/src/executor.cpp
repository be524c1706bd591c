// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/executor.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>

#include "etlforge/csv.hpp"
#include "etlforge/errors.hpp"

namespace etlforge {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Even split sizes: remainder goes to the lowest indices.
std::vector<std::size_t> even_split_sizes(std::size_t total, std::size_t parts) {
    std::vector<std::size_t> sizes(parts, total / parts);
    for (std::size_t i = 0; i < total % parts; ++i) ++sizes[i];
    return sizes;
}

} // namespace

std::string_view run_mode_name(RunMode mode) {
    return mode == RunMode::Sequential ? "sequential" : "pipelined";
}

std::vector<CachePtr> split_root_output(std::vector<Row> rows, const Schema& schema, int m) {
    if (m < 1) throw ConfigError("split count m must be >= 1");
    auto sizes = even_split_sizes(rows.size(), static_cast<std::size_t>(m));
    std::vector<CachePtr> out;
    out.reserve(static_cast<std::size_t>(m));
    std::size_t at = 0;
    for (int i = 0; i < m; ++i) {
        std::vector<Row> part;
        part.reserve(sizes[static_cast<std::size_t>(i)]);
        for (std::size_t k = 0; k < sizes[static_cast<std::size_t>(i)]; ++k) {
            part.push_back(std::move(rows[at++]));
        }
        out.push_back(make_cache(schema, std::move(part), static_cast<std::size_t>(i), 0));
    }
    return out;
}

// ---- intra-component parallelism ---------------------------------------------

namespace {

/// Apply a single-output row-synchronized operator in place.
void apply_row_op(const OperatorDescriptor& op, const LookupTable* table, SharedCache& cache) {
    if (const auto* f = std::get_if<FilterOp>(&op)) {
        filter_rows(cache, *f->predicate);
    } else if (const auto* l = std::get_if<LookupOp>(&op)) {
        if (!table) throw ExecError("lookup table not loaded: '" + l->table + "'");
        lookup_join(cache, *table, *l);
    } else if (const auto* p = std::get_if<ProjectionOp>(&op)) {
        project_columns(cache, p->columns);
    } else if (const auto* e = std::get_if<ExpressionOp>(&op)) {
        evaluate_expression(cache, e->column, *e->expr);
    } else if (const auto* d = std::get_if<DelayOp>(&op)) {
        delay_rows(cache, *d);
    } else {
        throw ConfigError("operator '" + std::string(operator_name(op)) +
                          "' is not a single-output row-synchronized operator");
    }
}

/// Split a cache's rows into even sub-splits for the intra workers.
std::vector<CachePtr> make_sub_splits(SharedCache& cache, int workers) {
    auto sizes = even_split_sizes(cache.rows.size(), static_cast<std::size_t>(workers));
    std::vector<CachePtr> subs;
    subs.reserve(static_cast<std::size_t>(workers));
    std::size_t at = 0;
    for (int w = 0; w < workers; ++w) {
        std::vector<Row> part;
        part.reserve(sizes[static_cast<std::size_t>(w)]);
        for (std::size_t k = 0; k < sizes[static_cast<std::size_t>(w)]; ++k) {
            part.push_back(std::move(cache.rows[at++]));
        }
        subs.push_back(make_cache(cache.schema, std::move(part), cache.split_index,
                                  cache.stage_index));
    }
    return subs;
}

/// Run fn(w) for w in [0, workers) concurrently; rethrows the first failure.
void parallel_for_workers(int workers, const std::function<void(int)>& fn) {
    std::vector<std::thread> threads;
    std::mutex err_mtx;
    std::exception_ptr first_error;
    auto guarded = [&](int w) {
        try {
            fn(w);
        } catch (...) {
            std::lock_guard lk(err_mtx);
            if (!first_error) first_error = std::current_exception();
        }
    };
    threads.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) threads.emplace_back(guarded, w);
    guarded(0);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

CachePtr run_intra_parallel(const OperatorDescriptor& op, const LookupTable* table,
                            CachePtr cache, int workers) {
    if (operator_kind(op) != ComponentKind::RowSynchronized) {
        throw ConfigError("inside-component parallelism applies only to row-synchronized "
                          "components, not '" +
                          std::string(operator_name(op)) + "'");
    }
    if (workers < 1) throw ConfigError("intra worker count must be >= 1");
    if (workers == 1 || cache->rows.empty()) {
        apply_row_op(op, table, *cache);
        return cache;
    }

    std::vector<CachePtr> subs = make_sub_splits(*cache, workers);
    parallel_for_workers(workers, [&](int w) {
        apply_row_op(op, table, *subs[static_cast<std::size_t>(w)]);
    });

    // Row order synchronizer: merge in sub-split order into a fresh cache.
    CachePtr merged = make_cache(subs[0]->schema, {}, cache->split_index, cache->stage_index + 1);
    std::size_t total = 0;
    for (const auto& s : subs) total += s->rows.size();
    merged->rows.reserve(total);
    for (auto& s : subs) {
        for (auto& row : s->rows) merged->rows.push_back(std::move(row));
    }
    return merged;
}

// ---- tree runner ---------------------------------------------------------------

namespace {

/// Splitter with intra workers: each worker routes its sub-split, then the
/// per-branch outputs are concatenated in worker order.
std::vector<CachePtr> split_route_parallel(CachePtr cache, const SplitterOp& op, int workers) {
    if (workers <= 1 || cache->rows.empty()) return split_route(std::move(cache), op);
    std::size_t split = cache->split_index;
    std::size_t stage = cache->stage_index;
    std::vector<CachePtr> subs = make_sub_splits(*cache, workers);
    std::vector<std::vector<CachePtr>> routed(static_cast<std::size_t>(workers));
    parallel_for_workers(workers, [&](int w) {
        routed[static_cast<std::size_t>(w)] =
            split_route(std::move(subs[static_cast<std::size_t>(w)]), op);
    });
    std::vector<CachePtr> branches;
    branches.reserve(op.routes.size());
    for (std::size_t b = 0; b < op.routes.size(); ++b) {
        branches.push_back(make_cache(routed[0][b]->schema, {}, split, stage + 1));
        for (auto& per_worker : routed) {
            for (auto& row : per_worker[b]->rows) branches[b]->rows.push_back(std::move(row));
        }
    }
    return branches;
}

struct FirstError {
    std::mutex mtx;
    bool set = false;
    std::string message;

    void record(const std::string& component, std::size_t split, const std::string& what) {
        std::lock_guard lk(mtx);
        if (set) return;
        set = true;
        message = "component '" + component + "' failed on split " + std::to_string(split) +
                  ": " + what;
    }
};

class TreeRunner {
public:
    TreeRunner(const DataflowGraph& graph, const ResolvedSchemas& schemas,
               const ExecutionTree& tree, const LookupTableSet& tables,
               const PipelineConfig& config, RunMode mode)
        : graph_(graph), schemas_(schemas), tree_(tree), config_(config), mode_(mode) {
        std::set<std::string> member_set(tree.members.begin(), tree.members.end());
        // Nodes for the non-root members, wired parent -> child.
        for (const auto& id : tree.members) {
            if (id == tree.root) continue;
            auto node = std::make_unique<Node>();
            node->spec = &graph.at(id);
            node->kind = classify_component(*node->spec);
            node->out_schema = &schemas.outputs.at(id);
            if (const auto* l = std::get_if<LookupOp>(&node->spec->op)) {
                node->table = &tables.require(l->table);
            }
            if (auto it = config.intra_workers.find(id); it != config.intra_workers.end()) {
                node->intra = it->second;
            }
            nodes_[id] = std::move(node);
        }
        for (const auto& [id, node] : nodes_) {
            wire_outputs(id, node.get(), member_set);
        }
        root_spec_ = &graph.at(tree.root);
        wire_root(member_set);
    }

    /// Push already-split root output through the tree's activities.
    void run_splits(std::vector<CachePtr> splits, RunStats& stats) {
        const int m = config_.m;
        const int pool =
            mode_ == RunMode::Sequential ? 1 : std::min(m, std::max(1, config_.m_prime));
        std::atomic<std::size_t> next{0};
        std::atomic<int> in_flight{0};
        std::atomic<int> high_water{0};

        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= splits.size() || failed_.load()) break;
                int now = in_flight.fetch_add(1) + 1;
                int hw = high_water.load();
                while (now > hw && !high_water.compare_exchange_weak(hw, now)) {
                }
                try {
                    deliver(std::move(splits[i]), root_outs_, tree_.root);
                } catch (const std::exception& e) {
                    error_.record(tree_.root, i, e.what());
                    failed_.store(true);
                    wake_all();
                }
                in_flight.fetch_sub(1);
            }
        };

        auto t0 = Clock::now();
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(pool - 1));
        for (int p = 1; p < pool; ++p) threads.emplace_back(worker);
        worker();
        for (auto& t : threads) t.join();
        double pipeline_ms = ms_since(t0);

        if (failed_.load()) {
            collect(stats, pipeline_ms, high_water.load());
            throw ExecError(error_.message.empty() ? "tree execution failed" : error_.message);
        }
        collect(stats, pipeline_ms, high_water.load());
    }

    /// Boundary and sink rows reassembled by split index.
    TreeRunOutput take_output() {
        TreeRunOutput out;
        for (auto& [edge, chunks] : boundary_) {
            std::sort(chunks.begin(), chunks.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            auto& rows = out.boundary_rows[edge];
            for (auto& [split, part] : chunks) {
                for (auto& row : part) rows.push_back(std::move(row));
            }
        }
        for (auto& [sink, chunks] : sink_rows_) {
            std::sort(chunks.begin(), chunks.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            auto& rows = out.sink_rows[sink];
            for (auto& [split, part] : chunks) {
                for (auto& row : part) rows.push_back(std::move(row));
            }
        }
        return out;
    }

private:
    struct Node;

    struct OutEdge {
        std::string to;
        Node* child = nullptr; // null => crossing edge (copied at the boundary)
    };

    struct Node {
        const ComponentSpec* spec = nullptr;
        ComponentKind kind = ComponentKind::RowSynchronized;
        const Schema* out_schema = nullptr;
        const LookupTable* table = nullptr;
        int intra = 1;
        std::vector<OutEdge> outs; // ascending target id

        std::mutex mtx;
        std::condition_variable cv;
        bool busy = false;

        // owned by the busy section; merged after the run
        ComponentStats stats;
        std::vector<CacheSample> samples;
    };

    void wire_outputs(const std::string& id, Node* node, const std::set<std::string>& members) {
        for (const auto& to : graph_.successors(id)) {
            OutEdge e{to, nullptr};
            if (members.count(to)) {
                auto it = nodes_.find(to);
                e.child = it == nodes_.end() ? nullptr : it->second.get();
            }
            node->outs.push_back(std::move(e));
        }
    }

    void wire_root(const std::set<std::string>& members) {
        for (const auto& to : graph_.successors(tree_.root)) {
            OutEdge e{to, nullptr};
            if (members.count(to)) e.child = nodes_.at(to).get();
            root_outs_.push_back(std::move(e));
        }
    }

    void wake_all() {
        for (auto& [id, node] : nodes_) node->cv.notify_all();
    }

    /// Copy rows across a tree boundary into the staging area.
    void cross_boundary(const std::string& from, const std::string& to, const SharedCache& cache) {
        std::vector<Row> copy = cache.rows; // the COPY the tree edge requires
        std::lock_guard lk(boundary_mtx_);
        copies_ += 1;
        copied_rows_ += copy.size();
        edge_copied_rows_[from + "->" + to] += copy.size();
        boundary_[{from, to}].emplace_back(cache.split_index, std::move(copy));
    }

    /// In-tree handoff; without shared caching this is a physical copy into
    /// a fresh buffer.
    CachePtr handoff(CachePtr cache) {
        if (config_.shared_caching) return cache;
        CachePtr fresh = copy_cache(*cache);
        {
            std::lock_guard lk(boundary_mtx_);
            copies_ += 1;
            copied_rows_ += fresh->rows.size();
        }
        return fresh;
    }

    /// Route one cache along a component's out-edges: copies across
    /// boundaries, recursion into in-tree children.
    void deliver(CachePtr cache, const std::vector<OutEdge>& outs, const std::string& from) {
        Node* child = nullptr;
        for (const auto& e : outs) {
            if (e.child) {
                child = e.child; // validation guarantees at most one
            } else {
                cross_boundary(from, e.to, *cache);
            }
        }
        if (child) {
            process(child, handoff(std::move(cache)));
        }
    }

    void process(Node* node, CachePtr cache) {
        if (failed_.load()) return;
        // Mutual exclusion per activity: wait until the component is free,
        // exactly the halted-consumer scheme of pipeline parallelization.
        {
            std::unique_lock lk(node->mtx);
            node->cv.wait(lk, [&] { return !node->busy || failed_.load(); });
            if (failed_.load()) return;
            node->busy = true;
        }

        cache->acquire(node);
        std::uint64_t rows_in = cache->rows.size();
        std::size_t split = cache->split_index;
        auto t0 = Clock::now();

        std::vector<CachePtr> branches; // splitter only
        bool is_splitter = std::holds_alternative<SplitterOp>(node->spec->op);
        bool ok = true;
        try {
            if (node->kind == ComponentKind::Sink) {
                ++cache->stage_index;
            } else if (is_splitter) {
                const auto& op = std::get<SplitterOp>(node->spec->op);
                cache->release(node);
                branches = split_route_parallel(std::move(cache), op, node->intra);
            } else if (node->intra > 1) {
                cache->release(node);
                cache = run_intra_parallel(node->spec->op, node->table, std::move(cache),
                                           node->intra);
            } else {
                apply_row_op(node->spec->op, node->table, *cache);
            }
        } catch (const std::exception& e) {
            error_.record(node->spec->id, split, e.what());
            failed_.store(true);
            ok = false;
        }

        if (ok) {
            double busy = ms_since(t0);
            std::uint64_t rows_out = 0;
            if (is_splitter) {
                for (const auto& b : branches) rows_out += b->rows.size();
            } else {
                rows_out = cache->rows.size();
            }
            node->stats.rows_in += rows_in;
            node->stats.rows_out += rows_out;
            node->stats.caches += 1;
            node->stats.busy_ms += busy;
            if (config_.record_samples) {
                node->samples.push_back({node->spec->id, split, rows_in, busy});
            }
            if (node->kind == ComponentKind::Sink) {
                cache->release(node);
                std::lock_guard lk(boundary_mtx_);
                sink_rows_[node->spec->id].emplace_back(split, std::move(cache->rows));
            }
        }

        // Free the activity before carrying the cache onward; the next
        // consumer may enter while this one walks downstream.
        {
            std::lock_guard lk(node->mtx);
            node->busy = false;
        }
        node->cv.notify_all();

        if (!ok) {
            wake_all();
            return;
        }
        if (node->kind == ComponentKind::Sink) return;

        if (is_splitter) {
            // branch i feeds the i-th out-edge in ascending target id order
            for (std::size_t b = 0; b < branches.size(); ++b) {
                const OutEdge& e = node->outs[b];
                if (e.child) {
                    process(e.child, handoff(std::move(branches[b])));
                } else {
                    cross_boundary(node->spec->id, e.to, *branches[b]);
                }
            }
            return;
        }

        if (node->intra <= 1) cache->release(node);
        deliver(std::move(cache), node->outs, node->spec->id);
    }

    void collect(RunStats& stats, double pipeline_ms, int high_water) {
        for (auto& [id, node] : nodes_) {
            auto& cs = stats.components[id];
            cs.rows_in += node->stats.rows_in;
            cs.rows_out += node->stats.rows_out;
            cs.caches += node->stats.caches;
            cs.busy_ms += node->stats.busy_ms;
            for (auto& s : node->samples) stats.samples.push_back(std::move(s));
        }
        stats.copies += copies_;
        stats.copied_rows += copied_rows_;
        stats.tree_pipeline_ms[tree_.id] += pipeline_ms;
        auto& hw = stats.max_in_flight[tree_.id];
        hw = std::max<std::uint64_t>(hw, static_cast<std::uint64_t>(high_water));
    }

public:
    /// Component-edge copy totals ("from->to"), for tree-edge accounting.
    const std::map<std::string, std::uint64_t>& component_edge_copies() const {
        return edge_copied_rows_;
    }

private:
    const DataflowGraph& graph_;
    const ResolvedSchemas& schemas_;
    const ExecutionTree& tree_;
    const PipelineConfig& config_;
    RunMode mode_;

    std::map<std::string, std::unique_ptr<Node>> nodes_;
    const ComponentSpec* root_spec_ = nullptr;
    std::vector<OutEdge> root_outs_;

    std::mutex boundary_mtx_;
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<std::size_t, std::vector<Row>>>>
        boundary_;
    std::map<std::string, std::vector<std::pair<std::size_t, std::vector<Row>>>> sink_rows_;
    std::uint64_t copies_ = 0;
    std::uint64_t copied_rows_ = 0;
    std::map<std::string, std::uint64_t> edge_copied_rows_;

    std::atomic<bool> failed_{false};
    FirstError error_;
};

} // namespace

// ---- engine ---------------------------------------------------------------------

DataflowEngine::DataflowEngine(DataflowGraph graph,
                               std::map<std::string, LookupTableDef> table_defs,
                               std::filesystem::path data_dir, std::filesystem::path out_dir)
    : graph_(std::move(graph)), table_defs_(std::move(table_defs)),
      data_dir_(std::move(data_dir)), out_dir_(std::move(out_dir)) {
    ValidationReport report = validate_graph(graph_, table_defs_);
    if (!report.ok()) {
        std::string msg = "invalid dataflow:";
        for (const auto& v : report.violations) {
            msg += "\n  [" + std::string(violation_code_name(v.code)) + "] " + v.message;
        }
        throw ConfigError(msg);
    }
    schemas_ = resolve_schemas(graph_, table_defs_);
    plan_ = partition(graph_);
    for (const auto& t : plan_.trees) boundary_target_tree_[t.root] = t.id;
}

void DataflowEngine::validate_config(const PipelineConfig& config) const {
    if (config.m < 1) throw ConfigError("m must be >= 1");
    if (config.m_prime < 1 || config.m_prime > config.m) {
        throw ConfigError("m_prime must satisfy 1 <= m_prime <= m");
    }
    if (config.batch_rows < 1) throw ConfigError("batch_rows must be >= 1");
    for (const auto& [id, n] : config.intra_workers) {
        if (n < 1) throw ConfigError("intra workers for '" + id + "' must be >= 1");
        if (!graph_.has(id)) throw ConfigError("intra workers name unknown component '" + id + "'");
        if (classify_component(graph_.at(id)) != ComponentKind::RowSynchronized) {
            throw ConfigError("intra workers apply only to row-synchronized components; '" + id +
                              "' is " +
                              std::string(component_kind_name(classify_component(graph_.at(id)))));
        }
    }
    if (config.source_sample) {
        double f = config.source_sample->fraction;
        if (f < 0.0 || f > 1.0) throw ConfigError("sample fraction must be in [0, 1]");
    }
}

void DataflowEngine::load_tables() {
    if (tables_loaded_) return;
    for (const auto& [name, def] : table_defs_) {
        tables_.add(name, LookupTable::load(def, data_dir_));
    }
    tables_loaded_ = true;
}

TreeRunOutput DataflowEngine::run_tree(const std::string& tree_id, TreeInput input, RunMode mode,
                                       const PipelineConfig& config, RunStats& stats) {
    validate_config(config);
    load_tables();
    const ExecutionTree* tree = plan_.tree_by_id(tree_id);
    if (!tree) throw ConfigError("unknown execution tree: '" + tree_id + "'");
    const ComponentSpec& root = graph_.at(tree->root);

    // Root activity: produce the tree output Sigma.
    auto root_t0 = Clock::now();
    std::uint64_t rows_in = 0;
    std::vector<Row> sigma;
    const Schema& sigma_schema = schemas_.outputs.at(tree->root);

    if (const auto* src = std::get_if<CsvSourceOp>(&root.op)) {
        std::filesystem::path path = src->path;
        if (path.is_relative()) path = data_dir_ / path;
        std::function<bool(std::uint64_t)> keep;
        if (config.source_sample) {
            double fraction = config.source_sample->fraction;
            std::uint64_t seed =
                config.source_sample->seed ^ std::hash<std::string>{}(root.id);
            keep = [fraction, seed](std::uint64_t row) {
                double u = static_cast<double>(splitmix64(seed ^ row) >> 11) * 0x1.0p-53;
                return u < fraction;
            };
        }
        csv_source_scan(path, src->schema, config.batch_rows,
                        [&](CachePtr c) {
                            for (auto& row : c->rows) sigma.push_back(std::move(row));
                        },
                        keep);
        rows_in = sigma.size();
    } else if (const auto* agg = std::get_if<AggregateOp>(&root.op)) {
        rows_in = input.rows.size();
        sigma = aggregate_group(std::move(input.rows), *agg, schemas_.inputs.at(root.id)[0]);
    } else if (const auto* sort = std::get_if<SortOp>(&root.op)) {
        rows_in = input.rows.size();
        sigma = std::move(input.rows);
        sort_rows(sigma, sigma_schema, sort->keys, sort->ascending);
    } else if (std::holds_alternative<UnionAllOp>(root.op) ||
               std::holds_alternative<MergeSortedOp>(root.op)) {
        std::vector<std::vector<Row>> inputs;
        std::vector<std::string> names;
        for (auto& [from, rows] : input.by_edge) { // ascending upstream id
            rows_in += rows.size();
            names.push_back(from);
            inputs.push_back(std::move(rows));
        }
        if (const auto* merge = std::get_if<MergeSortedOp>(&root.op)) {
            sigma = merge_sorted(std::move(inputs), sigma_schema, merge->keys, &names);
        } else {
            sigma = union_all(std::move(inputs));
        }
    } else {
        throw ConfigError("tree root '" + root.id + "' must be a source, block, or semi-block");
    }

    auto& root_stats = stats.components[root.id];
    root_stats.rows_in += rows_in;
    root_stats.rows_out += sigma.size();
    root_stats.caches += 1;
    root_stats.busy_ms += ms_since(root_t0);

    TreeRunner runner(graph_, schemas_, *tree, tables_, config, mode);
    std::vector<CachePtr> splits = split_root_output(std::move(sigma), sigma_schema, config.m);
    // Component-edge copies re-key as tree edges in the stats.
    auto record_edge_copies = [&] {
        for (const auto& [edge, rows] : runner.component_edge_copies()) {
            auto arrow = edge.find("->");
            std::string to_comp = edge.substr(arrow + 2);
            auto it = boundary_target_tree_.find(to_comp);
            std::string key =
                it != boundary_target_tree_.end() ? tree_id + "->" + it->second : edge;
            stats.tree_edge_copied_rows[key] += rows;
        }
    };
    try {
        runner.run_splits(std::move(splits), stats);
    } catch (...) {
        record_edge_copies();
        throw;
    }
    record_edge_copies();
    return runner.take_output();
}

RunResult DataflowEngine::run_dataflow(RunMode mode, const PipelineConfig& config) {
    validate_config(config);
    load_tables();
    RunResult result;
    auto t0 = Clock::now();

    // Staged root inputs: downstream tree -> upstream component -> rows.
    std::map<std::string, std::map<std::string, std::vector<Row>>> staged;
    std::map<std::pair<std::string, std::string>, bool> edge_complete;
    for (const auto& e : plan_.edges) edge_complete[{e.from_component, e.to_component}] = false;

    std::vector<std::filesystem::path> written;
    try {
        for (const auto& tree_id : tree_topological_order(plan_)) {
            const ExecutionTree* tree = plan_.tree_by_id(tree_id);
            const ComponentSpec& root = graph_.at(tree->root);

            TreeInput input;
            if (classify_component(root) != ComponentKind::Source) {
                // A block/semi-block root starts only when every inbound
                // edge has been completed by its upstream tree.
                for (const auto& from : graph_.predecessors(tree->root)) {
                    auto it = edge_complete.find({from, tree->root});
                    if (it == edge_complete.end() || !it->second) {
                        throw ExecError("tree '" + tree_id + "' root '" + tree->root +
                                        "' started before upstream '" + from + "' completed");
                    }
                }
                auto& chunks = staged[tree_id];
                if (classify_component(root) == ComponentKind::Block) {
                    if (!chunks.empty()) input.rows = std::move(chunks.begin()->second);
                } else {
                    input.by_edge = std::move(chunks);
                    // semi-block inputs that never received rows still exist
                    for (const auto& from : graph_.predecessors(tree->root)) {
                        input.by_edge.try_emplace(from);
                    }
                }
                staged.erase(tree_id);
            }

            TreeRunOutput out = run_tree(tree_id, std::move(input), mode, config, result.stats);

            for (auto& [edge, rows] : out.boundary_rows) {
                const auto& [from, to] = edge;
                auto it = boundary_target_tree_.find(to);
                if (it == boundary_target_tree_.end()) {
                    throw ExecError("boundary edge lands on non-root component '" + to + "'");
                }
                auto& slot = staged[it->second][from];
                for (auto& row : rows) slot.push_back(std::move(row));
                edge_complete[{from, to}] = true;
            }

            // Sinks flush at tree completion, reassembled by split already.
            for (auto& [sink_id, rows] : out.sink_rows) {
                const auto& sink = std::get<TextSinkOp>(graph_.at(sink_id).op);
                if (config.null_sinks) continue;
                std::filesystem::path path = sink.path;
                if (path.is_relative()) path = out_dir_ / path;
                if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
                std::ofstream os(path, std::ios::trunc);
                if (!os) throw ExecError("cannot open sink file: " + path.string());
                write_rows_text(os, rows, sink.delimiter);
                os.flush();
                if (!os) throw ExecError("failed writing sink file: " + path.string());
                written.push_back(path);
            }
        }
    } catch (...) {
        for (const auto& p : written) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        throw;
    }

    result.sink_files = std::move(written);
    result.stats.wall_ms = ms_since(t0);
    return result;
}

} // namespace etlforge
