// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/report.hpp"

namespace etlforge {

using nlohmann::json;

json stats_to_json(const RunStats& stats, RunMode mode, const PipelineConfig& config) {
    json out;
    json comps = json::object();
    for (const auto& [id, cs] : stats.components) {
        comps[id] = {{"rows_in", cs.rows_in},
                     {"rows_out", cs.rows_out},
                     {"caches", cs.caches},
                     {"busy_ms", cs.busy_ms}};
    }
    out["components"] = std::move(comps);
    out["trees"] = {{"edges_copied_rows", stats.tree_edge_copied_rows},
                    {"max_in_flight", stats.max_in_flight},
                    {"pipeline_ms", stats.tree_pipeline_ms}};
    out["copies"] = {{"count", stats.copies}, {"rows", stats.copied_rows}};
    out["total"] = {{"wall_ms", stats.wall_ms},
                    {"mode", std::string(run_mode_name(mode))},
                    {"m", config.m},
                    {"m_prime", config.m_prime},
                    {"shared_cache", config.shared_caching}};
    return out;
}

json plan_to_json(const ExecutionTreeGraph& plan, const DataflowGraph& graph) {
    json out;
    json trees = json::array();
    for (const auto& t : plan.trees) {
        json members = json::array();
        for (const auto& id : t.members) {
            members.push_back(
                {{"id", id},
                 {"operator", std::string(operator_name(graph.at(id).op))},
                 {"kind", std::string(component_kind_name(classify_component(graph.at(id))))}});
        }
        trees.push_back({{"id", t.id}, {"root", t.root}, {"members", std::move(members)}});
    }
    out["trees"] = std::move(trees);
    json edges = json::array();
    for (const auto& e : plan.edges) {
        edges.push_back({{"from_tree", e.from_tree},
                         {"to_tree", e.to_tree},
                         {"from_component", e.from_component},
                         {"to_component", e.to_component}});
    }
    out["tree_edges"] = std::move(edges);
    return out;
}

json profile_to_json(const CostProfile& p) {
    return {{"n", p.n},
            {"t0_s", p.t0},
            {"T0_s", p.T0},
            {"Ts_s", p.Ts},
            {"c_s", p.c},
            {"activity_times_s", p.activity_times},
            {"staggering_index", p.staggering_index + 1}, // 1-based in reports
            {"lambda_s_per_row", p.lambda},
            {"N_rows", p.N},
            {"sigma_rows", p.sigma_size}};
}

json calibration_to_json(const CalibrationResult& result) {
    json out;
    out["full_source_rows"] = result.full_source_rows;
    out["sample_source_rows"] = result.sample_source_rows;
    json trees = json::array();
    for (const auto& t : result.trees) {
        trees.push_back({{"tree", t.tree_id},
                         {"activities", t.activities},
                         {"staggering_activity",
                          t.activities[static_cast<std::size_t>(t.profile.staggering_index)]},
                         {"profile", profile_to_json(t.profile)},
                         {"recommended_m", t.recommended_m},
                         {"extrapolated", t.extrapolated}});
    }
    out["trees"] = std::move(trees);
    return out;
}

} // namespace etlforge
