// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/cost_model.hpp"

#include <algorithm>
#include <cmath>

#include "etlforge/errors.hpp"
#include "etlforge/csv.hpp"
#include "etlforge/executor.hpp"

namespace etlforge {

void CostProfile::validate() const {
    if (n < 1) throw ConfigError("cost profile: n must be >= 1");
    if (t0 < 0 || lambda < 0 || N < 0) {
        throw ConfigError("cost profile: t0, lambda, N must be >= 0");
    }
    if (c < 0) throw ConfigError("cost profile: c must be >= 0");
    if (staggering_index < 0 || staggering_index >= n) {
        throw ConfigError("cost profile: staggering index out of range");
    }
}

double predict_pipeline_time(const CostProfile& profile, int m) {
    if (m < 1) throw ConfigError("pipeline degree m must be >= 1");
    profile.validate();
    if (m == 1) {
        // algebraically (c - lambda*N)/1 + t0 + lambda*N + (n-1)*t0; fused so
        // the degenerate prediction reproduces Ts exactly
        return profile.c + profile.n * profile.t0;
    }
    double net = profile.c - profile.lambda * profile.N;
    return net / m + profile.t0 * m + profile.lambda * profile.N +
           (profile.n - 1) * profile.t0;
}

int optimal_degree(const CostProfile& profile) {
    profile.validate();
    const std::int64_t upper =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(profile.sigma_size));
    auto clamp = [&](std::int64_t m) {
        return static_cast<int>(std::clamp<std::int64_t>(m, 1, upper));
    };
    double net = profile.c - profile.lambda * profile.N;
    if (net <= 0 || profile.t0 <= 0) {
        // the closed form is undefined; T_p is monotone, so one of the
        // boundaries wins
        int lo = 1, hi = clamp(upper);
        double tl = predict_pipeline_time(profile, lo);
        double th = predict_pipeline_time(profile, hi);
        return th < tl ? hi : lo;
    }
    double real = std::sqrt(net / profile.t0);
    int floor_m = clamp(static_cast<std::int64_t>(std::floor(real)));
    int ceil_m = clamp(static_cast<std::int64_t>(std::ceil(real)));
    if (floor_m == ceil_m) return floor_m;
    double tf = predict_pipeline_time(profile, floor_m);
    double tc = predict_pipeline_time(profile, ceil_m);
    return tc < tf ? ceil_m : floor_m; // tie goes to the smaller m
}

std::size_t find_staggering_activity(const std::vector<double>& times) {
    if (times.empty()) throw ConfigError("no activity times given");
    std::size_t best = 0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] > times[best]) best = i;
    }
    return best;
}

double fit_lambda(const std::vector<std::pair<double, double>>& rows_and_seconds, double t0) {
    double num = 0, den = 0;
    for (const auto& [rows, seconds] : rows_and_seconds) {
        num += rows * (seconds - t0);
        den += rows * rows;
    }
    if (den <= 0) return 0;
    return std::max(0.0, num / den);
}

namespace {

/// Non-root member ids of a tree, in member order.
std::vector<std::string> tree_activities(const ExecutionTree& tree) {
    std::vector<std::string> out;
    for (const auto& id : tree.members) {
        if (id != tree.root) out.push_back(id);
    }
    return out;
}

std::uint64_t count_source_rows(const DataflowEngine& engine, const RunStats& stats) {
    std::uint64_t total = 0;
    for (const auto* c : engine.graph().components()) {
        if (classify_component(*c) == ComponentKind::Source) {
            auto it = stats.components.find(c->id);
            if (it != stats.components.end()) total += it->second.rows_out;
        }
    }
    return total;
}

} // namespace

CalibrationResult calibrate(DataflowEngine& engine, const CalibrationOptions& options) {
    if (options.sample_fraction <= 0 || options.sample_fraction > 1) {
        throw ConfigError("sample fraction must be in (0, 1]");
    }
    if (options.m_prime < 1) throw ConfigError("m_prime must be >= 1");

    // Step 1: empty input, one split, sequential. T0 per tree.
    PipelineConfig empty_cfg;
    empty_cfg.m = 1;
    empty_cfg.m_prime = 1;
    empty_cfg.null_sinks = true;
    empty_cfg.source_sample = SourceSample{0.0, options.seed};
    RunStats empty_stats = engine.run_dataflow(RunMode::Sequential, empty_cfg).stats;

    // Step 2: sampled input, m' splits, sequential. Ts and activity times.
    PipelineConfig seq_cfg;
    seq_cfg.m = options.m_prime;
    seq_cfg.m_prime = 1;
    seq_cfg.null_sinks = true;
    seq_cfg.source_sample = SourceSample{options.sample_fraction, options.seed};
    RunResult seq = engine.run_dataflow(RunMode::Sequential, seq_cfg);

    std::uint64_t sample_rows = count_source_rows(engine, seq.stats);
    if (sample_rows == 0) {
        throw ExecError("calibration sample is empty; increase the sample fraction");
    }
    std::uint64_t full_rows = 0;
    for (const auto* c : engine.graph().components()) {
        if (const auto* src = std::get_if<CsvSourceOp>(&c->op)) {
            std::filesystem::path path = src->path;
            if (path.is_relative()) path = engine.data_dir() / path;
            full_rows += count_csv_rows(path);
        }
    }
    double scale = sample_rows ? static_cast<double>(full_rows) / sample_rows : 1.0;

    // Step 4 run: pipelined over the same splits, with per-cache samples.
    PipelineConfig pipe_cfg = seq_cfg;
    pipe_cfg.m_prime = options.m_prime;
    pipe_cfg.record_samples = true;
    RunResult pipe = engine.run_dataflow(RunMode::Pipelined, pipe_cfg);

    CalibrationResult result;
    result.full_source_rows = full_rows;
    result.sample_source_rows = sample_rows;

    for (const auto& tree_id : tree_topological_order(engine.plan())) {
        const ExecutionTree* tree = engine.plan().tree_by_id(tree_id);
        std::vector<std::string> activities = tree_activities(*tree);
        if (activities.empty()) continue; // nothing to pipeline in this tree

        TreeCalibration cal;
        cal.tree_id = tree_id;
        cal.activities = activities;
        CostProfile& p = cal.profile;
        p.n = static_cast<int>(activities.size());
        p.T0 = empty_stats.tree_pipeline_ms.at(tree_id) / 1000.0;
        p.Ts = seq.stats.tree_pipeline_ms.at(tree_id) / 1000.0;
        p.t0 = p.T0 / p.n;
        p.c = std::max(0.0, p.Ts - p.T0);

        for (const auto& id : activities) {
            double busy_s = seq.stats.components.at(id).busy_ms / 1000.0;
            if (busy_s * 1000.0 < options.min_activity_ms) {
                throw ExecError("calibration: activity '" + id + "' measured " +
                                std::to_string(busy_s * 1000.0) +
                                " ms, below the " + std::to_string(options.min_activity_ms) +
                                " ms floor; use a larger sample");
            }
            p.activity_times.push_back(busy_s);
        }
        p.staggering_index = static_cast<int>(find_staggering_activity(p.activity_times));

        // lambda from the pipelined run's per-split observations of the
        // staggering activity
        const std::string& stag = activities[static_cast<std::size_t>(p.staggering_index)];
        std::vector<std::pair<double, double>> obs;
        for (const auto& s : pipe.stats.samples) {
            if (s.component == stag) {
                obs.emplace_back(static_cast<double>(s.rows_in), s.busy_ms / 1000.0);
            }
        }
        p.lambda = fit_lambda(obs, p.t0);

        double n_sample = static_cast<double>(seq.stats.components.at(stag).rows_in);
        p.N = n_sample * scale;
        double sigma_sample =
            static_cast<double>(seq.stats.components.at(tree->root).rows_out);
        p.sigma_size = static_cast<std::uint64_t>(sigma_sample * scale + 0.5);
        cal.extrapolated = scale > 1.0;
        cal.recommended_m = optimal_degree(p);
        result.trees.push_back(std::move(cal));
    }
    return result;
}

} // namespace etlforge
