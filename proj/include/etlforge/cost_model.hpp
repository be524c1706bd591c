// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace etlforge {

class DataflowEngine;

/// Measured/derived quantities for one execution tree's pipeline section
/// (the n non-root activities). Times are in seconds.
///
/// The prediction expands the staggering activity's time as
/// t_j = t0 + lambda * N / m, giving
///   T_p(m) = (c - lambda*N)/m + t0*m + lambda*N + (n-1)*t0
/// which reduces to Ts = c + n*t0 at m = 1.
struct CostProfile {
    int n = 0;          // activities in the tree (root excluded)
    double t0 = 0;      // average miscellaneous time per activity
    double T0 = 0;      // total miscellaneous time (empty-input pass)
    double Ts = 0;      // measured sequential total over the sample splits
    double c = 0;       // net-work constant, Ts - T0
    std::vector<double> activity_times; // per-activity totals, in member order
    int staggering_index = 0;           // 0-based position of the slowest activity
    double lambda = 0;  // per-row coefficient of the staggering activity
    double N = 0;       // rows processed by the staggering activity (full input)
    std::uint64_t sigma_size = 0; // |Sigma|: tree root output rows (full input)

    void validate() const; // throws ConfigError on a malformed profile
};

/// Eq-style prediction of pipelined wall time at degree m. m=1 returns
/// c + n*t0 exactly (the reconstructed sequential time).
double predict_pipeline_time(const CostProfile& profile, int m); // throws on m < 1

/// The integer degree minimizing predict_pipeline_time, clamped to
/// [1, sigma_size]: the closed-form optimum sqrt((c - lambda*N)/t0) rounded
/// to the better of floor/ceil (ties to the smaller m). Degenerate regimes
/// (c - lambda*N <= 0 or t0 = 0) fall back to direct evaluation of the
/// clamp boundaries.
int optimal_degree(const CostProfile& profile);

/// Index of the maximal time; ties break to the smallest index (0-based).
std::size_t find_staggering_activity(const std::vector<double>& times); // throws on empty

/// Least squares for lambda with a known intercept: fits
/// busy = t0 + lambda * rows over (rows, busy) observations.
double fit_lambda(const std::vector<std::pair<double, double>>& rows_and_seconds, double t0);

struct CalibrationOptions {
    double sample_fraction = 0.1;
    int m_prime = 4;             // sample splits / pipeline degree for the fit run
    std::uint64_t seed = 1;      // row-sampling seed
    double min_activity_ms = 50; // every t_i must reach this or calibration errors
};

struct TreeCalibration {
    std::string tree_id;
    std::vector<std::string> activities; // member order, root excluded
    CostProfile profile;
    int recommended_m = 1;
    bool extrapolated = false; // N and sigma_size scaled up from the sample
};

struct CalibrationResult {
    std::vector<TreeCalibration> trees;       // tree topological order
    std::uint64_t full_source_rows = 0;
    std::uint64_t sample_source_rows = 0;
};

/// Alg-3-style calibration, end to end: (1) an empty-input run measures each
/// tree's total miscellaneous time T0 with a single empty split; (2) a
/// sequential run over m' sampled splits records Ts and per-activity times;
/// (3) c = Ts - T0, t0 = T0/n, staggering activity by argmax; (4) a
/// pipelined run over the same splits fits lambda from the staggering
/// activity's per-split times; (5) N and |Sigma| extrapolate by the
/// full/sample row ratio. Runs route to a null sink and never write files.
CalibrationResult calibrate(DataflowEngine& engine, const CalibrationOptions& options);

} // namespace etlforge
