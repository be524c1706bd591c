// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace etlforge {

struct ComponentStats {
    std::uint64_t rows_in = 0;
    std::uint64_t rows_out = 0;
    std::uint64_t caches = 0; // shared caches processed
    double busy_ms = 0;
};

/// One timed observation of an activity processing one cache. Recorded only
/// when PipelineConfig.record_samples is set; calibration fits the per-row
/// coefficient from these.
struct CacheSample {
    std::string component;
    std::size_t split_index = 0;
    std::uint64_t rows_in = 0;
    double busy_ms = 0;
};

struct RunStats {
    std::map<std::string, ComponentStats> components;
    /// "T1->T2" -> rows copied across that tree edge.
    std::map<std::string, std::uint64_t> tree_edge_copied_rows;
    std::uint64_t copies = 0;      // copy operations performed
    std::uint64_t copied_rows = 0; // total rows copied
    /// Per tree: high-water mark of caches concurrently in flight.
    std::map<std::string, std::uint64_t> max_in_flight;
    /// Per tree: wall time of the pipeline section (splits through the
    /// non-root activities), excluding root output production.
    std::map<std::string, double> tree_pipeline_ms;
    double wall_ms = 0;
    std::vector<CacheSample> samples;
};

} // namespace etlforge
