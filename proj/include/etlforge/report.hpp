// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "etlforge/cost_model.hpp"
#include "etlforge/executor.hpp"
#include "etlforge/partition.hpp"
#include "etlforge/stats.hpp"

namespace etlforge {

/// {"components": {id: {rows_in, rows_out, caches, busy_ms}},
///  "trees": {"edges_copied_rows": {...}, "max_in_flight": {...}},
///  "copies": {...}, "total": {wall_ms, mode, m, m_prime}}
nlohmann::json stats_to_json(const RunStats& stats, RunMode mode, const PipelineConfig& config);

nlohmann::json plan_to_json(const ExecutionTreeGraph& plan, const DataflowGraph& graph);

nlohmann::json profile_to_json(const CostProfile& profile);

nlohmann::json calibration_to_json(const CalibrationResult& result);

} // namespace etlforge
