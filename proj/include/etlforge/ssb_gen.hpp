// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace etlforge {

/// Reference row counts the scale-down ratios come from: one star schema at
/// a 6M-row fact table with customer 150,000, part 24,000, supplier 231,000,
/// and date 10,000 rows. Dimensions scale by scale_rows / kSsbRefFactRows,
/// floored at kSsbMinDimensionRows.
inline constexpr std::uint64_t kSsbRefFactRows = 6'000'000;
inline constexpr std::uint64_t kSsbRefCustomerRows = 150'000;
inline constexpr std::uint64_t kSsbRefPartRows = 24'000;
inline constexpr std::uint64_t kSsbRefSupplierRows = 231'000;
inline constexpr std::uint64_t kSsbRefDateRows = 10'000;
inline constexpr std::uint64_t kSsbMinDimensionRows = 10;

struct SsbGenConfig {
    std::uint64_t scale_rows = 100'000; // lineorder rows
    std::uint64_t seed = 1;
    std::filesystem::path out_dir;
    /// Fraction of foreign keys drawn outside the dimension key range, to
    /// exercise the default-key (-1) lookup-miss path.
    double miss_fraction = 0.01;
};

struct GeneratedFile {
    std::string table;
    std::filesystem::path path;
    std::uint64_t rows = 0;
};

std::uint64_t ssb_scaled_rows(std::uint64_t ref_rows, std::uint64_t scale_rows);

/// Write lineorder, customer, part, supplier, and date CSVs plus a
/// manifest.json into out_dir. Deterministic for a given seed.
std::vector<GeneratedFile> generate_ssb_data(const SsbGenConfig& config);

nlohmann::json ssb_manifest_json(const SsbGenConfig& config,
                                 const std::vector<GeneratedFile>& files);

} // namespace etlforge
