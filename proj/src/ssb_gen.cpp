// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/ssb_gen.hpp"

#include <fstream>
#include <random>
#include <set>

#include "etlforge/errors.hpp"

namespace etlforge {

namespace {

/// mt19937_64 gives identical streams everywhere; the helpers below avoid
/// std::uniform_int_distribution, whose output is implementation-defined.
struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    std::uint64_t below(std::uint64_t n) { return gen() % n; }
    bool chance(double p) {
        return (static_cast<double>(gen() >> 11) * 0x1.0p-53) < p;
    }
    template <typename T> const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }
};

const std::vector<std::string> kRegions = {"AFRICA", "AMERICA", "ASIA", "EUROPE", "MIDDLE EAST"};

const std::vector<std::vector<std::string>> kNationsByRegion = {
    {"ALGERIA", "ETHIOPIA", "KENYA", "MOROCCO", "MOZAMBIQUE"},
    {"ARGENTINA", "BRAZIL", "CANADA", "PERU", "UNITED STATES"},
    {"CHINA", "INDIA", "INDONESIA", "JAPAN", "VIETNAM"},
    {"FRANCE", "GERMANY", "ROMANIA", "RUSSIA", "UNITED KINGDOM"},
    {"EGYPT", "IRAN", "IRAQ", "JORDAN", "SAUDI ARABIA"},
};

const std::vector<std::string> kCities = {"CITY#0", "CITY#1", "CITY#2", "CITY#3", "CITY#4",
                                          "CITY#5", "CITY#6", "CITY#7", "CITY#8", "CITY#9"};

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw ExecError("cannot open output file: " + path.string());
    return os;
}

} // namespace

std::uint64_t ssb_scaled_rows(std::uint64_t ref_rows, std::uint64_t scale_rows) {
    std::uint64_t scaled = ref_rows * scale_rows / kSsbRefFactRows;
    return std::max(scaled, kSsbMinDimensionRows);
}

std::vector<GeneratedFile> generate_ssb_data(const SsbGenConfig& config) {
    if (config.scale_rows < 1) throw ConfigError("scale_rows must be >= 1");
    if (config.miss_fraction < 0 || config.miss_fraction > 1) {
        throw ConfigError("miss_fraction must be in [0, 1]");
    }
    std::filesystem::create_directories(config.out_dir);

    const std::uint64_t customers = ssb_scaled_rows(kSsbRefCustomerRows, config.scale_rows);
    const std::uint64_t parts = ssb_scaled_rows(kSsbRefPartRows, config.scale_rows);
    const std::uint64_t suppliers = ssb_scaled_rows(kSsbRefSupplierRows, config.scale_rows);
    const std::uint64_t dates = ssb_scaled_rows(kSsbRefDateRows, config.scale_rows);

    std::vector<GeneratedFile> files;

    // customer: c_custkey, c_name, c_city, c_nation, c_region
    {
        Rng rng(config.seed * 31 + 1);
        auto os = open_out(config.out_dir / "customer.csv");
        for (std::uint64_t k = 1; k <= customers; ++k) {
            std::size_t region = rng.below(kRegions.size());
            os << k << ",Customer#" << k << ',' << rng.pick(kCities) << ','
               << rng.pick(kNationsByRegion[region]) << ',' << kRegions[region] << '\n';
        }
        files.push_back({"customer", config.out_dir / "customer.csv", customers});
    }

    // supplier: s_suppkey, s_name, s_city, s_nation, s_region
    {
        Rng rng(config.seed * 31 + 2);
        auto os = open_out(config.out_dir / "supplier.csv");
        for (std::uint64_t k = 1; k <= suppliers; ++k) {
            std::size_t region = rng.below(kRegions.size());
            os << k << ",Supplier#" << k << ',' << rng.pick(kCities) << ','
               << rng.pick(kNationsByRegion[region]) << ',' << kRegions[region] << '\n';
        }
        files.push_back({"supplier", config.out_dir / "supplier.csv", suppliers});
    }

    // part: p_partkey, p_name, p_mfgr, p_category, p_brand1
    {
        Rng rng(config.seed * 31 + 3);
        auto os = open_out(config.out_dir / "part.csv");
        for (std::uint64_t k = 1; k <= parts; ++k) {
            std::uint64_t mfgr = 1 + rng.below(5);
            std::uint64_t cat = 1 + rng.below(5);
            std::uint64_t brand = 1 + rng.below(40);
            os << k << ",Part#" << k << ",MFGR#" << mfgr << ",MFGR#" << mfgr << cat << ",MFGR#"
               << mfgr << cat << brand << '\n';
        }
        files.push_back({"part", config.out_dir / "part.csv", parts});
    }

    // date: d_datekey (yyyymmdd), d_year, d_yearmonthnum
    std::vector<std::int64_t> datekeys;
    {
        Rng rng(config.seed * 31 + 4);
        auto os = open_out(config.out_dir / "date.csv");
        datekeys.reserve(dates);
        std::set<std::int64_t> seen;
        while (datekeys.size() < dates) {
            std::int64_t year = 1992 + static_cast<std::int64_t>(rng.below(7));
            std::int64_t month = 1 + static_cast<std::int64_t>(rng.below(12));
            std::int64_t day = 1 + static_cast<std::int64_t>(rng.below(28));
            std::int64_t key = year * 10000 + month * 100 + day;
            if (!seen.insert(key).second) continue;
            datekeys.push_back(key);
        }
        for (std::int64_t key : datekeys) {
            os << key << ',' << key / 10000 << ',' << key / 100 << '\n';
        }
        files.push_back({"date", config.out_dir / "date.csv", dates});
    }

    // lineorder: lo_orderkey, lo_linenumber, lo_custkey, lo_partkey,
    //            lo_suppkey, lo_orderdate, lo_quantity, lo_revenue,
    //            lo_supplycost
    {
        Rng rng(config.seed * 31 + 5);
        auto os = open_out(config.out_dir / "lineorder.csv");
        for (std::uint64_t i = 1; i <= config.scale_rows; ++i) {
            bool miss = config.miss_fraction > 0 && rng.chance(config.miss_fraction);
            // A missing foreign key falls outside every dimension's range.
            std::uint64_t cust = miss ? customers + 1 + rng.below(customers)
                                      : 1 + rng.below(customers);
            std::uint64_t part = miss ? parts + 1 + rng.below(parts) : 1 + rng.below(parts);
            std::uint64_t supp =
                miss ? suppliers + 1 + rng.below(suppliers) : 1 + rng.below(suppliers);
            std::int64_t date = miss ? 1 : datekeys[rng.below(datekeys.size())];
            std::uint64_t qty = 1 + rng.below(50);
            std::uint64_t revenue = 100 + rng.below(999'900);
            std::uint64_t cost = 50 + rng.below(revenue);
            os << i << ',' << 1 + rng.below(7) << ',' << cust << ',' << part << ',' << supp << ','
               << date << ',' << qty << ',' << revenue << ',' << cost << '\n';
        }
        files.push_back({"lineorder", config.out_dir / "lineorder.csv", config.scale_rows});
    }

    nlohmann::json manifest = ssb_manifest_json(config, files);
    auto os = open_out(config.out_dir / "manifest.json");
    os << manifest.dump(2) << '\n';
    return files;
}

nlohmann::json ssb_manifest_json(const SsbGenConfig& config,
                                 const std::vector<GeneratedFile>& files) {
    nlohmann::json out;
    out["seed"] = config.seed;
    out["scale_rows"] = config.scale_rows;
    out["miss_fraction"] = config.miss_fraction;
    nlohmann::json jf = nlohmann::json::array();
    for (const auto& f : files) {
        jf.push_back({{"table", f.table}, {"path", f.path.filename().string()}, {"rows", f.rows}});
    }
    out["files"] = std::move(jf);
    return out;
}

} // namespace etlforge
