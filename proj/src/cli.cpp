// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "etlforge/cost_model.hpp"
#include "etlforge/csv.hpp"
#include "etlforge/errors.hpp"
#include "etlforge/executor.hpp"
#include "etlforge/report.hpp"
#include "etlforge/spec_io.hpp"
#include "etlforge/ssb_gen.hpp"

namespace etlforge {

namespace {

using nlohmann::json;

/// ETLFORGE_CORES caps worker counts (m' and intra threads) for CI
/// determinism; 0 / unset means no cap.
int cores_cap() {
    const char* env = std::getenv("ETLFORGE_CORES");
    if (!env) return 0;
    int v = std::atoi(env);
    return v > 0 ? v : 0;
}

std::string timestamp_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

struct CommonArgs {
    std::string spec_path;
    std::string config_path;
    bool json_output = false;
    std::string data_dir; // defaults to the spec file's directory
    std::string out_dir = ".";
};

struct RunArgs {
    std::string mode = "seq";
    std::string shared_cache = "on";
    int m = 1;
    int m_prime = 1;
    std::vector<std::string> intra; // comp=K
    std::size_t batch_rows = 4096;
};

std::map<std::string, int> parse_intra(const std::vector<std::string>& pairs) {
    std::map<std::string, int> out;
    for (const auto& p : pairs) {
        auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("--intra expects comp=K, got '" + p + "'");
        }
        int n = 0;
        try {
            n = std::stoi(p.substr(eq + 1));
        } catch (...) {
            throw ConfigError("--intra expects comp=K, got '" + p + "'");
        }
        out[p.substr(0, eq)] = n;
    }
    return out;
}

/// Layer config sources: spec defaults, then --config file, then explicit
/// flags (tracked by CLI11 counts).
struct ResolvedRun {
    RunMode mode = RunMode::Sequential;
    PipelineConfig config;
    std::filesystem::path data_dir;
    std::filesystem::path out_dir;
};

void apply_config_json(const json& cfg, const std::string& origin, RunArgs& run,
                       CommonArgs& common) {
    for (const auto& [key, value] : cfg.items()) {
        if (key == "m") run.m = value.get<int>();
        else if (key == "m_prime") run.m_prime = value.get<int>();
        else if (key == "batch_rows") run.batch_rows = value.get<std::size_t>();
        else if (key == "mode") run.mode = value.get<std::string>();
        else if (key == "shared_cache") {
            run.shared_cache = value.is_boolean() ? (value.get<bool>() ? "on" : "off")
                                                  : value.get<std::string>();
        } else if (key == "intra") {
            run.intra.clear();
            for (const auto& [comp, n] : value.items()) {
                run.intra.push_back(comp + "=" + std::to_string(n.get<int>()));
            }
        } else if (key == "out_dir") common.out_dir = value.get<std::string>();
        else if (key == "data_dir") common.data_dir = value.get<std::string>();
        else {
            throw ConfigError(origin + ": unknown config key '" + key + "'");
        }
    }
}

DataflowSpec load_spec(const CommonArgs& common) {
    DataflowSpec spec = parse_dataflow_spec(common.spec_path);
    return spec;
}

ResolvedRun resolve_run(const DataflowSpec& spec, const CLI::App* cmd, RunArgs flags,
                        CommonArgs common) {
    // Snapshot explicit flags before lower-precedence layers overwrite them.
    RunArgs explicit_flags = flags;
    apply_config_json(spec.config_defaults, "spec config", flags, common);
    if (!common.config_path.empty()) {
        std::ifstream in(common.config_path);
        if (!in) throw ConfigError("cannot open config file: " + common.config_path);
        json cfg;
        try {
            cfg = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("config file " + common.config_path + ": " + e.what());
        }
        apply_config_json(cfg, common.config_path, flags, common);
    }
    auto given = [&](const std::string& name) {
        const CLI::Option* opt = cmd->get_option_no_throw(name);
        return opt && opt->count() > 0;
    };
    if (given("--mode")) flags.mode = explicit_flags.mode;
    if (given("--shared-cache")) flags.shared_cache = explicit_flags.shared_cache;
    if (given("--m")) flags.m = explicit_flags.m;
    if (given("--m-prime")) flags.m_prime = explicit_flags.m_prime;
    if (given("--intra")) flags.intra = explicit_flags.intra;
    if (given("--batch-rows")) flags.batch_rows = explicit_flags.batch_rows;

    ResolvedRun r;
    if (flags.mode == "seq") r.mode = RunMode::Sequential;
    else if (flags.mode == "pipe") r.mode = RunMode::Pipelined;
    else throw ConfigError("--mode must be seq or pipe, got '" + flags.mode + "'");
    if (flags.shared_cache != "on" && flags.shared_cache != "off") {
        throw ConfigError("--shared-cache must be on or off");
    }
    r.config.m = flags.m;
    r.config.m_prime = flags.m_prime;
    r.config.batch_rows = flags.batch_rows;
    r.config.shared_caching = flags.shared_cache == "on";
    r.config.intra_workers = parse_intra(flags.intra);

    if (int cap = cores_cap()) {
        r.config.m_prime = std::min(r.config.m_prime, cap);
        for (auto& [id, n] : r.config.intra_workers) n = std::min(n, cap);
    }

    r.data_dir = common.data_dir.empty()
                     ? std::filesystem::path(common.spec_path).parent_path()
                     : std::filesystem::path(common.data_dir);
    if (r.data_dir.empty()) r.data_dir = ".";
    r.out_dir = common.out_dir;
    return r;
}

// ---- subcommand bodies -------------------------------------------------------

int cmd_plan(const CommonArgs& common, std::ostream& out) {
    DataflowSpec spec = load_spec(common);
    ValidationReport report = validate_graph(spec.graph, spec.tables);
    if (!report.ok()) {
        json jv = json::array();
        for (const auto& v : report.violations) {
            jv.push_back({{"code", std::string(violation_code_name(v.code))},
                          {"message", v.message},
                          {"components", v.components}});
        }
        throw ConfigError("invalid dataflow:\n" + jv.dump(2));
    }
    ExecutionTreeGraph plan_graph = partition(spec.graph);
    json doc = plan_to_json(plan_graph, spec.graph);
    doc["name"] = spec.name;
    doc["tree_order"] = tree_topological_order(plan_graph);
    if (common.json_output) {
        out << doc.dump(2) << '\n';
        return 0;
    }
    out << "dataflow: " << spec.name << "\n";
    for (const auto& t : doc["trees"]) {
        out << "  " << t["id"].get<std::string>() << " (root " << t["root"].get<std::string>()
            << "): ";
        bool first = true;
        for (const auto& m : t["members"]) {
            if (!first) out << " -> ";
            out << m["id"].get<std::string>() << "[" << m["kind"].get<std::string>() << "]";
            first = false;
        }
        out << "\n";
    }
    for (const auto& e : doc["tree_edges"]) {
        out << "  copy " << e["from_tree"].get<std::string>() << " -> "
            << e["to_tree"].get<std::string>() << " (" << e["from_component"].get<std::string>()
            << " -> " << e["to_component"].get<std::string>() << ")\n";
    }
    return 0;
}

int cmd_run(const CommonArgs& common, const ResolvedRun& r, std::ostream& out) {
    DataflowSpec spec = load_spec(common);
    DataflowEngine engine(spec.graph, spec.tables, r.data_dir, r.out_dir);
    RunResult result = engine.run_dataflow(r.mode, r.config);
    json doc = stats_to_json(result.stats, r.mode, r.config);
    json files = json::array();
    for (const auto& f : result.sink_files) files.push_back(f.string());
    doc["sink_files"] = std::move(files);
    if (common.json_output) {
        out << doc.dump(2) << '\n';
        return 0;
    }
    out << "mode " << run_mode_name(r.mode) << ", m=" << r.config.m
        << ", m'=" << r.config.m_prime << ", shared cache "
        << (r.config.shared_caching ? "on" : "off") << "\n";
    out << "wall: " << result.stats.wall_ms << " ms, copies: " << result.stats.copies << " ("
        << result.stats.copied_rows << " rows)\n";
    for (const auto& f : result.sink_files) out << "wrote " << f.string() << "\n";
    return 0;
}

int cmd_calibrate(const CommonArgs& common, const ResolvedRun& r, double sample_fraction,
                  std::uint64_t seed, std::ostream& out) {
    DataflowSpec spec = load_spec(common);
    DataflowEngine engine(spec.graph, spec.tables, r.data_dir, r.out_dir);
    CalibrationOptions opts;
    opts.sample_fraction = sample_fraction;
    opts.m_prime = std::max(1, r.config.m_prime);
    opts.seed = seed;
    CalibrationResult result = calibrate(engine, opts);
    json doc = calibration_to_json(result);
    if (common.json_output) {
        out << doc.dump(2) << '\n';
        return 0;
    }
    for (const auto& t : result.trees) {
        out << t.tree_id << ": n=" << t.profile.n << ", c=" << t.profile.c
            << "s, t0=" << t.profile.t0 << "s, lambda=" << t.profile.lambda
            << "s/row, N=" << t.profile.N << ", staggering "
            << t.activities[static_cast<std::size_t>(t.profile.staggering_index)]
            << " -> recommended m = " << t.recommended_m
            << (t.extrapolated ? " (extrapolated)" : "") << "\n";
    }
    return 0;
}

int cmd_bench(const CommonArgs& common, const ResolvedRun& r, const std::string& m_list,
              int repeats, std::ostream& out) {
    if (repeats < 1) throw ConfigError("--repeats must be >= 1");
    std::vector<int> ms;
    {
        std::string cur;
        for (char c : m_list + ",") {
            if (c == ',') {
                if (!cur.empty()) ms.push_back(std::stoi(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
    }
    if (ms.empty()) throw ConfigError("--m-list is empty");

    DataflowSpec spec = load_spec(common);
    DataflowEngine engine(spec.graph, spec.tables, r.data_dir, r.out_dir);

    json runs = json::array();
    auto time_runs = [&](RunMode mode, PipelineConfig cfg) {
        std::vector<double> walls;
        std::uint64_t copies = 0;
        for (int i = 0; i < repeats; ++i) {
            RunResult result = engine.run_dataflow(mode, cfg);
            walls.push_back(result.stats.wall_ms);
            copies = result.stats.copies;
            json jr = stats_to_json(result.stats, mode, cfg);
            runs.push_back(std::move(jr));
        }
        return std::pair(median(walls), copies);
    };

    PipelineConfig seq_cfg = r.config;
    seq_cfg.m = 1;
    seq_cfg.m_prime = 1;
    auto [seq_wall, seq_copies] = time_runs(RunMode::Sequential, seq_cfg);

    PipelineConfig unshared_cfg = seq_cfg;
    unshared_cfg.shared_caching = false;
    auto [unshared_wall, unshared_copies] = time_runs(RunMode::Sequential, unshared_cfg);

    json speedups = json::object();
    json medians = json::object();
    medians["seq"] = seq_wall;
    medians["seq_no_shared_cache"] = unshared_wall;
    for (int m : ms) {
        PipelineConfig cfg = r.config;
        cfg.m = m;
        cfg.m_prime = m; // the sweep pipelines at full degree
        if (int cap = cores_cap()) cfg.m_prime = std::min(cfg.m_prime, cap);
        auto [wall, copies] = time_runs(RunMode::Pipelined, cfg);
        speedups[std::to_string(m)] = seq_wall / wall;
        medians["m=" + std::to_string(m)] = wall;
    }

    json doc;
    doc["environment"] = {{"cores", std::thread::hardware_concurrency()},
                          {"timestamp", timestamp_utc()}};
    doc["runs"] = std::move(runs);
    doc["derived"] = {{"speedup_vs_sequential", speedups},
                      {"median_wall_ms", medians},
                      {"copies_saved", unshared_copies - seq_copies}};
    if (common.json_output) {
        out << doc.dump(2) << '\n';
        return 0;
    }
    out << "sequential median: " << seq_wall << " ms (no shared cache: " << unshared_wall
        << " ms, copies saved: " << (unshared_copies - seq_copies) << ")\n";
    for (int m : ms) {
        out << "m=" << m << ": " << medians["m=" + std::to_string(m)].get<double>()
            << " ms, speedup " << speedups[std::to_string(m)].get<double>() << "x\n";
    }
    return 0;
}

int cmd_gen_ssb(std::uint64_t rows, std::uint64_t seed, const std::string& out_dir,
                double miss_fraction, bool json_output, std::ostream& out) {
    SsbGenConfig cfg;
    cfg.scale_rows = rows;
    cfg.seed = seed;
    cfg.out_dir = out_dir;
    cfg.miss_fraction = miss_fraction;
    std::vector<GeneratedFile> files = generate_ssb_data(cfg);
    json doc = ssb_manifest_json(cfg, files);
    if (json_output) {
        out << doc.dump(2) << '\n';
        return 0;
    }
    for (const auto& f : files) {
        out << f.table << ": " << f.rows << " rows -> " << f.path.string() << "\n";
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"batch-row ETL dataflow engine with shared-cache pipelining"};
    app.require_subcommand(1);

    CommonArgs common;
    RunArgs run_args;
    double sample_fraction = 0.1;
    std::uint64_t seed = 1;
    std::string m_list = "1,2,4,8";
    int repeats = 3;
    std::uint64_t gen_rows = 100000;
    std::uint64_t gen_seed = 1;
    std::string gen_out = ".";
    double gen_miss = 0.01;

    auto add_common = [&](CLI::App* cmd, bool with_spec = true) {
        if (with_spec) cmd->add_option("spec", common.spec_path, "dataflow spec file")->required();
        cmd->add_flag("--json", common.json_output, "machine-readable output");
        cmd->add_option("--config", common.config_path, "JSON config file (flags override it)");
        cmd->add_option("--data-dir", common.data_dir,
                        "base directory for source/lookup files (default: spec directory)");
        cmd->add_option("--out", common.out_dir, "base directory for sink files");
    };
    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--mode", run_args.mode, "seq or pipe");
        cmd->add_option("--shared-cache", run_args.shared_cache, "on or off");
        cmd->add_option("--m", run_args.m, "splits per tree");
        cmd->add_option("--m-prime", run_args.m_prime, "max in-flight caches");
        cmd->add_option("--intra", run_args.intra, "comp=K intra-component workers");
        cmd->add_option("--batch-rows", run_args.batch_rows, "source scan batch size");
    };

    CLI::App* plan = app.add_subcommand("plan", "partition a dataflow into execution trees");
    add_common(plan);

    CLI::App* run = app.add_subcommand("run", "execute a dataflow");
    add_common(run);
    add_run_flags(run);

    CLI::App* cal = app.add_subcommand("calibrate", "estimate the optimal pipeline degree");
    add_common(cal);
    cal->add_option("--sample-fraction", sample_fraction, "row sample fraction (0, 1]");
    cal->add_option("--m-prime", run_args.m_prime, "sample splits for the calibration runs");
    cal->add_option("--seed", seed, "row sampling seed");

    CLI::App* bench = app.add_subcommand("bench", "sweep pipeline degrees and report speedups");
    add_common(bench);
    add_run_flags(bench);
    bench->add_option("--m-list", m_list, "comma-separated pipeline degrees");
    bench->add_option("--repeats", repeats, "repeats per point (median reported)");

    CLI::App* gen = app.add_subcommand("gen-ssb", "generate star-schema CSV data");
    gen->add_option("--rows", gen_rows, "fact table rows")->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--miss-fraction", gen_miss, "fraction of dangling foreign keys");
    gen->add_flag("--json", common.json_output, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return 0;
        }
        json jerr = {{"error", {{"type", "config"}, {"message", e.what()}}}};
        err << jerr.dump() << '\n';
        return 2;
    }

    try {
        if (plan->parsed()) return cmd_plan(common, out);
        if (run->parsed()) {
            DataflowSpec spec = load_spec(common);
            return cmd_run(common, resolve_run(spec, run, run_args, common), out);
        }
        if (cal->parsed()) {
            DataflowSpec spec = load_spec(common);
            return cmd_calibrate(common, resolve_run(spec, cal, run_args, common),
                                 sample_fraction, seed, out);
        }
        if (bench->parsed()) {
            DataflowSpec spec = load_spec(common);
            return cmd_bench(common, resolve_run(spec, bench, run_args, common), m_list, repeats,
                             out);
        }
        if (gen->parsed()) {
            return cmd_gen_ssb(gen_rows, gen_seed, gen_out, gen_miss, common.json_output, out);
        }
    } catch (const ConfigError& e) {
        json jerr = {{"error", {{"type", "config"}, {"message", e.what()}}}};
        err << jerr.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        json jerr = {{"error", {{"type", "runtime"}, {"message", e.what()}}}};
        err << jerr.dump() << '\n';
        return 3;
    }
    return 0;
}

} // namespace etlforge
