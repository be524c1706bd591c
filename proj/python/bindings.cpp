// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "etlforge/cost_model.hpp"
#include "etlforge/errors.hpp"
#include "etlforge/executor.hpp"
#include "etlforge/report.hpp"
#include "etlforge/spec_io.hpp"
#include "etlforge/ssb_gen.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object json_to_py(const json& j) {
    switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
        py::list out;
        for (const auto& item : j) out.append(json_to_py(item));
        return out;
    }
    case json::value_t::object: {
        py::dict out;
        for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
        return out;
    }
    default: return py::none();
    }
}

etlforge::CostProfile profile_from_dict(const py::dict& d) {
    etlforge::CostProfile p;
    p.n = d["n"].cast<int>();
    p.t0 = d["t0"].cast<double>();
    if (d.contains("T0")) p.T0 = d["T0"].cast<double>();
    if (d.contains("Ts")) p.Ts = d["Ts"].cast<double>();
    p.c = d["c"].cast<double>();
    p.lambda = d.contains("lambda") ? d["lambda"].cast<double>() : 0.0;
    p.N = d.contains("N") ? d["N"].cast<double>() : 0.0;
    p.sigma_size = d.contains("sigma_size") ? d["sigma_size"].cast<std::uint64_t>()
                                            : std::numeric_limits<std::uint32_t>::max();
    if (d.contains("staggering_index")) p.staggering_index = d["staggering_index"].cast<int>();
    if (d.contains("activity_times")) {
        p.activity_times = d["activity_times"].cast<std::vector<double>>();
    }
    return p;
}

etlforge::RunMode mode_from_string(const std::string& mode) {
    if (mode == "seq" || mode == "sequential") return etlforge::RunMode::Sequential;
    if (mode == "pipe" || mode == "pipelined") return etlforge::RunMode::Pipelined;
    throw etlforge::ConfigError("mode must be 'seq' or 'pipe', got '" + mode + "'");
}

/// A parsed dataflow spec plus the directories its paths resolve against.
class Dataflow {
public:
    explicit Dataflow(const std::string& spec_path)
        : spec_(etlforge::parse_dataflow_spec(spec_path)),
          spec_dir_(std::filesystem::path(spec_path).parent_path()) {}

    py::list validate() const {
        auto report = etlforge::validate_graph(spec_.graph, spec_.tables);
        py::list out;
        for (const auto& v : report.violations) {
            py::dict d;
            d["code"] = std::string(etlforge::violation_code_name(v.code));
            d["message"] = v.message;
            d["components"] = v.components;
            out.append(d);
        }
        return out;
    }

    py::object plan() const {
        auto tg = etlforge::partition(spec_.graph);
        return json_to_py(etlforge::plan_to_json(tg, spec_.graph));
    }

    py::object run(const std::string& mode, int m, int m_prime, bool shared_cache,
                   const std::map<std::string, int>& intra, const std::string& data_dir,
                   const std::string& out_dir, bool null_sinks) {
        etlforge::DataflowEngine engine(spec_.graph, spec_.tables, resolve_dir(data_dir),
                                        out_dir);
        etlforge::PipelineConfig cfg;
        cfg.m = m;
        cfg.m_prime = m_prime;
        cfg.shared_caching = shared_cache;
        cfg.intra_workers = intra;
        cfg.null_sinks = null_sinks;
        etlforge::RunMode run_mode = mode_from_string(mode);
        etlforge::RunResult result = engine.run_dataflow(run_mode, cfg);
        json doc = etlforge::stats_to_json(result.stats, run_mode, cfg);
        json files = json::array();
        for (const auto& f : result.sink_files) files.push_back(f.string());
        doc["sink_files"] = std::move(files);
        return json_to_py(doc);
    }

    py::object calibrate(double sample_fraction, int m_prime, std::uint64_t seed,
                         const std::string& data_dir) {
        etlforge::DataflowEngine engine(spec_.graph, spec_.tables, resolve_dir(data_dir), ".");
        etlforge::CalibrationOptions opts;
        opts.sample_fraction = sample_fraction;
        opts.m_prime = m_prime;
        opts.seed = seed;
        return json_to_py(etlforge::calibration_to_json(etlforge::calibrate(engine, opts)));
    }

    py::object to_json() const {
        return json_to_py(etlforge::serialize_dataflow_spec(spec_));
    }

    std::string name() const { return spec_.name; }

private:
    std::filesystem::path resolve_dir(const std::string& dir) const {
        if (!dir.empty()) return dir;
        return spec_dir_.empty() ? std::filesystem::path(".") : spec_dir_;
    }

    etlforge::DataflowSpec spec_;
    std::filesystem::path spec_dir_;
};

} // namespace

PYBIND11_MODULE(_etlforge, m) {
    m.doc() = "ETL dataflow engine: execution-tree partitioning, shared-cache pipelining, "
              "and cost-model parallelism tuning";

    py::register_exception<etlforge::ConfigError>(m, "ConfigError");
    py::register_exception<etlforge::ExecError>(m, "ExecError");

    py::class_<Dataflow>(m, "Dataflow")
        .def(py::init<const std::string&>(), py::arg("spec_path"))
        .def("validate", &Dataflow::validate,
             "List of invariant violations; empty means the dataflow is valid.")
        .def("plan", &Dataflow::plan, "Execution-tree partition of the dataflow.")
        .def("run", &Dataflow::run, py::arg("mode") = "seq", py::arg("m") = 1,
             py::arg("m_prime") = 1, py::arg("shared_cache") = true,
             py::arg("intra") = std::map<std::string, int>{}, py::arg("data_dir") = "",
             py::arg("out_dir") = ".", py::arg("null_sinks") = false,
             "Execute the dataflow and return the run report.")
        .def("calibrate", &Dataflow::calibrate, py::arg("sample_fraction") = 0.1,
             py::arg("m_prime") = 4, py::arg("seed") = 1, py::arg("data_dir") = "",
             "Estimate per-tree cost profiles and recommended pipeline degrees.")
        .def("to_json", &Dataflow::to_json, "Canonical JSON form of the spec.")
        .def_property_readonly("name", &Dataflow::name);

    m.def(
        "predict_pipeline_time",
        [](const py::dict& profile, int m) {
            return etlforge::predict_pipeline_time(profile_from_dict(profile), m);
        },
        py::arg("profile"), py::arg("m"),
        "Predicted pipelined wall time (seconds) at degree m for a profile dict with keys "
        "n, t0, c, lambda, N, sigma_size.");

    m.def(
        "optimal_degree",
        [](const py::dict& profile) {
            return etlforge::optimal_degree(profile_from_dict(profile));
        },
        py::arg("profile"), "Integer pipeline degree minimizing the predicted time.");

    m.def(
        "find_staggering_activity",
        [](const std::vector<double>& times) {
            return etlforge::find_staggering_activity(times);
        },
        py::arg("times"), "0-based index of the maximal time (ties to the smallest index).");

    m.def(
        "split_sizes",
        [](std::uint64_t rows, int m) {
            std::vector<etlforge::Row> fake(rows);
            auto caches = etlforge::split_root_output(std::move(fake), etlforge::Schema{}, m);
            std::vector<std::uint64_t> sizes;
            for (const auto& c : caches) sizes.push_back(c->rows.size());
            return sizes;
        },
        py::arg("rows"), py::arg("m"), "Even-split sizes used for horizontal partitioning.");

    m.def(
        "generate_ssb",
        [](std::uint64_t rows, std::uint64_t seed, const std::string& out_dir,
           double miss_fraction) {
            etlforge::SsbGenConfig cfg;
            cfg.scale_rows = rows;
            cfg.seed = seed;
            cfg.out_dir = out_dir;
            cfg.miss_fraction = miss_fraction;
            auto files = etlforge::generate_ssb_data(cfg);
            return json_to_py(etlforge::ssb_manifest_json(cfg, files));
        },
        py::arg("rows"), py::arg("seed") = 1, py::arg("out_dir") = ".",
        py::arg("miss_fraction") = 0.01, "Generate star-schema CSVs; returns the manifest.");

#ifdef ETLFORGE_VERSION
    m.attr("__version__") = ETLFORGE_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
