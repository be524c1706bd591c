// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/spec_io.hpp"

#include <fstream>
#include <set>

#include "etlforge/errors.hpp"

namespace etlforge {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
    throw ConfigError("spec error at " + (pointer.empty() ? "/" : pointer) + ": " + what);
}

const json& need(const json& obj, const std::string& pointer, const std::string& key) {
    if (!obj.is_object()) fail(pointer, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(pointer, "missing required field '" + key + "'");
    return *it;
}

void reject_unknown(const json& obj, const std::string& pointer,
                    std::initializer_list<const char*> known) {
    if (!obj.is_object()) fail(pointer, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) fail(pointer + "/" + key, "unknown field '" + key + "'");
    }
}

std::string get_string(const json& v, const std::string& pointer) {
    if (!v.is_string()) fail(pointer, "expected a string");
    return v.get<std::string>();
}

std::vector<std::string> get_string_list(const json& v, const std::string& pointer) {
    if (!v.is_array()) fail(pointer, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(get_string(v[i], pointer + "/" + std::to_string(i)));
    }
    return out;
}

Schema parse_schema(const json& v, const std::string& pointer) {
    if (!v.is_array()) fail(pointer, "expected an array of {name, kind} columns");
    std::vector<Column> cols;
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::string p = pointer + "/" + std::to_string(i);
        reject_unknown(v[i], p, {"name", "kind"});
        Column c;
        c.name = get_string(need(v[i], p, "name"), p + "/name");
        try {
            c.kind = kind_from_name(get_string(need(v[i], p, "kind"), p + "/kind"));
        } catch (const ConfigError& e) {
            fail(p + "/kind", e.what());
        }
        cols.push_back(std::move(c));
    }
    try {
        return Schema(std::move(cols));
    } catch (const ConfigError& e) {
        fail(pointer, e.what());
    }
}

ExprPtr parse_expr_field(const json& v, const std::string& pointer) {
    std::string text = get_string(v, pointer);
    try {
        return parse_expression(text);
    } catch (const ConfigError& e) {
        fail(pointer, e.what());
    }
}

Value parse_value(const json& v, const std::string& pointer) {
    if (v.is_null()) return Value{};
    if (v.is_boolean()) return Value(v.get<bool>());
    if (v.is_number_integer()) return Value(v.get<std::int64_t>());
    if (v.is_number_float()) return Value(v.get<double>());
    if (v.is_string()) return Value(v.get<std::string>());
    fail(pointer, "expected a scalar value");
}

OperatorDescriptor parse_operator(const std::string& name, const json& params,
                                  const std::string& pointer) {
    if (name == "csv_source") {
        reject_unknown(params, pointer, {"path", "schema"});
        CsvSourceOp op;
        op.path = get_string(need(params, pointer, "path"), pointer + "/path");
        op.schema = parse_schema(need(params, pointer, "schema"), pointer + "/schema");
        return op;
    }
    if (name == "filter") {
        reject_unknown(params, pointer, {"predicate"});
        FilterOp op;
        op.predicate = parse_expr_field(need(params, pointer, "predicate"),
                                        pointer + "/predicate");
        return op;
    }
    if (name == "projection") {
        reject_unknown(params, pointer, {"columns"});
        ProjectionOp op;
        op.columns = get_string_list(need(params, pointer, "columns"), pointer + "/columns");
        return op;
    }
    if (name == "expression") {
        reject_unknown(params, pointer, {"column", "expr"});
        ExpressionOp op;
        op.column = get_string(need(params, pointer, "column"), pointer + "/column");
        op.expr = parse_expr_field(need(params, pointer, "expr"), pointer + "/expr");
        return op;
    }
    if (name == "lookup") {
        reject_unknown(params, pointer, {"table", "probe", "match", "fetch", "default_key"});
        LookupOp op;
        op.table = get_string(need(params, pointer, "table"), pointer + "/table");
        op.probe_column = get_string(need(params, pointer, "probe"), pointer + "/probe");
        op.match_column = get_string(need(params, pointer, "match"), pointer + "/match");
        op.fetch_columns = get_string_list(need(params, pointer, "fetch"), pointer + "/fetch");
        if (params.contains("default_key")) {
            op.default_key = parse_value(params["default_key"], pointer + "/default_key");
        }
        return op;
    }
    if (name == "splitter") {
        reject_unknown(params, pointer, {"routes"});
        SplitterOp op;
        const json& routes = need(params, pointer, "routes");
        if (!routes.is_array() || routes.empty()) {
            fail(pointer + "/routes", "expected a non-empty array of predicates");
        }
        for (std::size_t i = 0; i < routes.size(); ++i) {
            op.routes.push_back(
                parse_expr_field(routes[i], pointer + "/routes/" + std::to_string(i)));
        }
        return op;
    }
    if (name == "delay") {
        reject_unknown(params, pointer, {"fixed_ms", "per_row_us"});
        DelayOp op;
        if (params.contains("fixed_ms")) {
            if (!params["fixed_ms"].is_number()) fail(pointer + "/fixed_ms", "expected a number");
            op.fixed_ms = params["fixed_ms"].get<double>();
        }
        if (params.contains("per_row_us")) {
            if (!params["per_row_us"].is_number())
                fail(pointer + "/per_row_us", "expected a number");
            op.per_row_us = params["per_row_us"].get<double>();
        }
        return op;
    }
    if (name == "sort") {
        reject_unknown(params, pointer, {"keys", "ascending"});
        SortOp op;
        op.keys = get_string_list(need(params, pointer, "keys"), pointer + "/keys");
        if (params.contains("ascending")) {
            const json& asc = params["ascending"];
            if (!asc.is_array()) fail(pointer + "/ascending", "expected an array of booleans");
            for (std::size_t i = 0; i < asc.size(); ++i) {
                if (!asc[i].is_boolean()) {
                    fail(pointer + "/ascending/" + std::to_string(i), "expected a boolean");
                }
                op.ascending.push_back(asc[i].get<bool>());
            }
        }
        return op;
    }
    if (name == "aggregate") {
        reject_unknown(params, pointer, {"group_by", "fn", "target"});
        AggregateOp op;
        op.group_by = get_string_list(need(params, pointer, "group_by"), pointer + "/group_by");
        try {
            op.fn = aggregate_fn_from_name(
                get_string(need(params, pointer, "fn"), pointer + "/fn"));
        } catch (const ConfigError& e) {
            fail(pointer + "/fn", e.what());
        }
        op.target = get_string(need(params, pointer, "target"), pointer + "/target");
        return op;
    }
    if (name == "union_all") {
        reject_unknown(params, pointer, {});
        return UnionAllOp{};
    }
    if (name == "merge_sorted") {
        reject_unknown(params, pointer, {"keys"});
        MergeSortedOp op;
        op.keys = get_string_list(need(params, pointer, "keys"), pointer + "/keys");
        return op;
    }
    if (name == "text_sink") {
        reject_unknown(params, pointer, {"path", "delimiter"});
        TextSinkOp op;
        op.path = get_string(need(params, pointer, "path"), pointer + "/path");
        if (params.contains("delimiter")) {
            std::string d = get_string(params["delimiter"], pointer + "/delimiter");
            if (d.size() != 1) fail(pointer + "/delimiter", "expected a single character");
            op.delimiter = d[0];
        }
        return op;
    }
    fail(pointer, "unknown operator '" + name + "'");
}

json schema_to_json(const Schema& schema) {
    json out = json::array();
    for (const auto& c : schema.columns()) {
        out.push_back({{"name", c.name}, {"kind", std::string(kind_name(c.kind))}});
    }
    return out;
}

json value_to_json(const Value& v) {
    switch (v.index()) {
    case 0: return nullptr;
    case 1: return std::get<std::int64_t>(v);
    case 2: return std::get<double>(v);
    case 3: return std::get<std::string>(v);
    default: return std::get<bool>(v);
    }
}

json operator_params_to_json(const OperatorDescriptor& op) {
    json p = json::object();
    if (const auto* src = std::get_if<CsvSourceOp>(&op)) {
        p["path"] = src->path;
        p["schema"] = schema_to_json(src->schema);
    } else if (const auto* f = std::get_if<FilterOp>(&op)) {
        p["predicate"] = to_string(*f->predicate);
    } else if (const auto* pr = std::get_if<ProjectionOp>(&op)) {
        p["columns"] = pr->columns;
    } else if (const auto* e = std::get_if<ExpressionOp>(&op)) {
        p["column"] = e->column;
        p["expr"] = to_string(*e->expr);
    } else if (const auto* l = std::get_if<LookupOp>(&op)) {
        p["table"] = l->table;
        p["probe"] = l->probe_column;
        p["match"] = l->match_column;
        p["fetch"] = l->fetch_columns;
        p["default_key"] = value_to_json(l->default_key);
    } else if (const auto* s = std::get_if<SplitterOp>(&op)) {
        json routes = json::array();
        for (const auto& r : s->routes) routes.push_back(to_string(*r));
        p["routes"] = routes;
    } else if (const auto* d = std::get_if<DelayOp>(&op)) {
        p["fixed_ms"] = d->fixed_ms;
        p["per_row_us"] = d->per_row_us;
    } else if (const auto* so = std::get_if<SortOp>(&op)) {
        p["keys"] = so->keys;
        if (!so->ascending.empty()) p["ascending"] = so->ascending;
    } else if (const auto* a = std::get_if<AggregateOp>(&op)) {
        p["group_by"] = a->group_by;
        p["fn"] = std::string(aggregate_fn_name(a->fn));
        p["target"] = a->target;
    } else if (const auto* m = std::get_if<MergeSortedOp>(&op)) {
        p["keys"] = m->keys;
    } else if (const auto* t = std::get_if<TextSinkOp>(&op)) {
        p["path"] = t->path;
        if (t->delimiter != ',') p["delimiter"] = std::string(1, t->delimiter);
    }
    return p;
}

const std::set<std::string> kConfigKeys = {"m",          "m_prime",      "batch_rows",
                                           "shared_cache", "intra",      "out_dir"};

} // namespace

DataflowSpec parse_dataflow_spec_json(const json& doc) {
    DataflowSpec spec;
    reject_unknown(doc, "", {"name", "components", "edges", "lookup_tables", "config"});
    spec.name = get_string(need(doc, "", "name"), "/name");

    const json& comps = need(doc, "", "components");
    if (!comps.is_array()) fail("/components", "expected an array");
    for (std::size_t i = 0; i < comps.size(); ++i) {
        std::string p = "/components/" + std::to_string(i);
        reject_unknown(comps[i], p, {"id", "operator", "params", "kind"});
        std::string id = get_string(need(comps[i], p, "id"), p + "/id");
        std::string op_name = get_string(need(comps[i], p, "operator"), p + "/operator");
        json params = comps[i].contains("params") ? comps[i]["params"] : json::object();
        OperatorDescriptor op = parse_operator(op_name, params, p + "/params");
        ComponentSpec c = make_component(id, std::move(op));
        if (comps[i].contains("kind")) {
            try {
                c.kind = component_kind_from_name(
                    get_string(comps[i]["kind"], p + "/kind"));
            } catch (const ConfigError& e) {
                fail(p + "/kind", e.what());
            }
        }
        try {
            spec.graph.add_component(std::move(c));
        } catch (const ConfigError& e) {
            fail(p + "/id", e.what());
        }
    }

    const json& edges = need(doc, "", "edges");
    if (!edges.is_array()) fail("/edges", "expected an array of [from, to] pairs");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        std::string p = "/edges/" + std::to_string(i);
        if (!edges[i].is_array() || edges[i].size() != 2) {
            fail(p, "expected a [from, to] pair");
        }
        spec.graph.add_edge(get_string(edges[i][0], p + "/0"), get_string(edges[i][1], p + "/1"));
    }

    if (doc.contains("lookup_tables")) {
        const json& tables = doc["lookup_tables"];
        if (!tables.is_array()) fail("/lookup_tables", "expected an array");
        for (std::size_t i = 0; i < tables.size(); ++i) {
            std::string p = "/lookup_tables/" + std::to_string(i);
            reject_unknown(tables[i], p, {"name", "path", "key", "schema", "filter"});
            LookupTableDef def;
            def.name = get_string(need(tables[i], p, "name"), p + "/name");
            def.path = get_string(need(tables[i], p, "path"), p + "/path");
            def.key = get_string(need(tables[i], p, "key"), p + "/key");
            def.schema = parse_schema(need(tables[i], p, "schema"), p + "/schema");
            if (tables[i].contains("filter")) {
                def.load_filter = parse_expr_field(tables[i]["filter"], p + "/filter");
            }
            if (!def.schema.has(def.key)) {
                fail(p + "/key", "key column '" + def.key + "' is not in the table schema");
            }
            if (spec.tables.count(def.name)) {
                fail(p + "/name", "duplicate lookup table '" + def.name + "'");
            }
            spec.tables.emplace(def.name, std::move(def));
        }
    }

    if (doc.contains("config")) {
        const json& cfg = doc["config"];
        if (!cfg.is_object()) fail("/config", "expected an object");
        for (const auto& [key, value] : cfg.items()) {
            if (!kConfigKeys.count(key)) fail("/config/" + key, "unknown field '" + key + "'");
        }
        spec.config_defaults = cfg;
    }
    return spec;
}

DataflowSpec parse_dataflow_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("spec file " + path.string() + ": " + e.what());
    }
    return parse_dataflow_spec_json(doc);
}

json serialize_dataflow_spec(const DataflowSpec& spec) {
    json doc;
    doc["name"] = spec.name;
    json comps = json::array();
    for (const auto* c : spec.graph.components()) { // ascending id
        json jc;
        jc["id"] = c->id;
        jc["operator"] = std::string(operator_name(c->op));
        jc["params"] = operator_params_to_json(c->op);
        jc["kind"] = std::string(component_kind_name(c->kind));
        comps.push_back(std::move(jc));
    }
    doc["components"] = std::move(comps);
    json edges = json::array();
    for (const auto& [from, to] : spec.graph.edges()) {
        edges.push_back(json::array({from, to}));
    }
    doc["edges"] = std::move(edges);
    json tables = json::array();
    for (const auto& [name, def] : spec.tables) {
        json jt;
        jt["name"] = def.name;
        jt["path"] = def.path;
        jt["key"] = def.key;
        jt["schema"] = schema_to_json(def.schema);
        if (def.load_filter) jt["filter"] = to_string(*def.load_filter);
        tables.push_back(std::move(jt));
    }
    doc["lookup_tables"] = std::move(tables);
    doc["config"] = spec.config_defaults;
    return doc;
}

} // namespace etlforge
