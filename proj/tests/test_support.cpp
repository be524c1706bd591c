// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "test_support.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numeric>
#include <set>

#include "etlforge/expression.hpp"

namespace etlforge::test {

namespace {

int key_compare(const Row& a, const Row& b, const std::vector<std::size_t>& idx) {
    for (std::size_t i : idx) {
        int c = compare_values(a[i], b[i]);
        if (c) return c;
    }
    return 0;
}

} // namespace

std::vector<Row> oracle_aggregate(const std::vector<Row>& rows, const Schema& schema,
                                  const std::vector<std::string>& group_by, AggregateFn fn,
                                  const std::string& target) {
    std::vector<std::size_t> gidx;
    for (const auto& g : group_by) gidx.push_back(schema.require(g));
    std::size_t tidx = schema.require(target);
    ValueKind tkind = schema.at(tidx).kind;

    // collect all target values per group, then reduce in a second pass
    std::map<Row, std::vector<Value>, bool (*)(const Row&, const Row&)> groups(
        +[](const Row& a, const Row& b) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                int c = compare_values(a[i], b[i]);
                if (c) return c < 0;
            }
            return false;
        });
    for (const Row& row : rows) {
        Row key;
        for (std::size_t gi : gidx) key.push_back(row[gi]);
        groups[key].push_back(row[tidx]);
    }

    std::vector<Row> out;
    for (const auto& [key, values] : groups) {
        Row row = key;
        std::vector<Value> present;
        for (const auto& v : values) {
            if (!is_null(v)) present.push_back(v);
        }
        switch (fn) {
        case AggregateFn::Count:
            row.push_back(Value(static_cast<std::int64_t>(values.size())));
            break;
        case AggregateFn::Sum:
            if (tkind == ValueKind::Integer) {
                std::int64_t s = 0;
                for (const auto& v : present) s += std::get<std::int64_t>(v);
                row.push_back(Value(s));
            } else {
                double s = 0;
                for (const auto& v : present) s += std::get<double>(v);
                row.push_back(Value(s));
            }
            break;
        case AggregateFn::Avg: {
            if (present.empty()) {
                row.push_back(Value{});
                break;
            }
            double s = 0;
            for (const auto& v : present) {
                s += tkind == ValueKind::Integer
                         ? static_cast<double>(std::get<std::int64_t>(v))
                         : std::get<double>(v);
            }
            row.push_back(Value(s / static_cast<double>(present.size())));
            break;
        }
        case AggregateFn::Min:
        case AggregateFn::Max: {
            if (present.empty()) {
                row.push_back(Value{});
                break;
            }
            Value best = present[0];
            for (const auto& v : present) {
                int c = compare_values(v, best);
                if (fn == AggregateFn::Min ? c < 0 : c > 0) best = v;
            }
            row.push_back(best);
            break;
        }
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<Row> oracle_stable_sort(const std::vector<Row>& rows, const Schema& schema,
                                    const std::vector<std::string>& keys,
                                    const std::vector<bool>& ascending) {
    std::vector<std::size_t> idx;
    for (const auto& k : keys) idx.push_back(schema.require(k));
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    // plain sort over (key, original position) is stable by construction
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const Value& x = rows[a][idx[k]];
            const Value& y = rows[b][idx[k]];
            bool xn = is_null(x), yn = is_null(y);
            if (xn != yn) return xn;
            int c = compare_values(x, y);
            if (c) return (ascending.empty() || ascending[k]) ? c < 0 : c > 0;
        }
        return a < b;
    });
    std::vector<Row> out;
    out.reserve(rows.size());
    for (std::size_t i : order) out.push_back(rows[i]);
    return out;
}

std::vector<Row> oracle_merge(const std::vector<std::vector<Row>>& inputs, const Schema& schema,
                              const std::vector<std::string>& keys) {
    std::vector<std::size_t> idx;
    for (const auto& k : keys) idx.push_back(schema.require(k));
    // decorate rows with (input index, position) so a plain sort is the
    // stable merge
    std::vector<std::tuple<std::size_t, std::size_t, const Row*>> all;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (std::size_t r = 0; r < inputs[i].size(); ++r) {
            all.emplace_back(i, r, &inputs[i][r]);
        }
    }
    std::sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
        int c = key_compare(*std::get<2>(a), *std::get<2>(b), idx);
        if (c) return c < 0;
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        return std::get<1>(a) < std::get<1>(b);
    });
    std::vector<Row> out;
    out.reserve(all.size());
    for (const auto& [i, r, row] : all) out.push_back(*row);
    return out;
}

// ---- random dataflow generator ---------------------------------------------------

namespace {

struct OpenEnd {
    std::string id; // producer component
    Schema schema;
};

std::string pad_id(int n, const char* prefix) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%s%03d", prefix, n);
    return buf;
}

std::vector<std::string> int_columns(const Schema& s) {
    std::vector<std::string> out;
    for (const auto& c : s.columns()) {
        if (c.kind == ValueKind::Integer) out.push_back(c.name);
    }
    return out;
}

} // namespace

RandomFlow make_random_flow(std::mt19937_64& rng, const std::filesystem::path& dir,
                            int max_components) {
    auto pick = [&](std::size_t n) { return rng() % n; };
    RandomFlow flow;
    int next_id = 0;
    int lut_count = 0;

    // source data: k, v (with occasional nulls), t (quoting-hostile text)
    Schema src_schema = make_schema({{"k", ValueKind::Integer},
                                     {"v", ValueKind::Integer},
                                     {"t", ValueKind::Text}});
    static const std::vector<std::string> texts = {"A", "B,b", "C\"q", "AMERICA", ""};
    std::size_t n_rows = pick(1000);
    std::vector<Row> rows;
    for (std::size_t i = 0; i < n_rows; ++i) {
        Row r;
        r.push_back(I(static_cast<std::int64_t>(pick(100))));
        r.push_back(pick(20) == 0 ? N() : I(static_cast<std::int64_t>(pick(100)) - 50));
        r.push_back(T(texts[pick(texts.size())].c_str()));
        rows.push_back(std::move(r));
    }
    write_csv_rows(dir / "src.csv", rows);
    flow.source_rows = n_rows;

    std::string src_id = pad_id(next_id++, "c") + "_src";
    flow.graph.add_component(make_component(src_id, CsvSourceOp{"src.csv", src_schema}));
    std::vector<OpenEnd> open{{src_id, src_schema}};

    auto add = [&](const std::string& from, OperatorDescriptor op, const char* tag) {
        std::string id = pad_id(next_id++, "c") + "_" + tag;
        flow.graph.add_component(make_component(id, std::move(op)));
        flow.graph.add_edge(from, id);
        return id;
    };

    int budget = max_components - 1; // source consumed one
    while (budget > 2 && !open.empty()) {
        std::size_t which = pick(open.size());
        OpenEnd end = open[which];
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(which));
        auto ints = int_columns(end.schema);

        switch (pick(8)) {
        case 0: { // filter on an integer column
            const std::string& col = ints[pick(ints.size())];
            auto pred = make_binary(ExprOp::Lt, make_column(col),
                                    make_literal(I(static_cast<std::int64_t>(pick(120)) - 10)));
            std::string id = add(end.id, FilterOp{pred}, "filter");
            open.push_back({id, end.schema});
            budget -= 1;
            break;
        }
        case 1: { // append a computed column
            const std::string& col = ints[pick(ints.size())];
            std::string name = "e" + std::to_string(next_id);
            auto expr = make_binary(pick(2) ? ExprOp::Add : ExprOp::Mul, make_column(col),
                                    make_literal(I(static_cast<std::int64_t>(pick(5)) + 1)));
            std::string id = add(end.id, ExpressionOp{name, expr}, "expr");
            std::vector<Column> cols = end.schema.columns();
            cols.push_back({name, ValueKind::Integer});
            open.push_back({id, Schema(cols)});
            budget -= 1;
            break;
        }
        case 2: { // projection: keep a shuffled subset, always with an int
            std::vector<std::string> keep = ints;
            for (const auto& c : end.schema.columns()) {
                if (c.kind != ValueKind::Integer && pick(2)) keep.push_back(c.name);
            }
            for (std::size_t i = keep.size(); i > 1; --i) std::swap(keep[i - 1], keep[pick(i)]);
            if (keep.size() > 2 && pick(2)) keep.resize(keep.size() - 1);
            ProjectionOp op{keep};
            std::string id = add(end.id, op, "proj");
            std::vector<Column> cols;
            for (const auto& name : keep) cols.push_back(end.schema.at(end.schema.require(name)));
            open.push_back({id, Schema(cols)});
            budget -= 1;
            break;
        }
        case 3: { // lookup against a fresh small table (some keys miss)
            std::string lut = "lut" + std::to_string(lut_count++);
            std::string key_col = lut + "_key";
            std::string val_col = lut + "_val";
            Schema lschema = Schema({{key_col, ValueKind::Integer},
                                     {val_col, ValueKind::Integer}});
            std::vector<Row> lrows;
            for (std::int64_t key = 0; key < 100; ++key) {
                if (pick(5) == 0) continue; // leave gaps so probes can miss
                lrows.push_back({I(key), I(static_cast<std::int64_t>(pick(1000)))});
            }
            write_csv_rows(dir / (lut + ".csv"), lrows);
            flow.tables[lut] = LookupTableDef{lut, lut + ".csv", key_col, lschema, nullptr};
            LookupOp op{lut, ints[pick(ints.size())], key_col, {key_col, val_col},
                        I(-1)};
            std::string id = add(end.id, op, "lookup");
            std::vector<Column> cols = end.schema.columns();
            cols.push_back({key_col, ValueKind::Integer});
            cols.push_back({val_col, ValueKind::Integer});
            open.push_back({id, Schema(cols)});
            budget -= 1;
            break;
        }
        case 4: { // splitter with two branches
            if (budget < 4) {
                open.push_back(end);
                budget = 0;
                break;
            }
            const std::string& col = ints[pick(ints.size())];
            SplitterOp op;
            op.routes.push_back(make_binary(ExprOp::Lt, make_column(col),
                                            make_literal(I(static_cast<std::int64_t>(pick(100))))));
            op.routes.push_back(make_literal(B(true)));
            std::string id = pad_id(next_id++, "c") + "_split";
            flow.graph.add_component(make_component(id, std::move(op)));
            flow.graph.add_edge(end.id, id);
            budget -= 1;
            // both branches continue; ascending child ids follow creation order
            std::string b0 = add(id, FilterOp{make_literal(B(true))}, "b0");
            std::string b1 = add(id, FilterOp{make_literal(B(true))}, "b1");
            budget -= 2;
            open.push_back({b0, end.schema});
            open.push_back({b1, end.schema});
            break;
        }
        case 5: { // aggregate (block boundary)
            const std::string& target = ints[pick(ints.size())];
            std::vector<std::string> group;
            for (const auto& c : end.schema.columns()) {
                if (c.name != target && pick(2)) group.push_back(c.name);
            }
            if (group.empty()) {
                for (const auto& c : end.schema.columns()) {
                    if (c.name != target) {
                        group.push_back(c.name);
                        break;
                    }
                }
            }
            if (group.empty()) { // single-column schema; group on itself via count
                open.push_back(end);
                budget -= 1;
                break;
            }
            AggregateFn fn = std::array{AggregateFn::Sum, AggregateFn::Count, AggregateFn::Min,
                                        AggregateFn::Max}[pick(4)];
            AggregateOp op{group, fn, target};
            std::string id = add(end.id, op, "agg");
            std::vector<Column> cols;
            for (const auto& g : group) cols.push_back(end.schema.at(end.schema.require(g)));
            ValueKind tk = end.schema.at(end.schema.require(target)).kind;
            cols.push_back({target, fn == AggregateFn::Count ? ValueKind::Integer : tk});
            open.push_back({id, Schema(cols)});
            budget -= 1;
            break;
        }
        case 6: { // sort (block boundary)
            std::vector<std::string> keys{ints[pick(ints.size())]};
            std::vector<bool> asc{pick(2) == 0};
            std::string id = add(end.id, SortOp{keys, asc}, "sort");
            open.push_back({id, end.schema});
            budget -= 1;
            break;
        }
        default: { // union with another open end of the same schema, if any
            bool joined = false;
            for (std::size_t i = 0; i < open.size(); ++i) {
                if (open[i].schema == end.schema) {
                    std::string id = pad_id(next_id++, "c") + "_union";
                    flow.graph.add_component(make_component(id, UnionAllOp{}));
                    flow.graph.add_edge(end.id, id);
                    flow.graph.add_edge(open[i].id, id);
                    open.erase(open.begin() + static_cast<std::ptrdiff_t>(i));
                    open.push_back({id, end.schema});
                    budget -= 1;
                    joined = true;
                    break;
                }
            }
            if (!joined) {
                open.push_back(end); // nothing to union with; try another op
                budget -= 1;
            }
            break;
        }
        }
    }

    // close every remaining end with a sink
    int sink_no = 0;
    for (const auto& end : open) {
        std::string path = "out" + std::to_string(sink_no++) + ".csv";
        add(end.id, TextSinkOp{path, ','}, "sink");
        flow.sink_paths.push_back(path);
    }
    return flow;
}

PipelineConfig random_config(std::mt19937_64& rng, const RandomFlow& flow) {
    auto pick = [&](std::size_t n) { return rng() % n; };
    PipelineConfig cfg;
    cfg.m = 1 + static_cast<int>(pick(12));
    cfg.m_prime = 1 + static_cast<int>(pick(static_cast<std::size_t>(cfg.m)));
    cfg.batch_rows = std::array<std::size_t, 4>{1, 7, 128, 1024}[pick(4)];
    for (const auto* c : flow.graph.components()) {
        if (classify_component(*c) == ComponentKind::RowSynchronized && pick(3) == 0) {
            cfg.intra_workers[c->id] = 1 + static_cast<int>(pick(4));
        }
    }
    return cfg;
}

} // namespace etlforge::test
