// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/operators.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "etlforge/csv.hpp"
#include "etlforge/errors.hpp"

namespace etlforge {

std::string_view component_kind_name(ComponentKind k) {
    switch (k) {
    case ComponentKind::Source: return "source";
    case ComponentKind::RowSynchronized: return "row-synchronized";
    case ComponentKind::Block: return "block";
    case ComponentKind::SemiBlock: return "semi-block";
    case ComponentKind::Sink: return "sink";
    }
    return "?";
}

ComponentKind component_kind_from_name(std::string_view name) {
    if (name == "source") return ComponentKind::Source;
    if (name == "row-synchronized") return ComponentKind::RowSynchronized;
    if (name == "block") return ComponentKind::Block;
    if (name == "semi-block") return ComponentKind::SemiBlock;
    if (name == "sink") return ComponentKind::Sink;
    throw ConfigError("unknown component kind: '" + std::string(name) + "'");
}

std::string_view aggregate_fn_name(AggregateFn fn) {
    switch (fn) {
    case AggregateFn::Sum: return "sum";
    case AggregateFn::Avg: return "avg";
    case AggregateFn::Min: return "min";
    case AggregateFn::Max: return "max";
    case AggregateFn::Count: return "count";
    }
    return "?";
}

AggregateFn aggregate_fn_from_name(std::string_view name) {
    if (name == "sum") return AggregateFn::Sum;
    if (name == "avg") return AggregateFn::Avg;
    if (name == "min") return AggregateFn::Min;
    if (name == "max") return AggregateFn::Max;
    if (name == "count") return AggregateFn::Count;
    throw ConfigError("unknown aggregate function: '" + std::string(name) + "'");
}

ComponentKind operator_kind(const OperatorDescriptor& op) {
    return std::visit(
        [](const auto& o) -> ComponentKind {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, CsvSourceOp>) return ComponentKind::Source;
            else if constexpr (std::is_same_v<T, TextSinkOp>) return ComponentKind::Sink;
            else if constexpr (std::is_same_v<T, SortOp> || std::is_same_v<T, AggregateOp>)
                return ComponentKind::Block;
            else if constexpr (std::is_same_v<T, UnionAllOp> || std::is_same_v<T, MergeSortedOp>)
                return ComponentKind::SemiBlock;
            else return ComponentKind::RowSynchronized;
        },
        op);
}

std::string_view operator_name(const OperatorDescriptor& op) {
    return std::visit(
        [](const auto& o) -> std::string_view {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, CsvSourceOp>) return "csv_source";
            else if constexpr (std::is_same_v<T, FilterOp>) return "filter";
            else if constexpr (std::is_same_v<T, ProjectionOp>) return "projection";
            else if constexpr (std::is_same_v<T, ExpressionOp>) return "expression";
            else if constexpr (std::is_same_v<T, LookupOp>) return "lookup";
            else if constexpr (std::is_same_v<T, SplitterOp>) return "splitter";
            else if constexpr (std::is_same_v<T, DelayOp>) return "delay";
            else if constexpr (std::is_same_v<T, SortOp>) return "sort";
            else if constexpr (std::is_same_v<T, AggregateOp>) return "aggregate";
            else if constexpr (std::is_same_v<T, UnionAllOp>) return "union_all";
            else if constexpr (std::is_same_v<T, MergeSortedOp>) return "merge_sorted";
            else return "text_sink";
        },
        op);
}

// ---- lookup tables ----------------------------------------------------------

LookupTable LookupTable::load(const LookupTableDef& def, const std::filesystem::path& base_dir) {
    LookupTable t;
    t.schema_ = def.schema;
    t.key_column_ = def.key;
    std::size_t key_idx = def.schema.require(def.key);
    std::filesystem::path path = def.path;
    if (path.is_relative()) path = base_dir / path;
    std::vector<Row> rows = read_csv(path, def.schema);
    t.rows_.reserve(rows.size());
    for (auto& row : rows) {
        if (def.load_filter && !eval_predicate(*def.load_filter, def.schema, row)) continue;
        Value key = row[key_idx];
        if (is_null(key)) {
            throw ExecError("lookup table '" + def.name + "': null key in column '" + def.key +
                            "'");
        }
        auto [it, inserted] = t.index_.emplace(std::move(key), t.rows_.size());
        if (!inserted) {
            throw ExecError("lookup table '" + def.name + "': duplicate key " +
                            value_to_string(row[key_idx]));
        }
        t.rows_.push_back(std::move(row));
    }
    return t;
}

const Row* LookupTable::find(const Value& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &rows_[it->second];
}

void LookupTableSet::add(std::string name, LookupTable table) {
    tables_.insert_or_assign(std::move(name), std::move(table));
}

const LookupTable& LookupTableSet::require(const std::string& name) const {
    auto it = tables_.find(name);
    if (it == tables_.end()) throw ExecError("lookup table not loaded: '" + name + "'");
    return it->second;
}

// ---- schema derivation -------------------------------------------------------

namespace {

const Schema& single_input(std::span<const Schema> inputs, std::string_view what) {
    if (inputs.size() != 1) {
        throw ConfigError(std::string(what) + " takes exactly one input, got " +
                          std::to_string(inputs.size()));
    }
    return inputs[0];
}

Schema common_input(std::span<const Schema> inputs, std::string_view what) {
    if (inputs.empty()) throw ConfigError(std::string(what) + " requires at least one input");
    for (std::size_t i = 1; i < inputs.size(); ++i) {
        if (!(inputs[i] == inputs[0])) {
            throw ConfigError(std::string(what) + ": input schemas disagree (input " +
                              std::to_string(i + 1) + ")");
        }
    }
    return inputs[0];
}

ValueKind aggregate_output_kind(const AggregateOp& op, ValueKind target_kind) {
    switch (op.fn) {
    case AggregateFn::Count: return ValueKind::Integer;
    case AggregateFn::Avg: return ValueKind::Decimal;
    case AggregateFn::Sum:
        if (target_kind != ValueKind::Integer && target_kind != ValueKind::Decimal) {
            throw ConfigError("sum requires a numeric target column");
        }
        return target_kind;
    default: return target_kind; // min / max
    }
}

} // namespace

Schema resolve_output_schema(const OperatorDescriptor& op, std::span<const Schema> inputs,
                             const std::map<std::string, LookupTableDef>& tables) {
    return std::visit(
        [&](const auto& o) -> Schema {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, CsvSourceOp>) {
                if (!inputs.empty()) throw ConfigError("csv_source takes no input");
                return o.schema;
            } else if constexpr (std::is_same_v<T, FilterOp>) {
                const Schema& in = single_input(inputs, "filter");
                if (type_check(*o.predicate, in) != ValueKind::Boolean) {
                    throw ConfigError("filter predicate must be boolean: '" +
                                      to_string(*o.predicate) + "'");
                }
                return in;
            } else if constexpr (std::is_same_v<T, ProjectionOp>) {
                const Schema& in = single_input(inputs, "projection");
                if (o.columns.empty()) throw ConfigError("projection keeps no columns");
                std::vector<Column> cols;
                cols.reserve(o.columns.size());
                for (const auto& name : o.columns) cols.push_back(in.at(in.require(name)));
                return Schema(std::move(cols));
            } else if constexpr (std::is_same_v<T, ExpressionOp>) {
                const Schema& in = single_input(inputs, "expression");
                if (in.has(o.column)) {
                    throw ConfigError("expression output column '" + o.column +
                                      "' already exists");
                }
                ValueKind k = type_check(*o.expr, in);
                std::vector<Column> cols = in.columns();
                cols.push_back({o.column, k});
                return Schema(std::move(cols));
            } else if constexpr (std::is_same_v<T, LookupOp>) {
                const Schema& in = single_input(inputs, "lookup");
                auto it = tables.find(o.table);
                if (it == tables.end()) {
                    throw ConfigError("lookup references unknown table '" + o.table + "'");
                }
                const LookupTableDef& def = it->second;
                if (def.key != o.match_column) {
                    throw ConfigError("lookup '" + o.table + "' is keyed on '" + def.key +
                                      "', not '" + o.match_column + "'");
                }
                std::size_t probe = in.require(o.probe_column);
                std::size_t match = def.schema.require(o.match_column);
                if (in.at(probe).kind != def.schema.at(match).kind) {
                    throw ConfigError("lookup probe column '" + o.probe_column +
                                      "' kind differs from match column '" + o.match_column +
                                      "'");
                }
                if (!value_matches_kind(o.default_key, def.schema.at(match).kind)) {
                    throw ConfigError("lookup default key kind differs from match column '" +
                                      o.match_column + "'");
                }
                if (o.fetch_columns.empty()) throw ConfigError("lookup fetches no columns");
                std::vector<Column> cols = in.columns();
                for (const auto& name : o.fetch_columns) {
                    if (in.has(name)) {
                        throw ConfigError("lookup fetch column '" + name +
                                          "' clashes with an input column");
                    }
                    cols.push_back(def.schema.at(def.schema.require(name)));
                }
                return Schema(std::move(cols));
            } else if constexpr (std::is_same_v<T, SplitterOp>) {
                const Schema& in = single_input(inputs, "splitter");
                if (o.routes.empty()) throw ConfigError("splitter has no routes");
                for (const auto& r : o.routes) {
                    if (type_check(*r, in) != ValueKind::Boolean) {
                        throw ConfigError("splitter route must be boolean: '" + to_string(*r) +
                                          "'");
                    }
                }
                return in;
            } else if constexpr (std::is_same_v<T, DelayOp>) {
                if (o.fixed_ms < 0 || o.per_row_us < 0) {
                    throw ConfigError("delay durations must be >= 0");
                }
                return single_input(inputs, "delay");
            } else if constexpr (std::is_same_v<T, SortOp>) {
                const Schema& in = single_input(inputs, "sort");
                if (o.keys.empty()) throw ConfigError("sort has no keys");
                if (!o.ascending.empty() && o.ascending.size() != o.keys.size()) {
                    throw ConfigError("sort ascending flags do not match keys");
                }
                for (const auto& k : o.keys) in.require(k);
                return in;
            } else if constexpr (std::is_same_v<T, AggregateOp>) {
                const Schema& in = single_input(inputs, "aggregate");
                std::vector<Column> cols;
                for (const auto& g : o.group_by) {
                    if (g == o.target) {
                        throw ConfigError("aggregate target '" + o.target +
                                          "' is also a group-by column");
                    }
                    cols.push_back(in.at(in.require(g)));
                }
                ValueKind target_kind = in.at(in.require(o.target)).kind;
                if ((o.fn == AggregateFn::Sum || o.fn == AggregateFn::Avg) &&
                    target_kind != ValueKind::Integer && target_kind != ValueKind::Decimal) {
                    throw ConfigError(std::string(aggregate_fn_name(o.fn)) +
                                      " requires a numeric target column, got " +
                                      std::string(kind_name(target_kind)));
                }
                cols.push_back({o.target, aggregate_output_kind(o, target_kind)});
                return Schema(std::move(cols));
            } else if constexpr (std::is_same_v<T, UnionAllOp>) {
                return common_input(inputs, "union_all");
            } else if constexpr (std::is_same_v<T, MergeSortedOp>) {
                Schema in = common_input(inputs, "merge_sorted");
                if (o.keys.empty()) throw ConfigError("merge_sorted has no keys");
                for (const auto& k : o.keys) in.require(k);
                return in;
            } else { // TextSinkOp
                return single_input(inputs, "text_sink");
            }
        },
        op);
}

// ---- row-synchronized operations ---------------------------------------------

void filter_rows(SharedCache& cache, const Expr& predicate) {
    std::erase_if(cache.rows,
                  [&](const Row& r) { return !eval_predicate(predicate, cache.schema, r); });
    ++cache.stage_index;
}

void lookup_join(SharedCache& cache, const LookupTable& table, const LookupOp& op) {
    const Schema& tschema = table.schema();
    std::size_t probe = cache.schema.require(op.probe_column);
    std::vector<std::size_t> fetch_idx;
    fetch_idx.reserve(op.fetch_columns.size());
    for (const auto& name : op.fetch_columns) fetch_idx.push_back(tschema.require(name));
    std::size_t match_idx = tschema.require(op.match_column);

    for (Row& row : cache.rows) {
        const Row* hit = table.find(row[probe]);
        for (std::size_t k = 0; k < fetch_idx.size(); ++k) {
            if (hit) {
                row.push_back((*hit)[fetch_idx[k]]);
            } else {
                row.push_back(fetch_idx[k] == match_idx ? op.default_key : Value{});
            }
        }
    }
    std::vector<Column> cols = cache.schema.columns();
    for (std::size_t k = 0; k < fetch_idx.size(); ++k) cols.push_back(tschema.at(fetch_idx[k]));
    cache.schema = Schema(std::move(cols));
    ++cache.stage_index;
}

void project_columns(SharedCache& cache, const std::vector<std::string>& columns) {
    std::vector<std::size_t> idx;
    idx.reserve(columns.size());
    std::vector<Column> cols;
    for (const auto& name : columns) {
        idx.push_back(cache.schema.require(name));
        cols.push_back(cache.schema.at(idx.back()));
    }
    Row tmp(idx.size());
    for (Row& row : cache.rows) {
        for (std::size_t k = 0; k < idx.size(); ++k) tmp[k] = std::move(row[idx[k]]);
        row.assign(std::make_move_iterator(tmp.begin()), std::make_move_iterator(tmp.end()));
    }
    cache.schema = Schema(std::move(cols));
    ++cache.stage_index;
}

void evaluate_expression(SharedCache& cache, const std::string& name, const Expr& expr) {
    ValueKind k = type_check(expr, cache.schema);
    for (Row& row : cache.rows) row.push_back(eval(expr, cache.schema, row));
    std::vector<Column> cols = cache.schema.columns();
    cols.push_back({name, k});
    cache.schema = Schema(std::move(cols));
    ++cache.stage_index;
}

std::vector<CachePtr> split_route(CachePtr cache, const SplitterOp& op) {
    std::vector<CachePtr> branches;
    branches.reserve(op.routes.size());
    for (std::size_t b = 0; b < op.routes.size(); ++b) {
        branches.push_back(
            make_cache(cache->schema, {}, cache->split_index, cache->stage_index + 1));
    }
    for (Row& row : cache->rows) {
        for (std::size_t b = 0; b < op.routes.size(); ++b) {
            if (eval_predicate(*op.routes[b], cache->schema, row)) {
                branches[b]->rows.push_back(std::move(row));
                break;
            }
        }
        // rows matching no route are dropped
    }
    return branches;
}

void delay_rows(SharedCache& cache, const DelayOp& op) {
    double ms = op.fixed_ms + op.per_row_us * static_cast<double>(cache.rows.size()) / 1000.0;
    if (ms > 0) {
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
    }
    ++cache.stage_index;
}

// ---- block / semi-block operations --------------------------------------------

namespace {

struct RowKeyLess {
    bool operator()(const Row& a, const Row& b) const {
        for (std::size_t i = 0; i < a.size(); ++i) {
            int c = compare_values(a[i], b[i]);
            if (c) return c < 0;
        }
        return false;
    }
};

struct Accumulator {
    std::int64_t rows = 0;   // all rows in the group (count)
    std::int64_t values = 0; // non-null target values (sum/avg/min/max)
    std::int64_t isum = 0;
    double dsum = 0;
    Value min, max;

    void add(const Value& v) {
        ++rows;
        if (is_null(v)) return;
        if (auto* i = std::get_if<std::int64_t>(&v)) isum += *i;
        else if (auto* d = std::get_if<double>(&v)) dsum += *d;
        if (values == 0 || compare_values(v, min) < 0) min = v;
        if (values == 0 || compare_values(v, max) > 0) max = v;
        ++values;
    }

    Value result(const AggregateOp& op, ValueKind target_kind) const {
        switch (op.fn) {
        case AggregateFn::Count: return Value(rows);
        case AggregateFn::Sum:
            return target_kind == ValueKind::Integer ? Value(isum) : Value(dsum);
        case AggregateFn::Avg: {
            if (values == 0) return Value{};
            double total = target_kind == ValueKind::Integer ? static_cast<double>(isum) : dsum;
            return Value(total / static_cast<double>(values));
        }
        case AggregateFn::Min: return values ? min : Value{};
        default: return values ? max : Value{};
        }
    }
};

} // namespace

std::vector<Row> aggregate_group(std::vector<Row> rows, const AggregateOp& op,
                                 const Schema& input) {
    std::vector<std::size_t> group_idx;
    for (const auto& g : op.group_by) group_idx.push_back(input.require(g));
    std::size_t target_idx = input.require(op.target);
    ValueKind target_kind = input.at(target_idx).kind;

    std::map<Row, Accumulator, RowKeyLess> groups;
    for (const Row& row : rows) {
        Row key;
        key.reserve(group_idx.size());
        for (std::size_t gi : group_idx) key.push_back(row[gi]);
        groups[std::move(key)].add(row[target_idx]);
    }

    std::vector<Row> out;
    out.reserve(groups.size());
    for (auto& [key, acc] : groups) {
        Row row = key;
        row.push_back(acc.result(op, target_kind));
        out.push_back(std::move(row));
    }
    return out;
}

void sort_rows(std::vector<Row>& rows, const Schema& schema, const std::vector<std::string>& keys,
               const std::vector<bool>& ascending) {
    std::vector<std::size_t> idx;
    for (const auto& k : keys) idx.push_back(schema.require(k));
    std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const Value& x = a[idx[k]];
            const Value& y = b[idx[k]];
            bool asc = ascending.empty() || ascending[k];
            // nulls first in either direction
            bool xn = is_null(x), yn = is_null(y);
            if (xn != yn) return xn;
            int c = compare_values(x, y);
            if (c) return asc ? c < 0 : c > 0;
        }
        return false;
    });
}

std::vector<Row> union_all(std::vector<std::vector<Row>> inputs) {
    std::vector<Row> out;
    std::size_t total = 0;
    for (const auto& in : inputs) total += in.size();
    out.reserve(total);
    for (auto& in : inputs) {
        for (auto& row : in) out.push_back(std::move(row));
    }
    return out;
}

std::vector<Row> merge_sorted(std::vector<std::vector<Row>> inputs, const Schema& schema,
                              const std::vector<std::string>& keys,
                              const std::vector<std::string>* input_names) {
    std::vector<std::size_t> idx;
    for (const auto& k : keys) idx.push_back(schema.require(k));

    auto key_less = [&](const Row& a, const Row& b) {
        for (std::size_t k : idx) {
            int c = compare_values(a[k], b[k]);
            if (c) return c < 0;
        }
        return false;
    };
    auto input_label = [&](std::size_t i) {
        return input_names && i < input_names->size() ? (*input_names)[i]
                                                      : "input " + std::to_string(i + 1);
    };
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (std::size_t r = 1; r < inputs[i].size(); ++r) {
            if (key_less(inputs[i][r], inputs[i][r - 1])) {
                throw ExecError("merge_sorted: " + input_label(i) +
                                " is not sorted at row index " + std::to_string(r));
            }
        }
    }

    std::vector<Row> out;
    std::size_t total = 0;
    for (const auto& in : inputs) total += in.size();
    out.reserve(total);
    std::vector<std::size_t> pos(inputs.size(), 0);
    for (;;) {
        std::size_t best = inputs.size();
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            if (pos[i] >= inputs[i].size()) continue;
            // strict less keeps the merge stable across inputs (ties go to
            // the lower input index)
            if (best == inputs.size() || key_less(inputs[i][pos[i]], inputs[best][pos[best]])) {
                best = i;
            }
        }
        if (best == inputs.size()) break;
        out.push_back(std::move(inputs[best][pos[best]]));
        ++pos[best];
    }
    return out;
}

} // namespace etlforge
