// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "etlforge/cache.hpp"
#include "etlforge/expression.hpp"
#include "etlforge/schema.hpp"

namespace etlforge {

enum class ComponentKind { Source, RowSynchronized, Block, SemiBlock, Sink };

std::string_view component_kind_name(ComponentKind k);
ComponentKind component_kind_from_name(std::string_view name); // throws ConfigError

enum class AggregateFn { Sum, Avg, Min, Max, Count };

std::string_view aggregate_fn_name(AggregateFn fn);
AggregateFn aggregate_fn_from_name(std::string_view name); // throws ConfigError

// ---- operator descriptors -------------------------------------------------

struct FilterOp {
    ExprPtr predicate;
};

struct ProjectionOp {
    std::vector<std::string> columns;
};

struct ExpressionOp {
    std::string column; // appended
    ExprPtr expr;
};

struct LookupOp {
    std::string table;
    std::string probe_column;               // in the incoming rows
    std::string match_column;               // key of the lookup table
    std::vector<std::string> fetch_columns; // appended from the matched row
    Value default_key{std::int64_t{-1}};    // fetched match column on a miss
};

/// Routes each row to the first branch whose predicate holds. Branch i feeds
/// the i-th downstream component in ascending component-id order.
struct SplitterOp {
    std::vector<ExprPtr> routes;
};

/// Identity transform that costs a deterministic amount of time:
/// fixed_ms + per_row_us * rows per cache. Calibration and benchmark fixtures
/// are built from these.
struct DelayOp {
    double fixed_ms = 0.0;
    double per_row_us = 0.0;
};

struct SortOp {
    std::vector<std::string> keys;
    std::vector<bool> ascending; // empty = all ascending
};

struct AggregateOp {
    std::vector<std::string> group_by;
    AggregateFn fn = AggregateFn::Sum;
    std::string target; // also names the output column
};

struct UnionAllOp {};

struct MergeSortedOp {
    std::vector<std::string> keys;
};

struct CsvSourceOp {
    std::string path;
    Schema schema;
};

struct TextSinkOp {
    std::string path;
    char delimiter = ',';
};

using OperatorDescriptor =
    std::variant<CsvSourceOp, FilterOp, ProjectionOp, ExpressionOp, LookupOp, SplitterOp, DelayOp,
                 SortOp, AggregateOp, UnionAllOp, MergeSortedOp, TextSinkOp>;

/// The kind table: filter/projection/expression/lookup/splitter/delay are
/// row-synchronized, sort/aggregate block, union/merge semi-block.
ComponentKind operator_kind(const OperatorDescriptor& op);
std::string_view operator_name(const OperatorDescriptor& op);

// ---- lookup tables ----------------------------------------------------------

struct LookupTableDef {
    std::string name;
    std::string path;
    std::string key;
    Schema schema;
    ExprPtr load_filter; // optional; rows failing it are dropped at load
};

/// In-memory keyed table, immutable after load.
class LookupTable {
public:
    static LookupTable load(const LookupTableDef& def, const std::filesystem::path& base_dir);

    const Schema& schema() const { return schema_; }
    const std::string& key_column() const { return key_column_; }
    /// The matched row, or nullptr on a miss.
    const Row* find(const Value& key) const;
    std::size_t size() const { return rows_.size(); }

private:
    Schema schema_;
    std::vector<Row> rows_;
    std::string key_column_;
    std::unordered_map<Value, std::size_t, ValueHash, ValueEq> index_;
};

class LookupTableSet {
public:
    void add(std::string name, LookupTable table);
    bool has(const std::string& name) const { return tables_.count(name) > 0; }
    /// Throws ExecError naming the table when it is not loaded.
    const LookupTable& require(const std::string& name) const;

private:
    std::map<std::string, LookupTable> tables_;
};

// ---- schema derivation -------------------------------------------------------

/// Output schema of an operator given its input schema(s), ordered by
/// ascending upstream component id for multi-input operators. Throws
/// ConfigError on any contract violation (unknown column, kind mismatch,
/// name clash, input schema disagreement).
Schema resolve_output_schema(const OperatorDescriptor& op, std::span<const Schema> inputs,
                             const std::map<std::string, LookupTableDef>& tables);

// ---- row-synchronized operations (in-place on the shared cache) -------------

/// Keep rows satisfying the predicate, preserving order; same buffer.
void filter_rows(SharedCache& cache, const Expr& predicate);

/// Extend each row with the fetch columns. On a miss the fetched match
/// column gets op.default_key and the other fetch columns null.
void lookup_join(SharedCache& cache, const LookupTable& table, const LookupOp& op);

/// Keep the listed columns in the listed order.
void project_columns(SharedCache& cache, const std::vector<std::string>& columns);

/// Append one computed column.
void evaluate_expression(SharedCache& cache, const std::string& name, const Expr& expr);

/// First-match routing into one cache per branch. Rows move; survivors keep
/// their per-branch relative order. Consumes the input cache.
std::vector<CachePtr> split_route(CachePtr cache, const SplitterOp& op);

/// Sleep fixed_ms + per_row_us * rows; rows pass through untouched.
void delay_rows(SharedCache& cache, const DelayOp& op);

// ---- block / semi-block operations ------------------------------------------

/// One output row per distinct group key, emitted in ascending key order.
std::vector<Row> aggregate_group(std::vector<Row> rows, const AggregateOp& op,
                                 const Schema& input);

/// Stable sort by keys; nulls first regardless of direction.
void sort_rows(std::vector<Row>& rows, const Schema& schema, const std::vector<std::string>& keys,
               const std::vector<bool>& ascending);

/// Concatenation in the order given (callers pass ascending upstream id order).
std::vector<Row> union_all(std::vector<std::vector<Row>> inputs);

/// Stable k-way merge of individually sorted inputs. input_names (optional,
/// parallel to inputs) label the error when an input is out of order.
std::vector<Row> merge_sorted(std::vector<std::vector<Row>> inputs, const Schema& schema,
                              const std::vector<std::string>& keys,
                              const std::vector<std::string>* input_names = nullptr);

} // namespace etlforge
