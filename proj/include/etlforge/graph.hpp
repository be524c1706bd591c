// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "etlforge/operators.hpp"

namespace etlforge {

struct ComponentSpec {
    std::string id;
    ComponentKind kind = ComponentKind::RowSynchronized; // declared; must match the operator
    OperatorDescriptor op;
};

ComponentSpec make_component(std::string id, OperatorDescriptor op); // kind from the operator

/// The dataflow DAG. Components are keyed by id; edges are an ordered set of
/// (from, to) pairs. The structure tolerates invalid graphs (dangling edges,
/// cycles) so that validation can report them; everything downstream requires
/// a validated graph.
class DataflowGraph {
public:
    void add_component(ComponentSpec spec);           // throws ConfigError on duplicate id
    void add_edge(const std::string& from, const std::string& to);

    bool has(const std::string& id) const { return components_.count(id) > 0; }
    const ComponentSpec& at(const std::string& id) const;
    std::size_t component_count() const { return components_.size(); }

    /// Components in ascending id order.
    std::vector<const ComponentSpec*> components() const;
    /// Edges in ascending (from, to) order.
    const std::set<std::pair<std::string, std::string>>& edges() const { return edges_; }

    /// Neighbors in ascending id order; ids without components are included
    /// verbatim (validation reports them).
    std::vector<std::string> successors(const std::string& id) const;
    std::vector<std::string> predecessors(const std::string& id) const;
    std::size_t in_degree(const std::string& id) const;
    std::size_t out_degree(const std::string& id) const;

private:
    std::map<std::string, ComponentSpec> components_;
    std::set<std::pair<std::string, std::string>> edges_;
};

enum class ViolationCode {
    Cycle,
    DanglingEdge,
    KindMismatch,
    DegreeViolation,
    Unreachable,
    SchemaMismatch,
    FanOut,
};

std::string_view violation_code_name(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string message;
    std::vector<std::string> components;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Per-component resolved schemas. Inputs are ordered by ascending upstream
/// component id.
struct ResolvedSchemas {
    std::map<std::string, std::vector<Schema>> inputs;
    std::map<std::string, Schema> outputs;
};

/// Checks every graph invariant and reports all violations: cycles, dangling
/// edges, kind/operator disagreement, degree rules (sources have no inputs,
/// sinks no outputs, only semi-blocks fan in, in-tree fan-out only through a
/// splitter), reachability, and schema compatibility along every edge.
/// Side-effect free.
ValidationReport validate_graph(const DataflowGraph& graph,
                                const std::map<std::string, LookupTableDef>& tables = {});

/// Schema propagation in topological order; throws ConfigError with the
/// first problem. Requires a structurally valid graph.
ResolvedSchemas resolve_schemas(const DataflowGraph& graph,
                                const std::map<std::string, LookupTableDef>& tables = {});

/// Deterministic topological order (ties broken by ascending component id).
/// Throws CycleError identifying one cycle's node set.
std::vector<std::string> topological_order(const DataflowGraph& graph);

} // namespace etlforge
