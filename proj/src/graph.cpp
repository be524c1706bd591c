// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/graph.hpp"

#include <algorithm>
#include <queue>

#include "etlforge/errors.hpp"

namespace etlforge {

ComponentSpec make_component(std::string id, OperatorDescriptor op) {
    ComponentKind kind = operator_kind(op);
    return ComponentSpec{std::move(id), kind, std::move(op)};
}

void DataflowGraph::add_component(ComponentSpec spec) {
    if (spec.id.empty()) throw ConfigError("component id must be non-empty");
    auto [it, inserted] = components_.emplace(spec.id, std::move(spec));
    if (!inserted) throw ConfigError("duplicate component id: '" + it->first + "'");
}

void DataflowGraph::add_edge(const std::string& from, const std::string& to) {
    edges_.emplace(from, to);
}

const ComponentSpec& DataflowGraph::at(const std::string& id) const {
    auto it = components_.find(id);
    if (it == components_.end()) throw ConfigError("unknown component id: '" + id + "'");
    return it->second;
}

std::vector<const ComponentSpec*> DataflowGraph::components() const {
    std::vector<const ComponentSpec*> out;
    out.reserve(components_.size());
    for (const auto& [id, spec] : components_) out.push_back(&spec);
    return out;
}

std::vector<std::string> DataflowGraph::successors(const std::string& id) const {
    std::vector<std::string> out;
    for (auto it = edges_.lower_bound({id, ""}); it != edges_.end() && it->first == id; ++it) {
        out.push_back(it->second);
    }
    return out;
}

std::vector<std::string> DataflowGraph::predecessors(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [from, to] : edges_) {
        if (to == id) out.push_back(from);
    }
    return out; // set iteration order is already ascending by (from, to)
}

std::size_t DataflowGraph::in_degree(const std::string& id) const {
    return predecessors(id).size();
}

std::size_t DataflowGraph::out_degree(const std::string& id) const {
    return successors(id).size();
}

std::string_view violation_code_name(ViolationCode code) {
    switch (code) {
    case ViolationCode::Cycle: return "cycle";
    case ViolationCode::DanglingEdge: return "dangling-edge";
    case ViolationCode::KindMismatch: return "kind-mismatch";
    case ViolationCode::DegreeViolation: return "degree";
    case ViolationCode::Unreachable: return "unreachable";
    case ViolationCode::SchemaMismatch: return "schema";
    case ViolationCode::FanOut: return "fan-out";
    }
    return "?";
}

namespace {

/// Finds one cycle with DFS; empty when acyclic.
std::vector<std::string> find_cycle(const DataflowGraph& graph) {
    enum class Mark { None, Active, Done };
    std::map<std::string, Mark> mark;
    std::vector<std::string> stack, cycle;

    auto dfs = [&](auto&& self, const std::string& v) -> bool {
        mark[v] = Mark::Active;
        stack.push_back(v);
        for (const auto& u : graph.successors(v)) {
            if (!graph.has(u)) continue;
            Mark m = mark.count(u) ? mark[u] : Mark::None;
            if (m == Mark::Active) {
                auto it = std::find(stack.begin(), stack.end(), u);
                cycle.assign(it, stack.end());
                return true;
            }
            if (m == Mark::None && self(self, u)) return true;
        }
        stack.pop_back();
        mark[v] = Mark::Done;
        return false;
    };

    for (const auto* c : graph.components()) {
        if (!mark.count(c->id) && dfs(dfs, c->id)) return cycle;
    }
    return {};
}

} // namespace

std::vector<std::string> topological_order(const DataflowGraph& graph) {
    std::map<std::string, std::size_t> indeg;
    for (const auto* c : graph.components()) indeg[c->id] = 0;
    for (const auto& [from, to] : graph.edges()) {
        if (graph.has(from) && graph.has(to)) ++indeg[to];
    }

    // min-heap on id for the deterministic tie-break
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [id, d] : indeg) {
        if (d == 0) ready.push(id);
    }
    std::vector<std::string> order;
    order.reserve(indeg.size());
    while (!ready.empty()) {
        std::string v = ready.top();
        ready.pop();
        order.push_back(v);
        for (const auto& u : graph.successors(v)) {
            if (!graph.has(u)) continue;
            if (--indeg[u] == 0) ready.push(u);
        }
    }
    if (order.size() != indeg.size()) {
        auto cycle = find_cycle(graph);
        std::string msg = "dataflow has a cycle:";
        for (const auto& n : cycle) msg += " " + n;
        throw CycleError(msg, std::move(cycle));
    }
    return order;
}

namespace {

std::size_t splitter_route_count(const ComponentSpec& spec) {
    if (const auto* s = std::get_if<SplitterOp>(&spec.op)) return s->routes.size();
    return 0;
}

void check_structure(const DataflowGraph& graph, ValidationReport& report) {
    auto add = [&](ViolationCode code, std::string msg, std::vector<std::string> comps = {}) {
        report.violations.push_back({code, std::move(msg), std::move(comps)});
    };

    for (const auto& [from, to] : graph.edges()) {
        if (!graph.has(from)) {
            add(ViolationCode::DanglingEdge, "edge " + from + " -> " + to +
                                                 " references unknown component '" + from + "'",
                {from, to});
        }
        if (!graph.has(to)) {
            add(ViolationCode::DanglingEdge,
                "edge " + from + " -> " + to + " references unknown component '" + to + "'",
                {from, to});
        }
        if (from == to) {
            add(ViolationCode::Cycle, "self edge on '" + from + "'", {from});
        }
    }

    auto cycle = find_cycle(graph);
    if (!cycle.empty()) {
        std::string msg = "cycle:";
        for (const auto& n : cycle) msg += " " + n;
        add(ViolationCode::Cycle, msg, cycle);
    }

    bool any_source = false;
    for (const auto* c : graph.components()) {
        ComponentKind declared = c->kind;
        ComponentKind actual = operator_kind(c->op);
        if (declared != actual) {
            add(ViolationCode::KindMismatch,
                "component '" + c->id + "' declares kind " +
                    std::string(component_kind_name(declared)) + " but operator '" +
                    std::string(operator_name(c->op)) + "' is " +
                    std::string(component_kind_name(actual)),
                {c->id});
        }

        std::size_t indeg = graph.in_degree(c->id);
        std::size_t outdeg = graph.out_degree(c->id);
        switch (actual) {
        case ComponentKind::Source:
            any_source = true;
            if (indeg != 0) {
                add(ViolationCode::DegreeViolation,
                    "source '" + c->id + "' must have no inputs", {c->id});
            }
            if (outdeg == 0) {
                add(ViolationCode::DegreeViolation,
                    "source '" + c->id + "' has no outgoing edge", {c->id});
            }
            break;
        case ComponentKind::Sink:
            if (outdeg != 0) {
                add(ViolationCode::DegreeViolation,
                    "sink '" + c->id + "' must have no outputs", {c->id});
            }
            if (indeg != 1) {
                add(ViolationCode::DegreeViolation,
                    "sink '" + c->id + "' needs exactly one input", {c->id});
            }
            break;
        case ComponentKind::SemiBlock:
            if (indeg < 1) {
                add(ViolationCode::DegreeViolation,
                    "semi-block '" + c->id + "' needs at least one input", {c->id});
            }
            if (outdeg == 0) {
                add(ViolationCode::DegreeViolation,
                    "semi-block '" + c->id + "' has no outgoing edge", {c->id});
            }
            break;
        default: // RowSynchronized, Block
            if (indeg != 1) {
                add(ViolationCode::DegreeViolation,
                    std::string(component_kind_name(actual)) + " '" + c->id +
                        "' needs exactly one input (only semi-block components may fan in)",
                    {c->id});
            }
            if (outdeg == 0) {
                add(ViolationCode::DegreeViolation,
                    "component '" + c->id + "' has no outgoing edge", {c->id});
            }
            break;
        }

        // Fan-out rules. A cache is handed to exactly one downstream
        // row-synchronized/sink component; only a splitter branches inside a
        // tree. Edges into block/semi-block components cross tree boundaries
        // by copy and may fan out freely.
        if (std::holds_alternative<SplitterOp>(c->op)) {
            std::size_t routes = splitter_route_count(*c);
            if (outdeg != routes && routes > 0) {
                add(ViolationCode::FanOut,
                    "splitter '" + c->id + "' declares " + std::to_string(routes) +
                        " routes but has " + std::to_string(outdeg) + " outgoing edges",
                    {c->id});
            }
        } else if (actual != ComponentKind::Sink) {
            std::size_t in_tree_children = 0;
            for (const auto& u : graph.successors(c->id)) {
                if (!graph.has(u)) continue;
                ComponentKind uk = operator_kind(graph.at(u).op);
                if (uk == ComponentKind::RowSynchronized || uk == ComponentKind::Sink) {
                    ++in_tree_children;
                }
            }
            if (in_tree_children > 1) {
                add(ViolationCode::FanOut,
                    "component '" + c->id + "' feeds " + std::to_string(in_tree_children) +
                        " row-synchronized/sink components; duplicate fan-out needs a splitter",
                    {c->id});
            }
        }
    }

    if (graph.component_count() > 0 && !any_source) {
        add(ViolationCode::Unreachable, "dataflow has no source component");
    }

    // Reachability: every component from some source; every source to some sink.
    std::set<std::string> from_sources;
    std::vector<std::string> frontier;
    for (const auto* c : graph.components()) {
        if (operator_kind(c->op) == ComponentKind::Source) frontier.push_back(c->id);
    }
    while (!frontier.empty()) {
        std::string v = frontier.back();
        frontier.pop_back();
        if (!from_sources.insert(v).second) continue;
        for (const auto& u : graph.successors(v)) {
            if (graph.has(u)) frontier.push_back(u);
        }
    }
    for (const auto* c : graph.components()) {
        if (!from_sources.count(c->id)) {
            add(ViolationCode::Unreachable,
                "component '" + c->id + "' is not reachable from any source", {c->id});
        }
    }
    for (const auto* c : graph.components()) {
        if (operator_kind(c->op) != ComponentKind::Source) continue;
        std::set<std::string> seen;
        std::vector<std::string> work{c->id};
        bool reaches_sink = false;
        while (!work.empty() && !reaches_sink) {
            std::string v = work.back();
            work.pop_back();
            if (!seen.insert(v).second) continue;
            if (graph.has(v) && operator_kind(graph.at(v).op) == ComponentKind::Sink) {
                reaches_sink = true;
                break;
            }
            for (const auto& u : graph.successors(v)) {
                if (graph.has(u)) work.push_back(u);
            }
        }
        if (!reaches_sink) {
            add(ViolationCode::Unreachable, "source '" + c->id + "' reaches no sink", {c->id});
        }
    }
}

} // namespace

ResolvedSchemas resolve_schemas(const DataflowGraph& graph,
                                const std::map<std::string, LookupTableDef>& tables) {
    ResolvedSchemas resolved;
    for (const auto& id : topological_order(graph)) {
        const ComponentSpec& spec = graph.at(id);
        std::vector<Schema> inputs;
        for (const auto& p : graph.predecessors(id)) { // ascending id order
            auto it = resolved.outputs.find(p);
            if (it == resolved.outputs.end()) {
                throw ConfigError("component '" + id + "': upstream '" + p +
                                  "' has no resolved schema");
            }
            inputs.push_back(it->second);
        }
        try {
            resolved.outputs[id] = resolve_output_schema(spec.op, inputs, tables);
        } catch (const ConfigError& e) {
            throw ConfigError("component '" + id + "': " + e.what());
        }
        resolved.inputs[id] = std::move(inputs);
    }
    return resolved;
}

ValidationReport validate_graph(const DataflowGraph& graph,
                                const std::map<std::string, LookupTableDef>& tables) {
    ValidationReport report;
    check_structure(graph, report);

    // Schema propagation only makes sense on a structurally sound graph;
    // per-component failures become violations and poison their descendants.
    bool structural = std::any_of(
        report.violations.begin(), report.violations.end(), [](const Violation& v) {
            return v.code == ViolationCode::Cycle || v.code == ViolationCode::DanglingEdge;
        });
    if (structural) return report;

    std::map<std::string, Schema> outputs;
    std::set<std::string> poisoned;
    for (const auto& id : topological_order(graph)) {
        const ComponentSpec& spec = graph.at(id);
        std::vector<Schema> inputs;
        bool skip = false;
        for (const auto& p : graph.predecessors(id)) {
            if (poisoned.count(p) || !outputs.count(p)) {
                skip = true;
                break;
            }
            inputs.push_back(outputs[p]);
        }
        if (skip) {
            poisoned.insert(id);
            continue;
        }
        try {
            outputs[id] = resolve_output_schema(spec.op, inputs, tables);
        } catch (const ConfigError& e) {
            report.violations.push_back(
                {ViolationCode::SchemaMismatch, "component '" + id + "': " + e.what(), {id}});
            poisoned.insert(id);
        }
    }
    return report;
}

} // namespace etlforge
