// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/partition.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "etlforge/errors.hpp"

namespace etlforge {

const ExecutionTree* ExecutionTreeGraph::tree_of_component(const std::string& component_id) const {
    for (const auto& t : trees) {
        if (std::find(t.members.begin(), t.members.end(), component_id) != t.members.end()) {
            return &t;
        }
    }
    return nullptr;
}

const ExecutionTree* ExecutionTreeGraph::tree_by_id(const std::string& tree_id) const {
    for (const auto& t : trees) {
        if (t.id == tree_id) return &t;
    }
    return nullptr;
}

ComponentKind classify_component(const ComponentSpec& spec) {
    return operator_kind(spec.op);
}

namespace {

bool is_boundary(ComponentKind k) {
    return k == ComponentKind::Block || k == ComponentKind::SemiBlock;
}

struct Partitioner {
    const DataflowGraph& graph;
    ExecutionTreeGraph out;
    std::map<std::string, std::size_t> tree_of; // component -> tree index
    std::set<std::string> visited;
    std::set<std::tuple<std::string, std::string, std::string, std::string>> edge_seen;

    std::size_t new_tree(const std::string& root) {
        std::size_t idx = out.trees.size();
        out.trees.push_back({"T" + std::to_string(idx + 1), idx, root, {}});
        return idx;
    }

    void add_tree_edge(std::size_t from_tree, std::size_t to_tree, const std::string& from_comp,
                       const std::string& to_comp) {
        const std::string& ft = out.trees[from_tree].id;
        const std::string& tt = out.trees[to_tree].id;
        if (edge_seen.emplace(ft, tt, from_comp, to_comp).second) {
            out.edges.push_back({ft, tt, from_comp, to_comp});
        }
    }

    void dfs(const std::string& v, std::size_t tree) {
        visited.insert(v);
        tree_of[v] = tree;
        out.trees[tree].members.push_back(v);
        for (const auto& u : graph.successors(v)) {
            ComponentKind uk = classify_component(graph.at(u));
            if (visited.count(u)) {
                // already placed; record the crossing if it spans trees
                std::size_t ut = tree_of.at(u);
                if (ut != tree) add_tree_edge(tree, ut, v, u);
                continue;
            }
            if (is_boundary(uk)) {
                std::size_t nt = new_tree(u);
                add_tree_edge(tree, nt, v, u);
                dfs(u, nt);
            } else {
                dfs(u, tree);
            }
        }
    }

    void run() {
        for (const auto* c : graph.components()) {
            if (graph.in_degree(c->id) == 0 && !visited.count(c->id)) {
                dfs(c->id, new_tree(c->id));
            }
        }
        if (visited.size() != graph.component_count()) {
            throw ConfigError("partition: graph has components unreachable from any source");
        }
    }
};

} // namespace

ExecutionTreeGraph partition(const DataflowGraph& graph) {
    Partitioner p{graph};
    p.run();
    return std::move(p.out);
}

std::vector<std::string> tree_topological_order(const ExecutionTreeGraph& tg) {
    std::map<std::string, std::size_t> indeg, index;
    for (const auto& t : tg.trees) {
        indeg[t.id] = 0;
        index[t.id] = t.index;
    }
    std::set<std::pair<std::string, std::string>> uniq;
    for (const auto& e : tg.edges) uniq.emplace(e.from_tree, e.to_tree);
    for (const auto& [from, to] : uniq) ++indeg[to];

    // ready set ordered by creation index (T1 < T2 < ... < T10)
    auto cmp = [&](const std::string& a, const std::string& b) { return index[a] < index[b]; };
    std::set<std::string, decltype(cmp)> ready(cmp);
    for (const auto& [id, d] : indeg) {
        if (d == 0) ready.insert(id);
    }
    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string t = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(t);
        for (const auto& [from, to] : uniq) {
            if (from == t && --indeg[to] == 0) ready.insert(to);
        }
    }
    if (order.size() != tg.trees.size()) {
        throw ConfigError("execution tree graph has a cycle"); // impossible for valid input
    }
    return order;
}

} // namespace etlforge
