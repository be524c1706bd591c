// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "etlforge/graph.hpp"

namespace etlforge {

/// A maximal subgraph rooted at a source, block, or semi-block component
/// whose other members are row-synchronized components and sinks. Members
/// are listed root first in DFS discovery order.
struct ExecutionTree {
    std::string id;    // "T1", "T2", ... in creation order
    std::size_t index; // creation order, 0-based
    std::string root;
    std::vector<std::string> members;
};

/// One dataflow edge crossing between two trees; data crossing it is copied.
struct TreeEdge {
    std::string from_tree;
    std::string to_tree;
    std::string from_component;
    std::string to_component;
};

struct ExecutionTreeGraph {
    std::vector<ExecutionTree> trees; // creation order
    std::vector<TreeEdge> edges;      // discovery order

    const ExecutionTree* tree_of_component(const std::string& component_id) const;
    const ExecutionTree* tree_by_id(const std::string& tree_id) const;
};

/// Kind from the operator kind table.
ComponentKind classify_component(const ComponentSpec& spec);

/// Depth-first partitioning: one tree per source, and a new tree rooted at
/// every block/semi-block component reached; everything else joins the tree
/// it was discovered from. Reaching an already-rooted tree from another tree
/// only adds a tree edge, so trees partition the components. Deterministic:
/// sources and adjacency are visited in ascending id order.
ExecutionTreeGraph partition(const DataflowGraph& graph); // pre: graph validates

/// Upstream trees first; ties broken by creation order (T1 < T2 < ...).
std::vector<std::string> tree_topological_order(const ExecutionTreeGraph& tg);

} // namespace etlforge
