// Copyright 2026 The topocl Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topocl/core.hpp"

namespace topocl {

// Unordered edge, stored with first < second.
using Edge = std::pair<int, int>;

// Undirected labeled graph. Treat instances as immutable once built;
// make_graph() is the normalizing constructor used everywhere outside of
// tests that deliberately craft invalid graphs for validate().
struct Graph {
  int num_nodes = 0;
  std::vector<Edge> edges;  // normalized: first < second, sorted, unique
  std::vector<int> node_labels;
  std::vector<std::vector<double>> node_features;  // empty means absent
  std::optional<int> graph_label;
  std::vector<std::vector<int>> adj;  // sorted neighbor lists

  int num_edges() const { return static_cast<int>(edges.size()); }
  bool has_features() const { return !node_features.empty(); }

  bool operator==(const Graph& other) const {
    return num_nodes == other.num_nodes && edges == other.edges &&
           node_labels == other.node_labels &&
           node_features == other.node_features &&
           graph_label == other.graph_label;
  }
};

namespace detail {

inline std::vector<Edge> normalize_edges(std::vector<Edge> edges) {
  for (auto& [u, v] : edges) {
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

inline std::vector<std::vector<int>> build_adjacency(
    int num_nodes, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> adj(num_nodes);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

}  // namespace detail

// Builds a graph from possibly duplicated, possibly reversed edge lines.
// Duplicates collapse silently into one unordered edge. Self-loops and
// out-of-range endpoints are rejected.
inline Graph make_graph(int num_nodes, std::vector<Edge> edges,
                        std::vector<int> node_labels = {},
                        std::vector<std::vector<double>> node_features = {},
                        std::optional<int> graph_label = std::nullopt) {
  if (num_nodes < 0) throw ContractError("make_graph: negative node count");
  for (const auto& [u, v] : edges) {
    if (u == v) {
      throw ContractError("make_graph: self-loop at node " +
                          std::to_string(u));
    }
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
      throw ContractError("make_graph: edge (" + std::to_string(u) + "," +
                          std::to_string(v) + ") outside [0," +
                          std::to_string(num_nodes) + ")");
    }
  }
  Graph g;
  g.num_nodes = num_nodes;
  g.edges = detail::normalize_edges(std::move(edges));
  g.node_labels = node_labels.empty() ? std::vector<int>(num_nodes, 0)
                                      : std::move(node_labels);
  if (static_cast<int>(g.node_labels.size()) != num_nodes) {
    throw ContractError("make_graph: node_labels length " +
                        std::to_string(g.node_labels.size()) + " != " +
                        std::to_string(num_nodes));
  }
  g.node_features = std::move(node_features);
  g.graph_label = graph_label;
  g.adj = detail::build_adjacency(num_nodes, g.edges);
  return g;
}

// Checks every graph invariant and reports all violations. Never throws.
inline std::vector<std::string> validate(const Graph& g) {
  std::vector<std::string> violations;
  if (g.num_nodes < 0) violations.push_back("negative num_nodes");
  for (const auto& [u, v] : g.edges) {
    if (u == v) {
      violations.push_back("self-loop at node " + std::to_string(u));
    }
    if (u < 0 || u >= g.num_nodes || v < 0 || v >= g.num_nodes) {
      violations.push_back("edge (" + std::to_string(u) + "," +
                           std::to_string(v) + ") has endpoint outside [0," +
                           std::to_string(g.num_nodes) + ")");
    }
  }
  {
    std::vector<Edge> norm;
    norm.reserve(g.edges.size());
    for (auto [u, v] : g.edges) {
      norm.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(norm.begin(), norm.end());
    for (std::size_t i = 1; i < norm.size(); ++i) {
      if (norm[i] == norm[i - 1]) {
        violations.push_back("duplicate edge (" +
                             std::to_string(norm[i].first) + "," +
                             std::to_string(norm[i].second) + ")");
      }
    }
  }
  if (static_cast<int>(g.node_labels.size()) != g.num_nodes) {
    violations.push_back("node_labels length " +
                         std::to_string(g.node_labels.size()) +
                         " != num_nodes " + std::to_string(g.num_nodes));
  }
  for (int lbl : g.node_labels) {
    if (lbl < 0) {
      violations.push_back("negative node label " + std::to_string(lbl));
      break;
    }
  }
  if (g.has_features()) {
    if (static_cast<int>(g.node_features.size()) != g.num_nodes) {
      violations.push_back("node_features length " +
                           std::to_string(g.node_features.size()) +
                           " != num_nodes " + std::to_string(g.num_nodes));
    } else if (g.num_nodes > 0) {
      const std::size_t dim = g.node_features[0].size();
      for (int v = 1; v < g.num_nodes; ++v) {
        if (g.node_features[v].size() != dim) {
          violations.push_back("feature dimension mismatch at node " +
                               std::to_string(v));
          break;
        }
      }
    }
  }
  return violations;
}

inline int degree(const Graph& g, int v) {
  if (v < 0 || v >= g.num_nodes) {
    throw ContractError("degree: node " + std::to_string(v) +
                        " outside [0," + std::to_string(g.num_nodes) + ")");
  }
  return static_cast<int>(g.adj[v].size());
}

// Induced subgraph on `keep` (indices into g, need not be sorted). Node i
// of the result corresponds to keep[i]; labels and features carry over.
inline Graph induced_subgraph(const Graph& g, const std::vector<int>& keep) {
  std::vector<int> remap(g.num_nodes, -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    remap[keep[i]] = static_cast<int>(i);
  }
  std::vector<Edge> edges;
  for (const auto& [u, v] : g.edges) {
    if (remap[u] >= 0 && remap[v] >= 0) {
      edges.emplace_back(remap[u], remap[v]);
    }
  }
  std::vector<int> labels(keep.size());
  std::vector<std::vector<double>> feats;
  if (g.has_features()) feats.resize(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    labels[i] = g.node_labels[keep[i]];
    if (g.has_features()) feats[i] = g.node_features[keep[i]];
  }
  return make_graph(static_cast<int>(keep.size()), std::move(edges),
                    std::move(labels), std::move(feats), g.graph_label);
}

// Relabels nodes: result node i corresponds to input node perm[i].
inline Graph permute_graph(const Graph& g, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g.num_nodes) {
    throw ContractError("permute_graph: permutation length mismatch");
  }
  return induced_subgraph(g, perm);
}

}  // namespace topocl
