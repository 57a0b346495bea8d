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

#include <cmath>
#include <utility>
#include <vector>

#include "topocl/graph.hpp"

namespace topocl {

struct NodeEdgeSet {
  std::vector<int> nodes;   // sorted
  std::vector<Edge> edges;  // normalized
};

struct SubgraphCount {
  int node_count = 0;
  int edge_count = 0;
};

// Closed-neighborhood subgraph of v: v, its neighbors, and every edge of
// g with both endpoints inside that node set.
inline NodeEdgeSet neighborhood_subgraph(const Graph& g, int v) {
  if (v < 0 || v >= g.num_nodes) {
    throw ContractError("neighborhood_subgraph: node " + std::to_string(v) +
                        " outside [0," + std::to_string(g.num_nodes) + ")");
  }
  NodeEdgeSet out;
  out.nodes = g.adj[v];
  out.nodes.insert(
      std::lower_bound(out.nodes.begin(), out.nodes.end(), v), v);
  std::vector<char> inside(g.num_nodes, 0);
  for (int x : out.nodes) inside[x] = 1;
  for (const auto& e : g.edges) {
    if (inside[e.first] && inside[e.second]) out.edges.push_back(e);
  }
  return out;
}

// Overlap subgraph of an adjacent pair: node sets of the two closed
// neighborhoods intersected, then their edge sets intersected. Always
// contains v, u and the edge {v,u}.
inline SubgraphCount overlap_subgraph(const Graph& g, int v, int u) {
  if (v < 0 || v >= g.num_nodes || u < 0 || u >= g.num_nodes) {
    throw ContractError("overlap_subgraph: node outside graph");
  }
  if (!std::binary_search(g.adj[v].begin(), g.adj[v].end(), u)) {
    throw ContractError("overlap_subgraph: nodes " + std::to_string(v) +
                        " and " + std::to_string(u) + " are not adjacent");
  }
  const NodeEdgeSet ov = neighborhood_subgraph(g, v);
  const NodeEdgeSet ou = neighborhood_subgraph(g, u);
  std::vector<int> common;
  std::set_intersection(ov.nodes.begin(), ov.nodes.end(), ou.nodes.begin(),
                        ou.nodes.end(), std::back_inserter(common));
  std::vector<Edge> common_edges;
  std::set_intersection(ov.edges.begin(), ov.edges.end(), ou.edges.begin(),
                        ou.edges.end(), std::back_inserter(common_edges));
  return SubgraphCount{static_cast<int>(common.size()),
                       static_cast<int>(common_edges.size())};
}

// Density-and-size score of an overlap subgraph:
//   e / (n * (n - 1)) * n^lambda
inline double structural_coefficient(int node_count, int edge_count,
                                     double lambda) {
  if (node_count < 2) {
    throw ContractError("structural_coefficient: node_count " +
                        std::to_string(node_count) + " < 2");
  }
  if (edge_count < 1) {
    throw ContractError("structural_coefficient: edge_count " +
                        std::to_string(edge_count) + " < 1");
  }
  if (lambda <= 0.0) {
    throw ContractError("structural_coefficient: lambda must be positive");
  }
  const double n = static_cast<double>(node_count);
  return static_cast<double>(edge_count) / (n * (n - 1.0)) *
         std::pow(n, lambda);
}

// Per-graph coefficient matrix, supported on the adjacency. Rows of the
// normalized view sum to 1 over each node's neighbors; degree-0 rows are
// empty.
struct StructuralCoefficients {
  int num_nodes = 0;
  double lambda = 1.0;
  // row v holds (u, value) for every neighbor u of v, sorted by u.
  std::vector<std::vector<std::pair<int, double>>> raw;
  std::vector<std::vector<std::pair<int, double>>> normalized;

  // Dense row-major n*n view of the normalized matrix, zeros off-support.
  std::vector<double> dense_normalized() const {
    std::vector<double> out(static_cast<std::size_t>(num_nodes) * num_nodes,
                            0.0);
    for (int v = 0; v < num_nodes; ++v) {
      for (const auto& [u, w] : normalized[v]) {
        out[static_cast<std::size_t>(v) * num_nodes + u] = w;
      }
    }
    return out;
  }
};

inline StructuralCoefficients structural_matrix(const Graph& g,
                                                double lambda) {
  if (lambda <= 0.0) {
    throw ContractError("structural_matrix: lambda must be positive");
  }
  StructuralCoefficients sc;
  sc.num_nodes = g.num_nodes;
  sc.lambda = lambda;
  sc.raw.resize(g.num_nodes);
  sc.normalized.resize(g.num_nodes);
  // w is symmetric in (v, u); compute once per edge.
  for (const auto& [v, u] : g.edges) {
    const SubgraphCount c = overlap_subgraph(g, v, u);
    const double w = structural_coefficient(c.node_count, c.edge_count,
                                            lambda);
    sc.raw[v].emplace_back(u, w);
    sc.raw[u].emplace_back(v, w);
  }
  for (int v = 0; v < g.num_nodes; ++v) {
    std::sort(sc.raw[v].begin(), sc.raw[v].end());
    double row_sum = 0.0;
    for (const auto& [u, w] : sc.raw[v]) row_sum += w;
    sc.normalized[v].reserve(sc.raw[v].size());
    for (const auto& [u, w] : sc.raw[v]) {
      sc.normalized[v].emplace_back(u, w / row_sum);
    }
  }
  return sc;
}

}  // namespace topocl
