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
#include <cmath>
#include <string>
#include <vector>

#include "topocl/core.hpp"
#include "topocl/graph.hpp"

namespace topocl {

enum class AugmentKind {
  kIdentity,
  kNodeDrop,
  kEdgePerturb,
  kAttrMask,
  kSubgraph,
};

struct AugmentSpec {
  AugmentKind kind = AugmentKind::kNodeDrop;
  double ratio = 0.2;  // in [0, 1); ignored by identity
};

inline std::string to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::kIdentity: return "identity";
    case AugmentKind::kNodeDrop: return "node_drop";
    case AugmentKind::kEdgePerturb: return "edge_perturb";
    case AugmentKind::kAttrMask: return "attr_mask";
    case AugmentKind::kSubgraph: return "subgraph";
  }
  return "unknown";
}

inline AugmentKind augment_kind_from_string(const std::string& s) {
  if (s == "identity") return AugmentKind::kIdentity;
  if (s == "node_drop") return AugmentKind::kNodeDrop;
  if (s == "edge_perturb") return AugmentKind::kEdgePerturb;
  if (s == "attr_mask") return AugmentKind::kAttrMask;
  if (s == "subgraph") return AugmentKind::kSubgraph;
  throw ConfigError("unknown augmentation kind '" + s + "'");
}

namespace detail {

inline void check_ratio(double ratio) {
  if (ratio < 0.0 || ratio >= 1.0) {
    throw ContractError("augment ratio " + std::to_string(ratio) +
                        " outside [0, 1)");
  }
}

}  // namespace detail

// Deletes floor(ratio * n) uniformly chosen nodes (never all of them) and
// returns the induced subgraph with indices compacted.
inline Graph node_drop(const Graph& g, double ratio, RngStream& rng) {
  detail::check_ratio(ratio);
  if (g.num_nodes == 0) throw ContractError("node_drop: empty graph");
  std::size_t drop = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(g.num_nodes)));
  drop = std::min<std::size_t>(drop, g.num_nodes - 1);
  auto dropped = rng.sample_indices(g.num_nodes, drop);
  std::vector<char> gone(g.num_nodes, 0);
  for (std::size_t v : dropped) gone[v] = 1;
  std::vector<int> keep;
  keep.reserve(g.num_nodes - drop);
  for (int v = 0; v < g.num_nodes; ++v) {
    if (!gone[v]) keep.push_back(v);
  }
  return induced_subgraph(g, keep);
}

// Deletes floor(ratio * |E|) edges and inserts the same number of fresh
// non-self-loop edges, capped by the available non-edges. The node set is
// unchanged.
inline Graph edge_perturb(const Graph& g, double ratio, RngStream& rng) {
  detail::check_ratio(ratio);
  const std::size_t m = g.edges.size();
  const std::size_t k =
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(m)));
  const auto removed_idx = rng.sample_indices(m, k);
  std::vector<char> removed(m, 0);
  for (std::size_t i : removed_idx) removed[i] = 1;
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!removed[i]) edges.push_back(g.edges[i]);
  }
  // Candidate insertions: every non-edge of the original graph.
  std::vector<char> present(
      static_cast<std::size_t>(g.num_nodes) * g.num_nodes, 0);
  for (const auto& [u, v] : g.edges) {
    present[static_cast<std::size_t>(u) * g.num_nodes + v] = 1;
  }
  std::vector<Edge> non_edges;
  for (int u = 0; u < g.num_nodes; ++u) {
    for (int v = u + 1; v < g.num_nodes; ++v) {
      if (!present[static_cast<std::size_t>(u) * g.num_nodes + v]) {
        non_edges.emplace_back(u, v);
      }
    }
  }
  const std::size_t inserts = std::min(k, non_edges.size());
  for (std::size_t i : rng.sample_indices(non_edges.size(), inserts)) {
    edges.push_back(non_edges[i]);
  }
  return make_graph(g.num_nodes, std::move(edges), g.node_labels,
                    g.node_features, g.graph_label);
}

// Replaces the feature rows of floor(ratio * n) uniformly chosen nodes
// with the dataset mean feature vector. Topology is unchanged.
inline Graph attr_mask(const Graph& g, double ratio,
                       const std::vector<double>& mean_feature,
                       RngStream& rng) {
  detail::check_ratio(ratio);
  if (!g.has_features()) {
    throw ContractError("attr_mask: graph has no node features");
  }
  if (!g.node_features.empty() &&
      mean_feature.size() != g.node_features[0].size()) {
    throw DimensionError("attr_mask: mean feature dimension " +
                         std::to_string(mean_feature.size()) +
                         " != feature dimension " +
                         std::to_string(g.node_features[0].size()));
  }
  const std::size_t k = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(g.num_nodes)));
  auto masked = rng.sample_indices(g.num_nodes, k);
  auto features = g.node_features;
  for (std::size_t v : masked) features[v] = mean_feature;
  return make_graph(g.num_nodes, g.edges, g.node_labels, std::move(features),
                    g.graph_label);
}

// Random-walk subgraph: walk from a uniform start until
// ceil((1 - ratio) * n) distinct nodes are visited, restarting at a
// uniform visited node when stuck, then return the induced subgraph.
inline Graph subgraph_sample(const Graph& g, double ratio, RngStream& rng) {
  if (ratio <= 0.0 || ratio >= 1.0) {
    throw ContractError("subgraph_sample: ratio " + std::to_string(ratio) +
                        " outside (0, 1)");
  }
  if (g.num_nodes == 0) throw ContractError("subgraph_sample: empty graph");
  const std::size_t target = static_cast<std::size_t>(
      std::ceil((1.0 - ratio) * static_cast<double>(g.num_nodes)));
  std::vector<char> visited(g.num_nodes, 0);
  std::vector<int> order;  // visit order, doubles as the restart pool
  int cur = static_cast<int>(rng.uniform_index(g.num_nodes));
  visited[cur] = 1;
  order.push_back(cur);
  std::size_t idle_steps = 0;
  while (order.size() < target) {
    const auto& nbrs = g.adj[cur];
    if (nbrs.empty() || idle_steps > 4 * static_cast<std::size_t>(g.num_nodes)) {
      // Give up if no visited node can reach anything new (the component
      // is exhausted); otherwise restart the walk somewhere visited.
      bool expandable = false;
      for (int v : order) {
        for (int u : g.adj[v]) {
          if (!visited[u]) {
            expandable = true;
            break;
          }
        }
        if (expandable) break;
      }
      if (!expandable) break;
      cur = order[rng.uniform_index(order.size())];
      idle_steps = 0;
      continue;
    }
    cur = nbrs[rng.uniform_index(nbrs.size())];
    if (!visited[cur]) {
      visited[cur] = 1;
      order.push_back(cur);
      idle_steps = 0;
    } else {
      ++idle_steps;
    }
  }
  std::sort(order.begin(), order.end());
  return induced_subgraph(g, order);
}

// Dataset-level inputs some augmentations need.
struct AugmentContext {
  std::vector<double> mean_feature;
};

inline Graph apply_augment(const Graph& g, const AugmentSpec& spec,
                           const AugmentContext& ctx, RngStream& rng) {
  switch (spec.kind) {
    case AugmentKind::kIdentity: return g;
    case AugmentKind::kNodeDrop: return node_drop(g, spec.ratio, rng);
    case AugmentKind::kEdgePerturb: return edge_perturb(g, spec.ratio, rng);
    case AugmentKind::kAttrMask:
      return attr_mask(g, spec.ratio, ctx.mean_feature, rng);
    case AugmentKind::kSubgraph: return subgraph_sample(g, spec.ratio, rng);
  }
  throw ContractError("apply_augment: unknown kind");
}

}  // namespace topocl
