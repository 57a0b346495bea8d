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

#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "topocl/graph.hpp"

namespace topocl {

// Which label sets feed the Jaccard coefficient: the final refinement
// round only, or the union over rounds 0..k (subtree-kernel convention).
enum class WlSetPolicy { kFinalIteration, kUnionAllIterations };

// Initial node labels: the dataset labels, or node degrees for datasets
// that ship without labels.
enum class WlInit { kNodeLabels, kDegree };

// Injective compression from refinement signatures to compact labels.
// Labels are handed out consecutively from 0 in first-encounter order, so
// refinement is deterministic given a fixed node iteration order. One
// table serves exactly one comparison; sharing it across the two graphs
// of a pair is what makes their labels comparable.
class WlLabelTable {
 public:
  // Signature of a refinement step: own label + sorted neighbor labels.
  int refine(int own_label, const std::vector<int>& sorted_neighbor_labels) {
    key_.clear();
    key_.push_back(1);  // distinct key space from seed()
    key_.push_back(own_label);
    key_.insert(key_.end(), sorted_neighbor_labels.begin(),
                sorted_neighbor_labels.end());
    return lookup_or_insert();
  }

  // Compresses a raw initial label into the same label space. Seeds live
  // in their own key space so an initial label can never alias the
  // signature of a later isolated-node refinement.
  int seed(int raw_label) {
    key_.clear();
    key_.push_back(0);
    key_.push_back(raw_label);
    return lookup_or_insert();
  }

  int size() const { return next_; }

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
      std::size_t h = 1469598103934665603ULL;
      for (int x : v) {
        h ^= static_cast<std::size_t>(x) + 0x9e3779b9 + (h << 6) + (h >> 2);
      }
      return h;
    }
  };

  int lookup_or_insert() {
    auto [it, inserted] = map_.try_emplace(key_, next_);
    if (inserted) ++next_;
    return it->second;
  }

  std::unordered_map<std::vector<int>, int, VecHash> map_;
  std::vector<int> key_;
  int next_ = 0;
};

// One refinement round over one or more graphs sharing a table. labels[k]
// holds the current labels of graphs[k]; the returned vector is the new
// labels in the same layout. Nodes are visited in canonical order: graph
// order, then node index.
inline std::vector<std::vector<int>> wl_refine_once(
    const std::vector<const Graph*>& graphs,
    const std::vector<std::vector<int>>& labels, WlLabelTable& table) {
  if (graphs.size() != labels.size()) {
    throw ContractError("wl_refine_once: graphs/labels count mismatch");
  }
  std::vector<std::vector<int>> next(labels.size());
  std::vector<int> nbr_labels;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const Graph& g = *graphs[k];
    if (static_cast<int>(labels[k].size()) != g.num_nodes) {
      throw ContractError("wl_refine_once: label sequence length mismatch");
    }
    next[k].resize(g.num_nodes);
    for (int v = 0; v < g.num_nodes; ++v) {
      nbr_labels.clear();
      for (int u : g.adj[v]) nbr_labels.push_back(labels[k][u]);
      std::sort(nbr_labels.begin(), nbr_labels.end());
      next[k][v] = table.refine(labels[k][v], nbr_labels);
    }
  }
  return next;
}

// Refinement history of one graph within a comparison.
struct WlResult {
  std::vector<std::vector<int>> per_iteration;  // [iter][node], iter 0 = seed
  std::set<int> label_set;                      // per the chosen policy
  int iterations = 0;
};

struct IsoSimilarity {
  double value = 0.0;  // in [0, 1]
};

namespace detail {

inline std::vector<int> initial_labels(const Graph& g, WlInit init) {
  if (init == WlInit::kDegree) {
    std::vector<int> labels(g.num_nodes);
    for (int v = 0; v < g.num_nodes; ++v) {
      labels[v] = static_cast<int>(g.adj[v].size());
    }
    return labels;
  }
  return g.node_labels;
}

inline void collect_label_set(WlResult& r, WlSetPolicy policy) {
  if (policy == WlSetPolicy::kFinalIteration) {
    r.label_set.insert(r.per_iteration.back().begin(),
                       r.per_iteration.back().end());
  } else {
    for (const auto& round : r.per_iteration) {
      r.label_set.insert(round.begin(), round.end());
    }
  }
}

}  // namespace detail

// Runs `iterations` refinement rounds over the pair with one fresh shared
// table and returns both histories.
inline std::pair<WlResult, WlResult> wl_refine_pair(
    const Graph& gi, const Graph& gj, int iterations,
    WlInit init = WlInit::kNodeLabels,
    WlSetPolicy policy = WlSetPolicy::kFinalIteration) {
  if (gi.num_nodes == 0 || gj.num_nodes == 0) {
    throw ContractError("wl_refine_pair: empty graph");
  }
  if (iterations < 1) {
    throw ContractError("wl_refine_pair: iterations must be >= 1");
  }
  WlLabelTable table;
  std::vector<std::vector<int>> labels{detail::initial_labels(gi, init),
                                       detail::initial_labels(gj, init)};
  for (auto& seq : labels) {
    for (int& lbl : seq) lbl = table.seed(lbl);
  }
  WlResult ri, rj;
  ri.iterations = rj.iterations = iterations;
  ri.per_iteration.push_back(labels[0]);
  rj.per_iteration.push_back(labels[1]);
  const std::vector<const Graph*> pair{&gi, &gj};
  for (int it = 0; it < iterations; ++it) {
    labels = wl_refine_once(pair, labels, table);
    ri.per_iteration.push_back(labels[0]);
    rj.per_iteration.push_back(labels[1]);
  }
  detail::collect_label_set(ri, policy);
  detail::collect_label_set(rj, policy);
  return {std::move(ri), std::move(rj)};
}

inline double jaccard(const std::set<int>& a, const std::set<int>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Graph-tier topology similarity: refinement label sets compared with the
// Jaccard coefficient. The iteration count should match the encoder depth.
inline IsoSimilarity iso_similarity(
    const Graph& gi, const Graph& gj, int iterations,
    WlInit init = WlInit::kNodeLabels,
    WlSetPolicy policy = WlSetPolicy::kFinalIteration) {
  const auto [ri, rj] = wl_refine_pair(gi, gj, iterations, init, policy);
  return IsoSimilarity{jaccard(ri.label_set, rj.label_set)};
}

}  // namespace topocl
