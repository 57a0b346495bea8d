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
#include <string>
#include <vector>

#include "topocl/train.hpp"

namespace topocl {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double tolerance = 1e-4;
  std::size_t checked = 0;

  bool pass() const { return max_rel_err < tolerance; }
};

namespace detail {

inline std::vector<Graph> gradcheck_fixture_graphs() {
  // A 5-cycle and a labeled tree; small enough that finite differences
  // over every parameter stay cheap.
  Graph g1 = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}},
                        {0, 1, 0, 1, 2});
  Graph g2 = make_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {2, 5}},
                        {1, 0, 2, 0, 1, 2});
  const int vocab = 3;
  for (Graph* g : {&g1, &g2}) {
    g->node_features.assign(g->num_nodes, std::vector<double>(vocab, 0.0));
    for (int v = 0; v < g->num_nodes; ++v) {
      g->node_features[v][g->node_labels[v]] = 1.0;
    }
  }
  return {g1, g2};
}

}  // namespace detail

// Checks every parameter gradient of the combined training loss against
// central finite differences on a fixed 2-graph micro-batch. The views
// and expert targets are frozen before the sweep, so only the
// differentiable path varies.
inline GradCheckReport gradcheck(const TrainConfig& cfg,
                                 const std::vector<Graph>& base_graphs,
                                 double step = 1e-5) {
  if (base_graphs.size() < 2) {
    throw ContractError("gradcheck: need at least two graphs");
  }
  std::vector<double> mean_feature;
  {
    std::size_t count = 0;
    for (int k = 0; k < 2; ++k) {
      for (const auto& row : base_graphs[k].node_features) {
        if (mean_feature.empty()) mean_feature.assign(row.size(), 0.0);
        for (std::size_t j = 0; j < row.size(); ++j) {
          mean_feature[j] += row[j];
        }
        ++count;
      }
    }
    for (double& x : mean_feature) x /= static_cast<double>(count);
  }
  AugmentContext aug_ctx{mean_feature};
  RngStream aug_rng = derive_stream(cfg.seed, "gradcheck-augment");
  BatchViews views;
  for (int k = 0; k < 2; ++k) {
    views.view1.push_back(
        apply_augment(base_graphs[k], cfg.augment1, aug_ctx, aug_rng));
    views.view2.push_back(
        apply_augment(base_graphs[k], cfg.augment2, aug_ctx, aug_rng));
  }
  const BatchTargets targets =
      compute_batch_targets(views, cfg, WlInit::kNodeLabels);

  ModelDims dims;
  dims.input_dim =
      static_cast<int>(base_graphs[0].node_features[0].size());
  dims.layers = cfg.layers;
  dims.hidden_dim = cfg.hidden_dim;
  dims.embed_dim = cfg.embed_dim;
  dims.subiso_inner_dim = cfg.subiso_inner_dim;
  dims.pooling = cfg.pooling;
  RngStream init_rng = derive_stream(cfg.seed, "gradcheck-init");
  ModelParams model = init_model(dims, init_rng);

  const auto forward_value = [&]() {
    Tape tape;
    return batch_loss(tape, model, views, targets, cfg).loss.parts.total;
  };

  // Analytic pass.
  auto named = named_parameters(model);
  {
    Tape tape;
    BatchLossOut out = batch_loss(tape, model, views, targets, cfg);
    tape.backward(out.loss.tensor);
  }

  GradCheckReport report;
  for (auto& [name, t] : named) {
    t->ensure_grad();
    for (std::size_t i = 0; i < t->size(); ++i) {
      const double saved = t->value[i];
      t->value[i] = saved + step;
      const double f_plus = forward_value();
      t->value[i] = saved - step;
      const double f_minus = forward_value();
      t->value[i] = saved;
      const double fd = (f_plus - f_minus) / (2.0 * step);
      const double analytic = t->grad[i];
      const double denom =
          std::max({1.0, std::fabs(fd), std::fabs(analytic)});
      const double rel = std::fabs(analytic - fd) / denom;
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_param = name;
        report.worst_index = i;
      }
      ++report.checked;
    }
    t->zero_grad();
  }
  return report;
}

inline GradCheckReport gradcheck(const TrainConfig& cfg, double step = 1e-5) {
  return gradcheck(cfg, detail::gradcheck_fixture_graphs(), step);
}

}  // namespace topocl
