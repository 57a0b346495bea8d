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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "topocl/augment.hpp"
#include "topocl/config.hpp"
#include "topocl/dataset.hpp"
#include "topocl/loss.hpp"
#include "topocl/nn.hpp"
#include "topocl/optim.hpp"
#include "topocl/structural.hpp"
#include "topocl/wl.hpp"

namespace topocl {

struct MetricsRecord {
  int epoch = 0;
  double l_c = 0.0;
  double l_iso = 0.0;
  double l_subiso = 0.0;
  double total = 0.0;
  double seconds = 0.0;
  int steps = 0;  // optimizer steps this epoch; not serialized
};

// Two augmented views per batch graph.
struct BatchViews {
  std::vector<Graph> view1;
  std::vector<Graph> view2;
};

// Expert-system targets for one batch. Computed off-tape: these are data,
// not differentiable functions of the parameters.
struct BatchTargets {
  std::vector<double> y_iso;  // one per pair
  std::vector<std::vector<double>> y_subiso_v1;  // dense n x n per graph
  std::vector<int> subiso_n_v1;
  std::vector<std::vector<double>> y_subiso_v2;  // only with both_views
  std::vector<int> subiso_n_v2;
};

struct BatchLossOut {
  TotalLoss loss;
  // Constant leaves wrapping the expert targets, exposed so callers can
  // verify no gradient ever reaches them.
  Tensor iso_target;
  std::vector<Tensor> subiso_targets;
};

inline BatchTargets compute_batch_targets(const BatchViews& views,
                                          const TrainConfig& cfg,
                                          WlInit wl_init) {
  BatchTargets t;
  const std::size_t n = views.view1.size();
  t.y_iso.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.y_iso.push_back(iso_similarity(views.view1[i], views.view2[i],
                                     cfg.wl_iterations(), wl_init,
                                     cfg.wl_policy)
                          .value);
    t.y_subiso_v1.push_back(
        structural_matrix(views.view1[i], cfg.lambda).dense_normalized());
    t.subiso_n_v1.push_back(views.view1[i].num_nodes);
    if (cfg.subiso_both_views) {
      t.y_subiso_v2.push_back(
          structural_matrix(views.view2[i], cfg.lambda).dense_normalized());
      t.subiso_n_v2.push_back(views.view2[i].num_nodes);
    }
  }
  return t;
}

// Forward pass of one training step: encode both views, project, and
// combine the contrastive loss with the two distillation losses.
inline BatchLossOut batch_loss(Tape& tape, const ModelParams& params,
                               const BatchViews& views,
                               const BatchTargets& targets,
                               const TrainConfig& cfg) {
  const std::size_t n = views.view1.size();
  if (n < 2) throw ContractError("batch_loss: batch size < 2");
  std::vector<Tensor> z1_rows, z2_rows;
  std::vector<Tensor> h1_v1, h1_v2;
  z1_rows.reserve(n);
  z2_rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    EncodeOut e1 = encode(tape, views.view1[i], params.encoder);
    EncodeOut e2 = encode(tape, views.view2[i], params.encoder);
    z1_rows.push_back(e1.z);
    z2_rows.push_back(e2.z);
    h1_v1.push_back(e1.h1);
    if (cfg.subiso_both_views) h1_v2.push_back(e2.h1);
  }
  Tensor z1 = ops::concat_rows(tape, z1_rows);  // N x embed
  Tensor z2 = ops::concat_rows(tape, z2_rows);

  Tensor l_c = nt_xent(tape, project(tape, z1, params.heads),
                       project(tape, z2, params.heads), cfg.tau);

  BatchLossOut out;
  out.iso_target = make_tensor(static_cast<int>(n), 1, targets.y_iso);
  Tensor iso_pred = predict_iso(tape, z1, z2, params.heads);
  Tensor l_iso = mse_iso(tape, out.iso_target, iso_pred);

  std::vector<Tensor> subiso_preds;
  for (std::size_t i = 0; i < n; ++i) {
    const int ng = targets.subiso_n_v1[i];
    out.subiso_targets.push_back(
        make_tensor(ng, ng, targets.y_subiso_v1[i]));
    subiso_preds.push_back(predict_subiso(tape, h1_v1[i], params.heads));
  }
  if (cfg.subiso_both_views) {
    for (std::size_t i = 0; i < n; ++i) {
      const int ng = targets.subiso_n_v2[i];
      out.subiso_targets.push_back(
          make_tensor(ng, ng, targets.y_subiso_v2[i]));
      subiso_preds.push_back(predict_subiso(tape, h1_v2[i], params.heads));
    }
  }
  Tensor l_subiso = mse_subiso(tape, out.subiso_targets, subiso_preds);

  out.loss = total_loss(tape, l_c, l_iso, l_subiso, cfg.alpha, cfg.beta);
  return out;
}

struct TrainResult {
  ModelParams params;
  std::vector<MetricsRecord> metrics;
};

// Full training run. Per batch: augment each graph into two views, run
// both expert systems on the views, encode, combine the losses, and take
// one Adam step. Expertise is recomputed per batch because it depends on
// the augmented graphs. A trailing batch of size 1 is skipped (the
// contrastive loss has no negatives there).
inline TrainResult train(const TrainConfig& cfg, const DatasetBundle& data,
                         std::ostream* log = nullptr) {
  validate_config(cfg);
  if (data.graphs.empty()) throw ContractError("train: empty dataset");

  const int input_dim =
      data.graphs[0].has_features()
          ? static_cast<int>(data.graphs[0].node_features[0].size())
          : 0;
  if (input_dim == 0) throw ContractError("train: dataset has no features");

  ModelDims dims;
  dims.input_dim = input_dim;
  dims.layers = cfg.layers;
  dims.hidden_dim = cfg.hidden_dim;
  dims.embed_dim = cfg.embed_dim;
  dims.subiso_inner_dim = cfg.subiso_inner_dim;
  dims.pooling = cfg.pooling;

  RngStream init_rng = derive_stream(cfg.seed, "init");
  RngStream shuffle_rng = derive_stream(cfg.seed, "shuffle");
  RngStream aug_rng1 = derive_stream(cfg.seed, "augment-view1");
  RngStream aug_rng2 = derive_stream(cfg.seed, "augment-view2");

  TrainResult result;
  result.params = init_model(dims, init_rng);
  std::vector<Tensor> params = parameter_tensors(result.params);
  AdamState adam{AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8}};

  const WlInit wl_init =
      data.has_node_labels ? WlInit::kNodeLabels : WlInit::kDegree;
  AugmentContext aug_ctx{data.mean_feature};

  std::vector<std::size_t> order(data.graphs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Tape tape;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);
    double sum_c = 0, sum_iso = 0, sum_sub = 0, sum_total = 0;
    int steps = 0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + cfg.batch_size);
      if (end - start < 2) {
        if (log) {
          *log << "notice: skipping size-" << (end - start)
               << " remainder batch in epoch " << epoch << "\n";
        }
        continue;
      }
      BatchViews views;
      for (std::size_t i = start; i < end; ++i) {
        const Graph& g = data.graphs[order[i]];
        views.view1.push_back(apply_augment(g, cfg.augment1, aug_ctx,
                                            aug_rng1));
        views.view2.push_back(apply_augment(g, cfg.augment2, aug_ctx,
                                            aug_rng2));
      }
      const BatchTargets targets =
          compute_batch_targets(views, cfg, wl_init);
      BatchLossOut out = batch_loss(tape, result.params, views, targets,
                                    cfg);
      if (!std::isfinite(out.loss.parts.total)) {
        throw NumericError("non-finite loss in epoch " +
                           std::to_string(epoch) + ", batch starting at " +
                           std::to_string(start));
      }
      tape.backward(out.loss.tensor);
      adam_step(params, adam);
      zero_grads(params);
      tape.clear();

      sum_c += out.loss.parts.l_c;
      sum_iso += out.loss.parts.l_iso;
      sum_sub += out.loss.parts.l_subiso;
      sum_total += out.loss.parts.total;
      ++steps;
    }
    if (steps == 0) {
      throw ContractError("train: no usable batch (dataset smaller than 2?)");
    }
    MetricsRecord rec;
    rec.epoch = epoch;
    rec.l_c = sum_c / steps;
    rec.l_iso = sum_iso / steps;
    rec.l_subiso = sum_sub / steps;
    rec.total = sum_total / steps;
    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - epoch_start)
                      .count();
    rec.steps = steps;
    result.metrics.push_back(rec);
  }
  return result;
}

namespace detail {

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

// One record per line, fields exactly: epoch, l_c, l_iso, l_subiso,
// total, seconds.
inline void write_metrics(const std::vector<MetricsRecord>& metrics,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot write metrics " + path.string());
  for (const auto& r : metrics) {
    out << "{\"epoch\": " << r.epoch
        << ", \"l_c\": " << detail::format_double(r.l_c)
        << ", \"l_iso\": " << detail::format_double(r.l_iso)
        << ", \"l_subiso\": " << detail::format_double(r.l_subiso)
        << ", \"total\": " << detail::format_double(r.total)
        << ", \"seconds\": " << detail::format_double(r.seconds) << "}\n";
  }
}

inline std::vector<MetricsRecord> read_metrics(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open metrics " + path.string());
  std::vector<MetricsRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    MetricsRecord r;
    r.epoch = j.at("epoch").get<int>();
    r.l_c = j.at("l_c").get<double>();
    r.l_iso = j.at("l_iso").get<double>();
    r.l_subiso = j.at("l_subiso").get<double>();
    r.total = j.at("total").get<double>();
    r.seconds = j.at("seconds").get<double>();
    out.push_back(r);
  }
  return out;
}

}  // namespace topocl
