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

#include <string>
#include <vector>

#include "topocl/tensor.hpp"

namespace topocl {

// Normalized temperature-scaled cross entropy over cosine similarities.
// Rows of zi and zj are projected embeddings of the two views, aligned so
// row n of both comes from the same source graph. The denominator for row
// n runs over cross-view negatives z_j[n'] with n' != n only.
inline Tensor nt_xent(Tape& tape, const Tensor& zi, const Tensor& zj,
                      double tau) {
  if (zi->rows != zj->rows || zi->cols != zj->cols) {
    throw DimensionError("nt_xent: shape " + zi->shape_str() + " vs " +
                         zj->shape_str());
  }
  if (zi->rows < 2) {
    throw ContractError("nt_xent: batch size " + std::to_string(zi->rows) +
                        " < 2, no negatives exist");
  }
  if (tau <= 0.0) throw ContractError("nt_xent: tau must be positive");

  const auto check_rows = [](const Tensor& z, const char* side) {
    for (int i = 0; i < z->rows; ++i) {
      double norm2 = 0.0;
      for (int j = 0; j < z->cols; ++j) {
        const double x = z->value[static_cast<std::size_t>(i) * z->cols + j];
        norm2 += x * x;
      }
      if (norm2 <= 0.0) {
        throw NumericError(std::string("nt_xent: zero-norm ") + side +
                           " row " + std::to_string(i));
      }
    }
  };
  check_rows(zi, "view-1");
  check_rows(zj, "view-2");

  // Row-normalize: x / ||x||, with ||x||^-1 = exp(-0.5 log ||x||^2).
  const auto normalize = [&tape](const Tensor& z) {
    Tensor norm2 = ops::row_sum(tape, ops::square(tape, z));
    Tensor inv = ops::exp(tape, ops::scalar_mul(tape, ops::log(tape, norm2),
                                                -0.5));
    return ops::rows_scale(tape, z, inv);
  };
  Tensor ni = normalize(zi);
  Tensor nj = normalize(zj);

  // S[n][n'] = sim(zi_n, zj_n') / tau. Positives sit on the diagonal.
  Tensor sims = ops::scalar_mul(
      tape, ops::matmul(tape, ni, ops::transpose(tape, nj)), 1.0 / tau);
  Tensor pos = ops::take_diag(tape, sims);
  Tensor expd = ops::exp(tape, sims);
  Tensor denom = ops::elementwise_sub(tape, ops::row_sum(tape, expd),
                                      ops::take_diag(tape, expd));
  Tensor per_row = ops::elementwise_sub(tape, pos, ops::log(tape, denom));
  return ops::scalar_mul(tape, ops::mean_all(tape, per_row), -1.0);
}

// Mean squared error over aligned columns (graph-tier distillation).
inline Tensor mse_iso(Tape& tape, const Tensor& targets,
                      const Tensor& preds) {
  if (targets->rows != preds->rows || targets->cols != preds->cols) {
    throw ContractError("mse_iso: " + targets->shape_str() + " targets vs " +
                        preds->shape_str() + " predictions");
  }
  if (targets->size() < 1) throw ContractError("mse_iso: empty batch");
  return ops::mean_all(
      tape, ops::square(tape, ops::elementwise_sub(tape, targets, preds)));
}

// Per-graph mean over all n_g^2 entries, then mean over the batch. The
// two-level mean keeps large graphs from dominating the loss.
inline Tensor mse_subiso(Tape& tape, const std::vector<Tensor>& targets,
                         const std::vector<Tensor>& preds) {
  if (targets.size() != preds.size() || targets.empty()) {
    throw ContractError("mse_subiso: " + std::to_string(targets.size()) +
                        " targets vs " + std::to_string(preds.size()) +
                        " predictions");
  }
  Tensor total;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i]->rows != preds[i]->rows ||
        targets[i]->cols != preds[i]->cols) {
      throw ContractError("mse_subiso: shape mismatch at graph " +
                          std::to_string(i) + ": " +
                          targets[i]->shape_str() + " vs " +
                          preds[i]->shape_str());
    }
    Tensor term = ops::mean_all(
        tape,
        ops::square(tape, ops::elementwise_sub(tape, targets[i], preds[i])));
    total = total ? ops::add(tape, total, term) : term;
  }
  return ops::scalar_mul(tape, total,
                         1.0 / static_cast<double>(targets.size()));
}

struct LossBreakdown {
  double l_c = 0.0;
  double l_iso = 0.0;
  double l_subiso = 0.0;
  double total = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct TotalLoss {
  Tensor tensor;
  LossBreakdown parts;
};

// L = L_c + alpha * L_iso + beta * L_subiso.
inline TotalLoss total_loss(Tape& tape, const Tensor& l_c,
                            const Tensor& l_iso, const Tensor& l_subiso,
                            double alpha, double beta) {
  if (alpha < 0.0 || beta < 0.0) {
    throw ConfigError("loss coefficients must be non-negative");
  }
  TotalLoss out;
  out.tensor = ops::add(
      tape, l_c,
      ops::add(tape, ops::scalar_mul(tape, l_iso, alpha),
               ops::scalar_mul(tape, l_subiso, beta)));
  out.parts.l_c = l_c->scalar();
  out.parts.l_iso = l_iso->scalar();
  out.parts.l_subiso = l_subiso->scalar();
  out.parts.total = out.tensor->scalar();
  out.parts.alpha = alpha;
  out.parts.beta = beta;
  return out;
}

}  // namespace topocl
