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
#include <vector>

#include "topocl/tensor.hpp"

namespace topocl {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moment buffers are keyed by position in the
// parameter list, which must stay stable across steps.
struct AdamState {
  AdamConfig cfg;
  long step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  explicit AdamState(AdamConfig cfg = {}) : cfg(cfg) {}
};

inline void adam_step(std::vector<Tensor>& params, AdamState& state) {
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i]->size(), 0.0);
      state.v[i].assign(params[i]->size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw ContractError("adam_step: parameter list size changed");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.cfg.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.cfg.beta2, state.step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    if (state.m[i].size() != p->size()) {
      throw DimensionError("adam_step: moment size " +
                           std::to_string(state.m[i].size()) +
                           " vs parameter " + p->shape_str());
    }
    p->ensure_grad();
    for (std::size_t j = 0; j < p->size(); ++j) {
      const double g = p->grad[j];
      state.m[i][j] = state.cfg.beta1 * state.m[i][j] +
                      (1.0 - state.cfg.beta1) * g;
      state.v[i][j] = state.cfg.beta2 * state.v[i][j] +
                      (1.0 - state.cfg.beta2) * g * g;
      const double mhat = state.m[i][j] / bc1;
      const double vhat = state.v[i][j] / bc2;
      p->value[j] -= state.cfg.lr * mhat / (std::sqrt(vhat) + state.cfg.eps);
    }
  }
}

inline void zero_grads(std::vector<Tensor>& params) {
  for (auto& p : params) p->zero_grad();
}

}  // namespace topocl
