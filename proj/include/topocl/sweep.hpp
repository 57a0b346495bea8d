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

#include "topocl/probe.hpp"
#include "topocl/train.hpp"

namespace topocl {

struct SweepCell {
  double alpha = 0.0;
  double beta = 0.0;
  bool ok = false;
  std::string error;  // set when ok is false
  ProbeResult probe;
};

struct SweepResult {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<SweepCell> cells;  // row-major over (alpha, beta)

  const SweepCell& at(std::size_t ai, std::size_t bi) const {
    return cells[ai * betas.size() + bi];
  }
};

// Independent train+probe run per (alpha, beta) cell. Each cell derives
// its own seed, so a cell's result depends only on (alpha, beta, base
// seed). A failing cell is recorded and its siblings continue.
inline SweepResult sweep(const TrainConfig& base,
                         const std::vector<double>& alphas,
                         const std::vector<double>& betas,
                         const DatasetBundle& data, int folds = 10,
                         int repeats = 5, std::ostream* log = nullptr) {
  if (alphas.empty() || betas.empty()) {
    throw ConfigError("sweep: empty grid");
  }
  SweepResult result;
  result.alphas = alphas;
  result.betas = betas;
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
      SweepCell cell;
      cell.alpha = alphas[ai];
      cell.beta = betas[bi];
      try {
        TrainConfig cfg = base;
        cfg.alpha = alphas[ai];
        cfg.beta = betas[bi];
        TrainResult trained = train(cfg, data, log);
        const auto embeddings = embed_dataset(trained.params, data);
        cell.probe = linear_probe_cv(embeddings, dataset_labels(data), folds,
                                     repeats, cfg.seed);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
        if (log) {
          *log << "sweep cell (alpha=" << cell.alpha
               << ", beta=" << cell.beta << ") failed: " << e.what() << "\n";
        }
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

}  // namespace topocl
