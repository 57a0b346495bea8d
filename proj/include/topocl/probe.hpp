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
#include <vector>

#include "topocl/dataset.hpp"
#include "topocl/nn.hpp"

namespace topocl {

// Embeds every graph with no augmentation; row order matches the dataset.
inline std::vector<std::vector<double>> embed_dataset(
    const ModelParams& params, const DatasetBundle& data) {
  std::vector<std::vector<double>> rows;
  rows.reserve(data.graphs.size());
  Tape tape;
  for (const auto& g : data.graphs) {
    EncodeOut e = encode(tape, g, params.encoder);
    rows.push_back(e.z->value);
    tape.clear();
  }
  return rows;
}

struct ProbeResult {
  std::vector<double> fold_accuracies;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation over folds
};

namespace detail {

// Multinomial logistic regression fit by full-batch gradient descent on
// z-scored features. Deliberately solver-free and deterministic.
class LogisticProbe {
 public:
  void fit(const std::vector<std::vector<double>>& x,
           const std::vector<int>& y, int classes, int iterations = 300,
           double lr = 0.5, double l2 = 1e-3) {
    const std::size_t n = x.size();
    dim_ = x[0].size();
    classes_ = classes;
    mean_.assign(dim_, 0.0);
    scale_.assign(dim_, 0.0);
    for (const auto& row : x) {
      for (std::size_t j = 0; j < dim_; ++j) mean_[j] += row[j];
    }
    for (double& m : mean_) m /= static_cast<double>(n);
    for (const auto& row : x) {
      for (std::size_t j = 0; j < dim_; ++j) {
        const double d = row[j] - mean_[j];
        scale_[j] += d * d;
      }
    }
    for (double& s : scale_) {
      s = std::sqrt(s / static_cast<double>(n));
      if (s < 1e-12) s = 1.0;
    }

    w_.assign(static_cast<std::size_t>(classes_) * (dim_ + 1), 0.0);
    std::vector<double> grad(w_.size());
    std::vector<double> logits(classes_);
    for (int it = 0; it < iterations; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        softmax_row(x[i], logits);
        for (int c = 0; c < classes_; ++c) {
          const double err =
              logits[c] - (c == y[i] ? 1.0 : 0.0);
          double* grow = &grad[static_cast<std::size_t>(c) * (dim_ + 1)];
          for (std::size_t j = 0; j < dim_; ++j) {
            grow[j] += err * standardized(x[i], j);
          }
          grow[dim_] += err;  // bias
        }
      }
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t k = 0; k < w_.size(); ++k) {
        w_[k] -= lr * (grad[k] * inv_n + l2 * w_[k]);
      }
    }
  }

  int predict(const std::vector<double>& row) const {
    std::vector<double> logits(classes_);
    softmax_row(row, logits);
    return static_cast<int>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
  }

 private:
  double standardized(const std::vector<double>& row, std::size_t j) const {
    return (row[j] - mean_[j]) / scale_[j];
  }

  void softmax_row(const std::vector<double>& row,
                   std::vector<double>& out) const {
    for (int c = 0; c < classes_; ++c) {
      const double* wrow = &w_[static_cast<std::size_t>(c) * (dim_ + 1)];
      double z = wrow[dim_];
      for (std::size_t j = 0; j < dim_; ++j) {
        z += wrow[j] * standardized(row, j);
      }
      out[c] = z;
    }
    const double zmax = *std::max_element(out.begin(), out.end());
    double total = 0.0;
    for (double& z : out) {
      z = std::exp(z - zmax);
      total += z;
    }
    for (double& z : out) z /= total;
  }

  std::size_t dim_ = 0;
  int classes_ = 0;
  std::vector<double> mean_, scale_, w_;
};

// Stratified fold assignment: shuffle within each class, deal round-robin.
inline std::vector<int> stratified_folds(const std::vector<int>& labels,
                                         int classes, int folds,
                                         RngStream& rng) {
  std::vector<int> fold_of(labels.size(), -1);
  for (int c = 0; c < classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    rng.shuffle(members);
    for (std::size_t k = 0; k < members.size(); ++k) {
      fold_of[members[k]] = static_cast<int>(k % folds);
    }
  }
  return fold_of;
}

}  // namespace detail

// Repeated stratified cross validation of a linear probe over frozen
// embeddings. Reports one held-out accuracy per (repeat, fold).
inline ProbeResult linear_probe_cv(
    const std::vector<std::vector<double>>& embeddings,
    const std::vector<int>& labels, int folds, int repeats,
    std::uint64_t seed) {
  if (embeddings.size() != labels.size() || embeddings.empty()) {
    throw ProbeError("linear_probe_cv: embeddings/labels size mismatch");
  }
  if (folds < 2) throw ProbeError("linear_probe_cv: folds must be >= 2");
  if (repeats < 1) throw ProbeError("linear_probe_cv: repeats must be >= 1");
  int classes = 0;
  for (int y : labels) {
    if (y < 0) throw ProbeError("linear_probe_cv: negative label");
    classes = std::max(classes, y + 1);
  }
  {
    std::vector<char> seen(classes, 0);
    for (int y : labels) seen[y] = 1;
    int distinct = 0;
    for (char s : seen) distinct += s;
    if (distinct < 2) {
      throw ProbeError("linear_probe_cv: need at least two classes");
    }
  }

  ProbeResult result;
  for (int rep = 0; rep < repeats; ++rep) {
    RngStream rng = derive_stream(seed, "probe-repeat-" +
                                            std::to_string(rep));
    const auto fold_of =
        detail::stratified_folds(labels, classes, folds, rng);
    for (int f = 0; f < folds; ++f) {
      std::vector<std::vector<double>> train_x, test_x;
      std::vector<int> train_y, test_y;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (fold_of[i] == f) {
          test_x.push_back(embeddings[i]);
          test_y.push_back(labels[i]);
        } else {
          train_x.push_back(embeddings[i]);
          train_y.push_back(labels[i]);
        }
      }
      if (test_x.empty() || train_x.empty()) {
        throw ProbeError("linear_probe_cv: empty fold " + std::to_string(f));
      }
      detail::LogisticProbe probe;
      probe.fit(train_x, train_y, classes);
      int correct = 0;
      for (std::size_t i = 0; i < test_x.size(); ++i) {
        if (probe.predict(test_x[i]) == test_y[i]) ++correct;
      }
      result.fold_accuracies.push_back(static_cast<double>(correct) /
                                       static_cast<double>(test_x.size()));
    }
  }
  double sum = 0.0;
  for (double a : result.fold_accuracies) sum += a;
  result.mean = sum / static_cast<double>(result.fold_accuracies.size());
  double var = 0.0;
  for (double a : result.fold_accuracies) {
    var += (a - result.mean) * (a - result.mean);
  }
  result.stddev =
      std::sqrt(var / static_cast<double>(result.fold_accuracies.size()));
  return result;
}

inline std::vector<int> dataset_labels(const DatasetBundle& data) {
  std::vector<int> labels;
  labels.reserve(data.graphs.size());
  for (const auto& g : data.graphs) {
    labels.push_back(g.graph_label.value_or(0));
  }
  return labels;
}

}  // namespace topocl
