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
#include <utility>
#include <vector>

#include "topocl/graph.hpp"
#include "topocl/tensor.hpp"

namespace topocl {

enum class Pooling { kSum, kMean };

inline std::string to_string(Pooling p) {
  return p == Pooling::kSum ? "sum" : "mean";
}

inline Pooling pooling_from_string(const std::string& s) {
  if (s == "sum") return Pooling::kSum;
  if (s == "mean") return Pooling::kMean;
  throw ConfigError("unknown pooling '" + s + "'");
}

// Two-layer perceptron x -> relu(x W1 + b1) W2 + b2.
struct Mlp2 {
  Tensor w1, b1, w2, b2;
};

// One message-passing layer: perceptron((1 + eps) * h_v + sum of
// neighbor h_u), relu inside the perceptron. eps is a learnable 1 x 1
// scalar.
struct GinLayer {
  Mlp2 mlp;
  Tensor eps;
};

struct EncoderParams {
  std::vector<GinLayer> layers;
  int input_dim = 0;
  int hidden_dim = 32;
  int embed_dim = 32;
  Pooling pooling = Pooling::kSum;

  int num_layers() const { return static_cast<int>(layers.size()); }
};

struct HeadParams {
  Mlp2 projection;    // embed -> embed -> embed
  Mlp2 iso;           // 2*embed -> embed -> 1, sigmoid applied outside
  Mlp2 subiso_inner;  // hidden -> w -> w, per node row
  Mlp2 subiso_outer;  // 1 -> w -> 1, shared elementwise scalar map
  int subiso_inner_dim = 16;
};

struct ModelParams {
  EncoderParams encoder;
  HeadParams heads;
};

struct ModelDims {
  int input_dim = 0;
  int layers = 3;
  int hidden_dim = 32;
  int embed_dim = 32;
  int subiso_inner_dim = 16;
  Pooling pooling = Pooling::kSum;
};

namespace detail {

// Glorot-uniform leaf.
inline Tensor glorot(int rows, int cols, RngStream& rng) {
  const double bound =
      std::sqrt(6.0 / (static_cast<double>(rows) + static_cast<double>(cols)));
  std::vector<double> values(static_cast<std::size_t>(rows) * cols);
  for (double& x : values) x = rng.uniform_real(-bound, bound);
  return make_tensor(rows, cols, std::move(values), /*requires_grad=*/true);
}

inline Mlp2 init_mlp2(int in, int hidden, int out, RngStream& rng) {
  Mlp2 mlp;
  mlp.w1 = glorot(in, hidden, rng);
  mlp.b1 = make_tensor(1, hidden, std::vector<double>(hidden, 0.0), true);
  mlp.w2 = glorot(hidden, out, rng);
  mlp.b2 = make_tensor(1, out, std::vector<double>(out, 0.0), true);
  return mlp;
}

inline Tensor mlp2_forward(Tape& tape, const Tensor& x, const Mlp2& mlp) {
  Tensor h = ops::relu(
      tape, ops::add_rowvec(tape, ops::matmul(tape, x, mlp.w1), mlp.b1));
  return ops::add_rowvec(tape, ops::matmul(tape, h, mlp.w2), mlp.b2);
}

}  // namespace detail

inline ModelParams init_model(const ModelDims& dims, RngStream& rng) {
  if (dims.layers < 1) throw ConfigError("encoder needs at least one layer");
  if (dims.input_dim < 1) throw ConfigError("input dimension must be >= 1");
  ModelParams p;
  p.encoder.input_dim = dims.input_dim;
  p.encoder.hidden_dim = dims.hidden_dim;
  p.encoder.embed_dim = dims.embed_dim;
  p.encoder.pooling = dims.pooling;
  for (int l = 0; l < dims.layers; ++l) {
    const int in = l == 0 ? dims.input_dim : dims.hidden_dim;
    const int out = l == dims.layers - 1 ? dims.embed_dim : dims.hidden_dim;
    GinLayer layer;
    layer.mlp = detail::init_mlp2(in, dims.hidden_dim, out, rng);
    layer.eps = make_scalar(0.0, true);
    p.encoder.layers.push_back(std::move(layer));
  }
  p.heads.projection = detail::init_mlp2(dims.embed_dim, dims.embed_dim,
                                         dims.embed_dim, rng);
  p.heads.iso =
      detail::init_mlp2(2 * dims.embed_dim, dims.embed_dim, 1, rng);
  p.heads.subiso_inner = detail::init_mlp2(
      dims.hidden_dim, dims.subiso_inner_dim, dims.subiso_inner_dim, rng);
  p.heads.subiso_outer =
      detail::init_mlp2(1, dims.subiso_inner_dim, 1, rng);
  p.heads.subiso_inner_dim = dims.subiso_inner_dim;
  return p;
}

inline ModelDims dims_of(const ModelParams& p) {
  ModelDims d;
  d.input_dim = p.encoder.input_dim;
  d.layers = p.encoder.num_layers();
  d.hidden_dim = p.encoder.hidden_dim;
  d.embed_dim = p.encoder.embed_dim;
  d.subiso_inner_dim = p.heads.subiso_inner_dim;
  d.pooling = p.encoder.pooling;
  return d;
}

// Stable (name, tensor) listing of every trainable parameter. The order
// defines the checkpoint layout and the Adam moment alignment.
inline std::vector<std::pair<std::string, Tensor>> named_parameters(
    const ModelParams& p) {
  std::vector<std::pair<std::string, Tensor>> out;
  const auto add_mlp = [&out](const std::string& prefix, const Mlp2& mlp) {
    out.emplace_back(prefix + ".w1", mlp.w1);
    out.emplace_back(prefix + ".b1", mlp.b1);
    out.emplace_back(prefix + ".w2", mlp.w2);
    out.emplace_back(prefix + ".b2", mlp.b2);
  };
  for (int l = 0; l < p.encoder.num_layers(); ++l) {
    const std::string prefix = "encoder.layer" + std::to_string(l);
    add_mlp(prefix, p.encoder.layers[l].mlp);
    out.emplace_back(prefix + ".eps", p.encoder.layers[l].eps);
  }
  add_mlp("heads.projection", p.heads.projection);
  add_mlp("heads.iso", p.heads.iso);
  add_mlp("heads.subiso_inner", p.heads.subiso_inner);
  add_mlp("heads.subiso_outer", p.heads.subiso_outer);
  return out;
}

inline std::vector<Tensor> parameter_tensors(const ModelParams& p) {
  std::vector<Tensor> out;
  for (auto& [name, t] : named_parameters(p)) out.push_back(t);
  return out;
}

struct EncodeOut {
  Tensor z;   // 1 x embed, pooled graph embedding
  Tensor h1;  // n x hidden, node matrix after the first layer
};

// GIN encoder forward pass. Returns the pooled final-layer embedding and
// the first-layer node matrix used by the subgraph-tier head.
inline EncodeOut encode(Tape& tape, const Graph& g, const EncoderParams& p) {
  if (g.num_nodes == 0) throw ContractError("encode: empty graph");
  if (!g.has_features()) throw ContractError("encode: graph has no features");
  const int n = g.num_nodes;
  const int in_dim = static_cast<int>(g.node_features[0].size());
  if (in_dim != p.input_dim) {
    throw DimensionError("encode: feature dimension " +
                         std::to_string(in_dim) + " vs encoder input " +
                         std::to_string(p.input_dim));
  }
  std::vector<double> feats;
  feats.reserve(static_cast<std::size_t>(n) * in_dim);
  for (const auto& row : g.node_features) {
    feats.insert(feats.end(), row.begin(), row.end());
  }
  Tensor h = make_tensor(n, in_dim, std::move(feats));

  // Dense adjacency as a constant; A h gives the neighbor sums.
  std::vector<double> adj(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& [u, v] : g.edges) {
    adj[static_cast<std::size_t>(u) * n + v] = 1.0;
    adj[static_cast<std::size_t>(v) * n + u] = 1.0;
  }
  Tensor a = make_tensor(n, n, std::move(adj));

  Tensor h1;
  const Tensor one = make_scalar(1.0);
  for (int l = 0; l < p.num_layers(); ++l) {
    const GinLayer& layer = p.layers[l];
    Tensor self_scale = ops::add(tape, one, layer.eps);  // 1 + eps
    Tensor agg = ops::add(tape, ops::matmul(tape, a, h),
                          ops::mul_scalar_tensor(tape, h, self_scale));
    h = detail::mlp2_forward(tape, agg, layer.mlp);
    if (l == 0) h1 = h;
  }

  Tensor pool = ops::matmul(tape, make_constant(1, n, 1.0), h);
  if (p.pooling == Pooling::kMean) {
    pool = ops::scalar_mul(tape, pool, 1.0 / static_cast<double>(n));
  }
  return EncodeOut{pool, h1};
}

// Projection head applied before the contrastive loss. Works on a single
// 1 x embed row or a batched N x embed matrix.
inline Tensor project(Tape& tape, const Tensor& z, const HeadParams& heads) {
  return detail::mlp2_forward(tape, z, heads.projection);
}

// Graph-tier prediction: sigmoid(MLP([z_i ; z_j])), concatenated in the
// fixed (first view, second view) order. Batched over rows.
inline Tensor predict_iso(Tape& tape, const Tensor& zi, const Tensor& zj,
                          const HeadParams& heads) {
  if (zi->cols != zj->cols || zi->rows != zj->rows) {
    throw DimensionError("predict_iso: shape " + zi->shape_str() + " vs " +
                         zj->shape_str());
  }
  Tensor cat = ops::concat_cols(tape, zi, zj);
  return ops::sigmoid(tape, detail::mlp2_forward(tape, cat, heads.iso));
}

// Autocorrelation (Gram) matrix X X^T over node rows.
inline Tensor autocor(Tape& tape, const Tensor& x) {
  return ops::matmul(tape, x, ops::transpose(tape, x));
}

// Subgraph-tier prediction: the first-layer node matrix goes through a
// per-node perceptron, the Gram matrix, and a shared scalar perceptron
// with sigmoid. The scalar map keeps the head well-defined for any node
// count.
inline Tensor predict_subiso(Tape& tape, const Tensor& h,
                             const HeadParams& heads) {
  Tensor mapped = detail::mlp2_forward(tape, h, heads.subiso_inner);
  Tensor gram = autocor(tape, mapped);  // n x n
  const int n = gram->rows;
  Tensor flat = ops::reshape(tape, gram, n * n, 1);
  Tensor scored = detail::mlp2_forward(tape, flat, heads.subiso_outer);
  return ops::sigmoid(tape, ops::reshape(tape, scored, n, n));
}

}  // namespace topocl
