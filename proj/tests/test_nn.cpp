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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "topocl/nn.hpp"
#include "topocl/wl.hpp"

#include "support/fixtures.hpp"

using namespace topocl;

namespace {

ModelDims small_dims(int input_dim, int layers = 2, int hidden = 4,
                     int embed = 4) {
  ModelDims d;
  d.input_dim = input_dim;
  d.layers = layers;
  d.hidden_dim = hidden;
  d.embed_dim = embed;
  d.subiso_inner_dim = 3;
  return d;
}

Graph random_featured_graph(RngStream& rng, int n, double p, int vocab) {
  std::vector<Edge> edges;
  std::vector<int> labels(n);
  for (int& l : labels) l = static_cast<int>(rng.uniform_index(vocab));
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.uniform_real() < p) edges.emplace_back(u, v);
    }
  }
  return fixtures::with_one_hot_features(make_graph(n, edges, labels),
                                         vocab);
}

// Plain-double replica of the two-layer perceptron plus relu, used as an
// independent check of the encoder on an isolated node.
std::vector<double> manual_mlp2_relu(const std::vector<double>& x,
                                     const Mlp2& mlp) {
  const auto matvec = [](const std::vector<double>& v, const Tensor& w,
                         const Tensor& b) {
    std::vector<double> out(w->cols, 0.0);
    for (int j = 0; j < w->cols; ++j) {
      double acc = b->value[j];
      for (int i = 0; i < w->rows; ++i) {
        acc += v[i] * w->value[static_cast<std::size_t>(i) * w->cols + j];
      }
      out[j] = acc;
    }
    return out;
  };
  std::vector<double> h = matvec(x, mlp.w1, mlp.b1);
  for (double& v : h) v = std::max(0.0, v);
  std::vector<double> out = matvec(h, mlp.w2, mlp.b2);
  for (double& v : out) v = std::max(0.0, v);
  return out;
}

}  // namespace

TEST_CASE("isolated node encodes to the perceptron image of its feature") {
  RngStream rng(3);
  ModelParams params = init_model(small_dims(3), rng);
  Graph lone = make_graph(1, {}, {1});
  lone.node_features = {{0.0, 1.0, 0.0}};
  Tape tape;
  const EncodeOut out = encode(tape, lone, params.encoder);
  // eps starts at zero, so aggregation is the bare feature; sum pooling
  // over one node is the identity.
  std::vector<double> h = lone.node_features[0];
  for (const auto& layer : params.encoder.layers) {
    h = manual_mlp2_relu(h, layer.mlp);
  }
  REQUIRE(out.z->cols == static_cast<int>(h.size()));
  for (std::size_t j = 0; j < h.size(); ++j) {
    CHECK(out.z->value[j] == Catch::Approx(h[j]).margin(1e-12));
  }
}

TEST_CASE("encoding is invariant to node permutation") {
  RngStream rng(5);
  ModelParams params = init_model(small_dims(3, 3), rng);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = random_featured_graph(rng, 7, 0.4, 3);
    std::vector<int> perm(7);
    for (int i = 0; i < 7; ++i) perm[i] = i;
    rng.shuffle(perm);
    const Graph pg = permute_graph(g, perm);
    Tape tape;
    const EncodeOut a = encode(tape, g, params.encoder);
    const EncodeOut b = encode(tape, pg, params.encoder);
    for (std::size_t j = 0; j < a.z->size(); ++j) {
      CHECK(a.z->value[j] == Catch::Approx(b.z->value[j]).margin(1e-9));
    }
    // H rows permute with the nodes: row i of pg-H equals row perm[i].
    const int hd = a.h1->cols;
    for (int i = 0; i < 7; ++i) {
      for (int j = 0; j < hd; ++j) {
        CHECK(b.h1->value[static_cast<std::size_t>(i) * hd + j] ==
              Catch::Approx(
                  a.h1->value[static_cast<std::size_t>(perm[i]) * hd + j])
                  .margin(1e-9));
      }
    }
  }
}

TEST_CASE("zero weights produce a zero embedding") {
  RngStream rng(7);
  ModelParams params = init_model(small_dims(2), rng);
  for (auto& [name, t] : named_parameters(params)) {
    std::fill(t->value.begin(), t->value.end(), 0.0);
  }
  Graph g = fixtures::with_one_hot_features(fixtures::triangle(), 2);
  Tape tape;
  const EncodeOut out = encode(tape, g, params.encoder);
  for (double v : out.z->value) CHECK(v == 0.0);
}

TEST_CASE("feature dimension mismatches are rejected") {
  RngStream rng(9);
  ModelParams params = init_model(small_dims(3), rng);
  Graph g = fixtures::with_one_hot_features(fixtures::triangle(), 2);
  Tape tape;
  CHECK_THROWS_AS(encode(tape, g, params.encoder), DimensionError);
}

TEST_CASE("projection with identity weights is a relu pass-through") {
  RngStream rng(11);
  ModelParams params = init_model(small_dims(2, 2, 3, 3), rng);
  // identity w1/w2, zero bias
  for (Tensor w : {params.heads.projection.w1, params.heads.projection.w2}) {
    std::fill(w->value.begin(), w->value.end(), 0.0);
    for (int i = 0; i < w->rows; ++i) {
      w->value[static_cast<std::size_t>(i) * w->cols + i] = 1.0;
    }
  }
  for (Tensor b : {params.heads.projection.b1, params.heads.projection.b2}) {
    std::fill(b->value.begin(), b->value.end(), 0.0);
  }
  Tape tape;
  const Tensor z = make_tensor(2, 3, {1.0, -2.0, 0.5, -1.0, 4.0, -0.1});
  const Tensor p = project(tape, z, params.heads);
  CHECK(p->value == std::vector<double>{1.0, 0.0, 0.5, 0.0, 4.0, 0.0});
}

TEST_CASE("iso head: zero final layer gives one half, output in (0,1)") {
  RngStream rng(13);
  ModelParams params = init_model(small_dims(2), rng);
  Tape tape;
  const Tensor zi = make_tensor(2, 4, {1, 2, 3, 4, 5, 6, 7, 8});
  const Tensor zj = make_tensor(2, 4, {8, 7, 6, 5, 4, 3, 2, 1});
  SECTION("zero final layer") {
    std::fill(params.heads.iso.w2->value.begin(),
              params.heads.iso.w2->value.end(), 0.0);
    std::fill(params.heads.iso.b2->value.begin(),
              params.heads.iso.b2->value.end(), 0.0);
    const Tensor y = predict_iso(tape, zi, zj, params.heads);
    CHECK(y->value == std::vector<double>{0.5, 0.5});
  }
  SECTION("sigmoid range and view-order asymmetry") {
    const Tensor y = predict_iso(tape, zi, zj, params.heads);
    for (double v : y->value) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    const Tensor swapped = predict_iso(tape, zj, zi, params.heads);
    CHECK(y->value[0] != swapped->value[0]);
  }
  SECTION("width mismatch is a dimension error") {
    const Tensor bad = make_tensor(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK_THROWS_AS(predict_iso(tape, zi, bad, params.heads),
                    DimensionError);
  }
}

TEST_CASE("autocor is the Gram matrix") {
  Tape tape;
  SECTION("identity rows give the identity") {
    const Tensor x = make_tensor(2, 2, {1, 0, 0, 1});
    CHECK(autocor(tape, x)->value == std::vector<double>{1, 0, 0, 1});
  }
  SECTION("repeated rows give all ones") {
    const Tensor x = make_tensor(2, 2, {1, 0, 1, 0});
    CHECK(autocor(tape, x)->value == std::vector<double>{1, 1, 1, 1});
  }
  SECTION("symmetric and positive semidefinite") {
    RngStream rng(15);
    std::vector<double> vals(12);
    for (double& v : vals) v = rng.uniform_real(-1, 1);
    const Tensor x = make_tensor(4, 3, vals);
    const Tensor m = autocor(tape, x);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        CHECK(m->value[i * 4 + j] == Catch::Approx(m->value[j * 4 + i]));
      }
    }
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> v(4);
      for (double& x_ : v) x_ = rng.uniform_real(-1, 1);
      double quad = 0.0;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          quad += v[i] * m->value[i * 4 + j] * v[j];
        }
      }
      CHECK(quad >= -1e-12);
    }
  }
}

TEST_CASE("subiso head shape, range and equivariance") {
  RngStream rng(17);
  ModelParams params = init_model(small_dims(3, 2, 4, 4), rng);
  Tape tape;
  const int n = 5, d = 4;
  std::vector<double> hv(n * d);
  for (double& v : hv) v = rng.uniform_real(-1, 1);
  const Tensor h = make_tensor(n, d, hv);
  const Tensor y = predict_subiso(tape, h, params.heads);
  REQUIRE(y->rows == n);
  REQUIRE(y->cols == n);
  for (double v : y->value) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  SECTION("zero outer final layer gives all one half") {
    std::fill(params.heads.subiso_outer.w2->value.begin(),
              params.heads.subiso_outer.w2->value.end(), 0.0);
    const Tensor flat = predict_subiso(tape, h, params.heads);
    for (double v : flat->value) CHECK(v == 0.5);
  }
  SECTION("row permutation permutes rows and columns together") {
    std::vector<int> perm{3, 1, 4, 0, 2};
    std::vector<double> pv(n * d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        pv[static_cast<std::size_t>(i) * d + j] =
            hv[static_cast<std::size_t>(perm[i]) * d + j];
      }
    }
    const Tensor ph = make_tensor(n, d, pv);
    const Tensor py = predict_subiso(tape, ph, params.heads);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        CHECK(py->value[static_cast<std::size_t>(i) * n + j] ==
              Catch::Approx(
                  y->value[static_cast<std::size_t>(perm[i]) * n + perm[j]])
                  .margin(1e-12));
      }
    }
  }
  SECTION("gradient with respect to H matches finite differences") {
    const Tensor hh = make_tensor(3, d, std::vector<double>(3 * d, 0.3),
                                  true);
    for (std::size_t i = 0; i < hh->size(); ++i) {
      hh->value[i] = rng.uniform_real(-1, 1);
    }
    const auto forward = [&](Tape& t) {
      return ops::mean_all(
          t, ops::square(t, predict_subiso(t, hh, params.heads)));
    };
    Tape t0;
    Tensor loss = forward(t0);
    t0.backward(loss);
    const std::vector<double> analytic = hh->grad;
    double worst = 0.0;
    for (std::size_t i = 0; i < hh->size(); ++i) {
      const double saved = hh->value[i];
      const double step = 1e-5;
      hh->value[i] = saved + step;
      Tape tp;
      const double fp = forward(tp)->scalar();
      hh->value[i] = saved - step;
      Tape tm;
      const double fm = forward(tm)->scalar();
      hh->value[i] = saved;
      const double fd = (fp - fm) / (2 * step);
      worst = std::max(worst, std::fabs(fd - analytic[i]) /
                                  std::max({1.0, std::fabs(fd),
                                            std::fabs(analytic[i])}));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("encoder separates what the refinement expert separates") {
  // Triangle vs path have different refinement label sets; at least one
  // random initialization out of ten must tell their embeddings apart.
  const Graph tri = fixtures::with_one_hot_features(fixtures::triangle(), 1);
  const Graph path = fixtures::with_one_hot_features(fixtures::path3(), 1);
  REQUIRE(iso_similarity(tri, path, 2).value < 1.0);
  bool separated = false;
  for (std::uint64_t seed = 0; seed < 10 && !separated; ++seed) {
    RngStream rng(seed);
    ModelParams params = init_model(small_dims(1, 2), rng);
    Tape tape;
    const EncodeOut a = encode(tape, tri, params.encoder);
    const EncodeOut b = encode(tape, path, params.encoder);
    double dist = 0.0;
    for (std::size_t j = 0; j < a.z->size(); ++j) {
      dist += std::fabs(a.z->value[j] - b.z->value[j]);
    }
    separated = dist > 1e-6;
  }
  CHECK(separated);
}

TEST_CASE("named parameters enumerate a stable layout") {
  RngStream rng(19);
  ModelParams params = init_model(small_dims(3, 2), rng);
  const auto named = named_parameters(params);
  // 2 layers * (4 mlp tensors + eps) + 4 heads * 4 tensors
  REQUIRE(named.size() == 2 * 5 + 16);
  CHECK(named[0].first == "encoder.layer0.w1");
  CHECK(named[4].first == "encoder.layer0.eps");
  CHECK(named.back().first == "heads.subiso_outer.b2");
  for (const auto& [name, t] : named) {
    CHECK(t->requires_grad);
  }
}
