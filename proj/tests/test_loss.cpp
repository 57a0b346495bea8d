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

#include "topocl/loss.hpp"

#include "support/brute.hpp"

using namespace topocl;

namespace {

Tensor rows_tensor(const std::vector<std::vector<double>>& rows,
                   bool requires_grad = false) {
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows[0].size());
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return make_tensor(n, d, std::move(flat), requires_grad);
}

}  // namespace

TEST_CASE("contrastive loss on orthonormal aligned pairs is minus one") {
  Tape tape;
  const Tensor zi = rows_tensor({{1, 0}, {0, 1}});
  const Tensor zj = rows_tensor({{1, 0}, {0, 1}});
  CHECK(nt_xent(tape, zi, zj, 1.0)->scalar() ==
        Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("contrastive loss with identical rows is log(N-1)") {
  for (int n : {2, 3, 5}) {
    Tape tape;
    std::vector<std::vector<double>> rows(n, {0.3, -0.7, 0.2});
    const Tensor z = rows_tensor(rows);
    for (double tau : {0.5, 1.0, 2.0}) {
      CHECK(nt_xent(tape, z, z, tau)->scalar() ==
            Catch::Approx(std::log(n - 1.0)).margin(1e-12));
    }
  }
}

TEST_CASE("contrastive loss ignores positive row rescaling") {
  RngStream rng(3);
  Tape tape;
  std::vector<std::vector<double>> ri(3, std::vector<double>(4));
  std::vector<std::vector<double>> rj(3, std::vector<double>(4));
  for (auto* rows : {&ri, &rj}) {
    for (auto& r : *rows) {
      for (double& x : r) x = rng.uniform_real(-1, 1);
    }
  }
  const double base =
      nt_xent(tape, rows_tensor(ri), rows_tensor(rj), 0.5)->scalar();
  auto scaled = ri;
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    for (double& x : scaled[i]) x *= 3.7 * (static_cast<double>(i) + 0.5);
  }
  const double rescaled =
      nt_xent(tape, rows_tensor(scaled), rows_tensor(rj), 0.5)->scalar();
  CHECK(rescaled == Catch::Approx(base).margin(1e-12));
}

TEST_CASE("contrastive loss matches the naive double loop") {
  RngStream rng(11);
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::vector<double>> ri(n, std::vector<double>(5));
      std::vector<std::vector<double>> rj(n, std::vector<double>(5));
      for (auto* rows : {&ri, &rj}) {
        for (auto& r : *rows) {
          for (double& x : r) x = rng.uniform_real(-2, 2);
        }
      }
      for (double tau : {0.2, 0.5, 1.0}) {
        Tape tape;
        const double got =
            nt_xent(tape, rows_tensor(ri), rows_tensor(rj), tau)->scalar();
        const double want = brute::naive_nt_xent(ri, rj, tau);
        CHECK(got == Catch::Approx(want).margin(1e-12));
      }
    }
  }
}

TEST_CASE("contrastive loss drops when a positive pair aligns") {
  // 3-row batch; rotate zj row 0 toward zi row 0 and keep the rest fixed.
  const std::vector<std::vector<double>> zi{{1, 0}, {0, 1}, {0.7, 0.7}};
  const auto loss_at = [&](double angle) {
    Tape tape;
    const std::vector<std::vector<double>> zj{
        {std::cos(angle), std::sin(angle)}, {0.1, 0.9}, {0.6, 0.8}};
    return nt_xent(tape, rows_tensor(zi), rows_tensor(zj), 0.5)->scalar();
  };
  CHECK(loss_at(0.1) < loss_at(0.4));
  CHECK(loss_at(0.4) < loss_at(1.0));
}

TEST_CASE("contrastive loss contract errors") {
  Tape tape;
  const Tensor one_row = rows_tensor({{1, 0}});
  CHECK_THROWS_AS(nt_xent(tape, one_row, one_row, 0.5), ContractError);
  const Tensor with_zero = rows_tensor({{1, 0}, {0, 0}});
  const Tensor fine = rows_tensor({{1, 0}, {0, 1}});
  CHECK_THROWS_MATCHES(nt_xent(tape, with_zero, fine, 0.5), NumericError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("row 1")));
  CHECK_THROWS_AS(nt_xent(tape, fine, one_row, 0.5), DimensionError);
}

TEST_CASE("graph-tier mse") {
  Tape tape;
  SECTION("equal vectors give zero") {
    const Tensor t = rows_tensor({{0.3}, {0.8}});
    CHECK(mse_iso(tape, t, t)->scalar() == 0.0);
  }
  SECTION("hand values") {
    CHECK(mse_iso(tape, rows_tensor({{1.0}, {0.0}}),
                  rows_tensor({{0.0}, {1.0}}))
              ->scalar() == Catch::Approx(1.0).margin(0));
    CHECK(mse_iso(tape, rows_tensor({{0.5}}), rows_tensor({{0.25}}))
              ->scalar() == Catch::Approx(0.0625).margin(0));
  }
  SECTION("length mismatch") {
    CHECK_THROWS_AS(
        mse_iso(tape, rows_tensor({{1.0}}), rows_tensor({{1.0}, {2.0}})),
        ContractError);
  }
}

TEST_CASE("subgraph-tier mse") {
  Tape tape;
  SECTION("equal matrices give zero") {
    const Tensor t = make_tensor(2, 2, {0.5, 0.5, 0.5, 0.5});
    CHECK(mse_subiso(tape, {t}, {t})->scalar() == 0.0);
  }
  SECTION("single 2x2 all-half target against zero prediction") {
    const Tensor t = make_tensor(2, 2, {0.5, 0.5, 0.5, 0.5});
    const Tensor p = make_tensor(2, 2, {0.0, 0.0, 0.0, 0.0});
    CHECK(mse_subiso(tape, {t}, {p})->scalar() ==
          Catch::Approx(0.25).margin(0));
  }
  SECTION("batch term is the mean of per-graph means") {
    // per-graph terms 0.1 and 0.3
    const Tensor t1 = make_tensor(1, 1, {0.0});
    const Tensor p1 = make_tensor(1, 1, {std::sqrt(0.1)});
    const Tensor t2 = make_tensor(1, 1, {0.0});
    const Tensor p2 = make_tensor(1, 1, {std::sqrt(0.3)});
    CHECK(mse_subiso(tape, {t1, t2}, {p1, p2})->scalar() ==
          Catch::Approx(0.2).margin(1e-15));
  }
  SECTION("shape mismatch names the graph index") {
    const Tensor t1 = make_tensor(1, 1, {0.0});
    const Tensor t2 = make_tensor(2, 2, {0, 0, 0, 0});
    const Tensor p2 = make_tensor(1, 1, {0.0});
    CHECK_THROWS_MATCHES(
        mse_subiso(tape, {t1, t2}, {t1, p2}), ContractError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("graph 1")));
  }
}

TEST_CASE("combined objective") {
  Tape tape;
  SECTION("zero coefficients reduce to the contrastive term") {
    const TotalLoss out =
        total_loss(tape, make_scalar(0.37), make_scalar(5.0),
                   make_scalar(9.0), 0.0, 0.0);
    CHECK(out.parts.total == Catch::Approx(0.37).margin(1e-15));
  }
  SECTION("hand value at the strong-coefficient setting") {
    const TotalLoss out =
        total_loss(tape, make_scalar(1.0), make_scalar(0.5),
                   make_scalar(0.1), 10.0, 1000.0);
    CHECK(out.parts.total == Catch::Approx(106.0).margin(1e-12));
  }
  SECTION("all zeros") {
    const TotalLoss out = total_loss(tape, make_scalar(0.0),
                                     make_scalar(0.0), make_scalar(0.0),
                                     1.0, 1.0);
    CHECK(out.parts.total == 0.0);
  }
  SECTION("breakdown identity") {
    const TotalLoss out =
        total_loss(tape, make_scalar(0.123), make_scalar(0.456),
                   make_scalar(0.789), 3.0, 7.0);
    CHECK(out.parts.total ==
          Catch::Approx(out.parts.l_c + 3.0 * out.parts.l_iso +
                        7.0 * out.parts.l_subiso)
              .margin(1e-12));
  }
  SECTION("negative coefficients rejected") {
    CHECK_THROWS_AS(total_loss(tape, make_scalar(0), make_scalar(0),
                               make_scalar(0), -1.0, 0.0),
                    ConfigError);
  }
}

TEST_CASE("losses are non-negative and zero only at equality") {
  RngStream rng(31);
  Tape tape;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(3));
    std::vector<std::vector<double>> t(n, {0.0}), p(n, {0.0});
    bool equal = true;
    for (int i = 0; i < n; ++i) {
      t[i][0] = rng.uniform_real();
      p[i][0] = rng.uniform_real();
      if (t[i][0] != p[i][0]) equal = false;
    }
    const double value =
        mse_iso(tape, rows_tensor(t), rows_tensor(p))->scalar();
    CHECK(value >= 0.0);
    CHECK((value == 0.0) == equal);
  }
}

TEST_CASE("gradients flow through the combined objective") {
  RngStream rng(41);
  std::vector<double> vi(3 * 4), vj(3 * 4);
  for (double& x : vi) x = rng.uniform_real(-1, 1);
  for (double& x : vj) x = rng.uniform_real(-1, 1);
  const Tensor zi = make_tensor(3, 4, vi, true);
  const Tensor zj = make_tensor(3, 4, vj, true);
  const Tensor iso_t = make_tensor(3, 1, {0.2, 0.9, 0.5});
  const auto forward = [&](Tape& t) {
    const Tensor lc = nt_xent(t, zi, zj, 0.5);
    const Tensor pred = ops::sigmoid(t, ops::row_sum(t, zi));
    const Tensor liso = mse_iso(t, iso_t, pred);
    const Tensor sq =
        ops::sigmoid(t, ops::matmul(t, zj, ops::transpose(t, zj)));
    const Tensor lsub = mse_subiso(
        t, {make_tensor(sq->rows, sq->cols,
                        std::vector<double>(sq->size(), 0.25))},
        {sq});
    return total_loss(t, lc, liso, lsub, 10.0, 1000.0).tensor;
  };
  Tape tape;
  Tensor loss = forward(tape);
  tape.backward(loss);
  const std::vector<double> gi = zi->grad, gj = zj->grad;
  zi->zero_grad();
  zj->zero_grad();
  double worst = 0.0;
  const double step = 1e-5;
  for (Tensor z : {zi, zj}) {
    const std::vector<double>& analytic = (z == zi) ? gi : gj;
    for (std::size_t i = 0; i < z->size(); ++i) {
      const double saved = z->value[i];
      z->value[i] = saved + step;
      Tape tp;
      const double fp = forward(tp)->scalar();
      z->value[i] = saved - step;
      Tape tm;
      const double fm = forward(tm)->scalar();
      z->value[i] = saved;
      const double fd = (fp - fm) / (2 * step);
      worst = std::max(worst, std::fabs(fd - analytic[i]) /
                                  std::max({1.0, std::fabs(fd),
                                            std::fabs(analytic[i])}));
    }
  }
  CHECK(worst < 1e-4);
}
