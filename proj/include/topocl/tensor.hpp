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
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "topocl/core.hpp"

namespace topocl {

// Dense double-precision matrix participating in reverse-mode
// differentiation. Rank is fixed at 2; vectors are n x 1 or 1 x d and
// scalars are 1 x 1. Gradients materialize lazily and accumulate across
// backward passes until explicitly zeroed.
struct TensorNode {
  int rows = 0;
  int cols = 0;
  std::vector<double> value;   // row-major, size rows * cols
  std::vector<double> grad;    // empty until first accumulation
  bool requires_grad = false;  // set on leaves the optimizer owns
  bool needs_grad = false;     // requires_grad or downstream of one
  // Propagates this node's grad to its parents. Unset on leaves and on
  // branches with no differentiable ancestor. Captures the node itself
  // only through a raw pointer; the closure's lifetime is the node's.
  std::function<void()> backward;
  std::vector<std::shared_ptr<TensorNode>> parents;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
  std::string shape_str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
  }
  double scalar() const {
    if (size() != 1) {
      throw ContractError("scalar(): tensor has shape " + shape_str());
    }
    return value[0];
  }
  void ensure_grad() {
    if (grad.empty()) grad.assign(size(), 0.0);
  }
  void zero_grad() { grad.clear(); }
};

using Tensor = std::shared_ptr<TensorNode>;

inline Tensor make_tensor(int rows, int cols, std::vector<double> value,
                          bool requires_grad = false) {
  if (rows <= 0 || cols <= 0) {
    throw ContractError("make_tensor: non-positive shape " +
                        std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (value.size() != static_cast<std::size_t>(rows) * cols) {
    throw DimensionError("make_tensor: " + std::to_string(value.size()) +
                         " values for shape " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  auto t = std::make_shared<TensorNode>();
  t->rows = rows;
  t->cols = cols;
  t->value = std::move(value);
  t->requires_grad = requires_grad;
  t->needs_grad = requires_grad;
  return t;
}

inline Tensor make_constant(int rows, int cols, double fill) {
  return make_tensor(
      rows, cols,
      std::vector<double>(static_cast<std::size_t>(rows) * cols, fill));
}

inline Tensor make_scalar(double x, bool requires_grad = false) {
  return make_tensor(1, 1, {x}, requires_grad);
}

// Records operations in creation order and replays them in reverse for
// backpropagation. One tape per training context; run backward at most
// once per recording, then clear() before the next step. Leaves are not
// recorded, so their accumulated gradients survive clear().
class Tape {
 public:
  void push(const Tensor& t) { nodes_.push_back(t); }

  // Accumulates d(loss)/d(p) into every tensor reachable from `loss` that
  // carries requires_grad.
  void backward(const Tensor& loss) {
    if (!loss) throw ContractError("backward: null loss");
    if (loss->size() != 1) {
      throw ContractError("backward: loss has shape " + loss->shape_str() +
                          ", expected 1x1");
    }
    if (nodes_.empty()) throw ContractError("backward: empty tape");
    loss->ensure_grad();
    loss->grad[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      if ((*it)->backward && !(*it)->grad.empty()) (*it)->backward();
    }
  }

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Tensor>& nodes() const { return nodes_; }

 private:
  std::vector<Tensor> nodes_;
};

namespace ops {

namespace detail {

inline void accum(const Tensor& t, std::size_t i, double dx) {
  if (!t->needs_grad) return;
  t->ensure_grad();
  t->grad[i] += dx;
}

inline Tensor result(Tape& tape, int rows, int cols,
                     std::vector<double> value, std::vector<Tensor> parents) {
  auto t = make_tensor(rows, cols, std::move(value));
  for (const auto& p : parents) {
    if (p->needs_grad) {
      t->needs_grad = true;
      break;
    }
  }
  t->parents = std::move(parents);
  tape.push(t);
  return t;
}

// Installs the backward closure without creating a shared_ptr cycle: the
// node reaches itself through a raw pointer only.
template <typename Fn>
void set_backward(const Tensor& c, Fn fn) {
  TensorNode* self = c.get();
  c->backward = [self, fn = std::move(fn)]() { fn(self); };
}

inline void require_same_shape(const Tensor& a, const Tensor& b,
                               const char* op) {
  if (a->rows != b->rows || a->cols != b->cols) {
    throw DimensionError(std::string(op) + ": shape " + a->shape_str() +
                         " vs " + b->shape_str());
  }
}

}  // namespace detail

inline Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a->cols != b->rows) {
    throw DimensionError("matmul: shape " + a->shape_str() + " vs " +
                         b->shape_str());
  }
  const int m = a->rows, k = a->cols, n = b->cols;
  std::vector<double> out(static_cast<std::size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      const double aip = a->value[static_cast<std::size_t>(i) * k + p];
      if (aip == 0.0) continue;
      const double* brow = &b->value[static_cast<std::size_t>(p) * n];
      double* orow = &out[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  Tensor c = detail::result(tape, m, n, std::move(out), {a, b});
  if (c->needs_grad) {
    detail::set_backward(c, [a, b, m, k, n](TensorNode* self) {
      if (a->needs_grad) {
        a->ensure_grad();
        for (int i = 0; i < m; ++i) {
          const double* grow = &self->grad[static_cast<std::size_t>(i) * n];
          for (int p = 0; p < k; ++p) {
            const double* brow = &b->value[static_cast<std::size_t>(p) * n];
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
            a->grad[static_cast<std::size_t>(i) * k + p] += acc;
          }
        }
      }
      if (b->needs_grad) {
        b->ensure_grad();
        for (int p = 0; p < k; ++p) {
          for (int i = 0; i < m; ++i) {
            const double av = a->value[static_cast<std::size_t>(i) * k + p];
            if (av == 0.0) continue;
            const double* grow = &self->grad[static_cast<std::size_t>(i) * n];
            double* brow = &b->grad[static_cast<std::size_t>(p) * n];
            for (int j = 0; j < n; ++j) brow[j] += av * grow[j];
          }
        }
      }
    });
  }
  return c;
}

inline Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "add");
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a->value[i] + b->value[i];
  }
  Tensor c = detail::result(tape, a->rows, a->cols, std::move(out), {a, b});
  if (c->needs_grad) {
    detail::set_backward(c, [a, b](TensorNode* self) {
      for (std::size_t i = 0; i < self->grad.size(); ++i) {
        detail::accum(a, i, self->grad[i]);
        detail::accum(b, i, self->grad[i]);
      }
    });
  }
  return c;
}

// Broadcast add of a 1 x d row vector to every row of an n x d matrix.
inline Tensor add_rowvec(Tape& tape, const Tensor& x, const Tensor& b) {
  if (b->rows != 1 || b->cols != x->cols) {
    throw DimensionError("add_rowvec: shape " + x->shape_str() + " vs " +
                         b->shape_str());
  }
  std::vector<double> out(x->size());
  for (int i = 0; i < x->rows; ++i) {
    for (int j = 0; j < x->cols; ++j) {
      out[static_cast<std::size_t>(i) * x->cols + j] =
          x->value[static_cast<std::size_t>(i) * x->cols + j] + b->value[j];
    }
  }
  Tensor c = detail::result(tape, x->rows, x->cols, std::move(out), {x, b});
  if (c->needs_grad) {
    detail::set_backward(c, [x, b](TensorNode* self) {
      for (int i = 0; i < self->rows; ++i) {
        for (int j = 0; j < self->cols; ++j) {
          const double d =
              self->grad[static_cast<std::size_t>(i) * self->cols + j];
          detail::accum(x, static_cast<std::size_t>(i) * self->cols + j, d);
          detail::accum(b, j, d);
        }
      }
    });
  }
  return c;
}

inline Tensor scalar_mul(Tape& tape, const Tensor& a, double c) {
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * a->value[i];
  Tensor r = detail::result(tape, a->rows, a->cols, std::move(out), {a});
  if (r->needs_grad) {
    detail::set_backward(r, [a, c](TensorNode* self) {
      for (std::size_t i = 0; i < self->grad.size(); ++i) {
        detail::accum(a, i, c * self->grad[i]);
      }
    });
  }
  return r;
}

// Broadcast multiply by a 1 x 1 tensor (the scalar is differentiable).
inline Tensor mul_scalar_tensor(Tape& tape, const Tensor& x,
                                const Tensor& s) {
  if (s->size() != 1) {
    throw DimensionError("mul_scalar_tensor: scalar has shape " +
                         s->shape_str());
  }
  const double sv = s->value[0];
  std::vector<double> out(x->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sv * x->value[i];
  Tensor c = detail::result(tape, x->rows, x->cols, std::move(out), {x, s});
  if (c->needs_grad) {
    detail::set_backward(c, [x, s, sv](TensorNode* self) {
      for (std::size_t i = 0; i < self->grad.size(); ++i) {
        detail::accum(x, i, sv * self->grad[i]);
        detail::accum(s, 0, x->value[i] * self->grad[i]);
      }
    });
  }
  return c;
}

// Scales row i of an n x d matrix by s_i (s is n x 1).
inline Tensor rows_scale(Tape& tape, const Tensor& x, const Tensor& s) {
  if (s->cols != 1 || s->rows != x->rows) {
    throw DimensionError("rows_scale: shape " + x->shape_str() + " vs " +
                         s->shape_str());
  }
  std::vector<double> out(x->size());
  for (int i = 0; i < x->rows; ++i) {
    for (int j = 0; j < x->cols; ++j) {
      out[static_cast<std::size_t>(i) * x->cols + j] =
          x->value[static_cast<std::size_t>(i) * x->cols + j] * s->value[i];
    }
  }
  Tensor c = detail::result(tape, x->rows, x->cols, std::move(out), {x, s});
  if (c->needs_grad) {
    detail::set_backward(c, [x, s](TensorNode* self) {
      for (int i = 0; i < self->rows; ++i) {
        for (int j = 0; j < self->cols; ++j) {
          const std::size_t k = static_cast<std::size_t>(i) * self->cols + j;
          detail::accum(x, k, s->value[i] * self->grad[k]);
          detail::accum(s, i, x->value[k] * self->grad[k]);
        }
      }
    });
  }
  return c;
}

namespace detail {

template <typename Fwd, typename Bwd>
Tensor unary_elementwise(Tape& tape, const Tensor& a, Fwd fwd, Bwd bwd) {
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(a->value[i]);
  Tensor c = result(tape, a->rows, a->cols, std::move(out), {a});
  if (c->needs_grad) {
    set_backward(c, [a, bwd](TensorNode* self) {
      for (std::size_t i = 0; i < self->grad.size(); ++i) {
        accum(a, i, bwd(a->value[i], self->value[i]) * self->grad[i]);
      }
    });
  }
  return c;
}

}  // namespace detail

inline Tensor relu(Tape& tape, const Tensor& a) {
  return detail::unary_elementwise(
      tape, a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

inline Tensor sigmoid(Tape& tape, const Tensor& a) {
  return detail::unary_elementwise(
      tape, a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

inline Tensor exp(Tape& tape, const Tensor& a) {
  return detail::unary_elementwise(
      tape, a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

inline Tensor log(Tape& tape, const Tensor& a) {
  for (std::size_t i = 0; i < a->size(); ++i) {
    if (a->value[i] <= 0.0) {
      throw NumericError("log: non-positive input at index " +
                         std::to_string(i));
    }
  }
  return detail::unary_elementwise(
      tape, a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

inline Tensor square(Tape& tape, const Tensor& a) {
  return detail::unary_elementwise(
      tape, a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

inline Tensor elementwise_mul(Tape& tape, const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "elementwise_mul");
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a->value[i] * b->value[i];
  }
  Tensor c = detail::result(tape, a->rows, a->cols, std::move(out), {a, b});
  if (c->needs_grad) {
    detail::set_backward(c, [a, b](TensorNode* self) {
      for (std::size_t i = 0; i < self->grad.size(); ++i) {
        detail::accum(a, i, b->value[i] * self->grad[i]);
        detail::accum(b, i, a->value[i] * self->grad[i]);
      }
    });
  }
  return c;
}

inline Tensor elementwise_sub(Tape& tape, const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b, "elementwise_sub");
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a->value[i] - b->value[i];
  }
  Tensor c = detail::result(tape, a->rows, a->cols, std::move(out), {a, b});
  if (c->needs_grad) {
    detail::set_backward(c, [a, b](TensorNode* self) {
      for (std::size_t i = 0; i < self->grad.size(); ++i) {
        detail::accum(a, i, self->grad[i]);
        detail::accum(b, i, -self->grad[i]);
      }
    });
  }
  return c;
}

inline Tensor transpose(Tape& tape, const Tensor& a) {
  std::vector<double> out(a->size());
  for (int i = 0; i < a->rows; ++i) {
    for (int j = 0; j < a->cols; ++j) {
      out[static_cast<std::size_t>(j) * a->rows + i] =
          a->value[static_cast<std::size_t>(i) * a->cols + j];
    }
  }
  Tensor c = detail::result(tape, a->cols, a->rows, std::move(out), {a});
  if (c->needs_grad) {
    detail::set_backward(c, [a](TensorNode* self) {
      for (int i = 0; i < self->rows; ++i) {
        for (int j = 0; j < self->cols; ++j) {
          detail::accum(
              a, static_cast<std::size_t>(j) * a->cols + i,
              self->grad[static_cast<std::size_t>(i) * self->cols + j]);
        }
      }
    });
  }
  return c;
}

// Stacks matrices with equal column counts along the row dimension.
inline Tensor concat_rows(Tape& tape, const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ContractError("concat_rows: no inputs");
  const int cols = parts[0]->cols;
  int rows = 0;
  for (const auto& p : parts) {
    if (p->cols != cols) {
      throw DimensionError("concat_rows: shape " + parts[0]->shape_str() +
                           " vs " + p->shape_str());
    }
    rows += p->rows;
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (const auto& p : parts) {
    out.insert(out.end(), p->value.begin(), p->value.end());
  }
  Tensor c = detail::result(tape, rows, cols, std::move(out), parts);
  if (c->needs_grad) {
    detail::set_backward(c, [parts](TensorNode* self) {
      std::size_t offset = 0;
      for (const auto& p : parts) {
        for (std::size_t i = 0; i < p->size(); ++i) {
          detail::accum(p, i, self->grad[offset + i]);
        }
        offset += p->size();
      }
    });
  }
  return c;
}

inline Tensor concat_rows(Tape& tape, const Tensor& a, const Tensor& b) {
  return concat_rows(tape, std::vector<Tensor>{a, b});
}

// Concatenates matrices with equal row counts along the column dimension.
inline Tensor concat_cols(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a->rows != b->rows) {
    throw DimensionError("concat_cols: shape " + a->shape_str() + " vs " +
                         b->shape_str());
  }
  const int rows = a->rows, ca = a->cols, cb = b->cols;
  std::vector<double> out(static_cast<std::size_t>(rows) * (ca + cb));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < ca; ++j) {
      out[static_cast<std::size_t>(i) * (ca + cb) + j] =
          a->value[static_cast<std::size_t>(i) * ca + j];
    }
    for (int j = 0; j < cb; ++j) {
      out[static_cast<std::size_t>(i) * (ca + cb) + ca + j] =
          b->value[static_cast<std::size_t>(i) * cb + j];
    }
  }
  Tensor c = detail::result(tape, rows, ca + cb, std::move(out), {a, b});
  if (c->needs_grad) {
    detail::set_backward(c, [a, b, rows, ca, cb](TensorNode* self) {
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < ca; ++j) {
          detail::accum(
              a, static_cast<std::size_t>(i) * ca + j,
              self->grad[static_cast<std::size_t>(i) * (ca + cb) + j]);
        }
        for (int j = 0; j < cb; ++j) {
          detail::accum(
              b, static_cast<std::size_t>(i) * cb + j,
              self->grad[static_cast<std::size_t>(i) * (ca + cb) + ca + j]);
        }
      }
    });
  }
  return c;
}

inline Tensor row_sum(Tape& tape, const Tensor& a) {
  std::vector<double> out(a->rows, 0.0);
  for (int i = 0; i < a->rows; ++i) {
    for (int j = 0; j < a->cols; ++j) {
      out[i] += a->value[static_cast<std::size_t>(i) * a->cols + j];
    }
  }
  Tensor c = detail::result(tape, a->rows, 1, std::move(out), {a});
  if (c->needs_grad) {
    detail::set_backward(c, [a](TensorNode* self) {
      for (int i = 0; i < a->rows; ++i) {
        for (int j = 0; j < a->cols; ++j) {
          detail::accum(a, static_cast<std::size_t>(i) * a->cols + j,
                        self->grad[i]);
        }
      }
    });
  }
  return c;
}

inline Tensor sum_all(Tape& tape, const Tensor& a) {
  double total = 0.0;
  for (double x : a->value) total += x;
  Tensor c = detail::result(tape, 1, 1, {total}, {a});
  if (c->needs_grad) {
    detail::set_backward(c, [a](TensorNode* self) {
      for (std::size_t i = 0; i < a->size(); ++i) {
        detail::accum(a, i, self->grad[0]);
      }
    });
  }
  return c;
}

inline Tensor mean_all(Tape& tape, const Tensor& a) {
  const double inv = 1.0 / static_cast<double>(a->size());
  double total = 0.0;
  for (double x : a->value) total += x;
  Tensor c = detail::result(tape, 1, 1, {total * inv}, {a});
  if (c->needs_grad) {
    detail::set_backward(c, [a, inv](TensorNode* self) {
      for (std::size_t i = 0; i < a->size(); ++i) {
        detail::accum(a, i, inv * self->grad[0]);
      }
    });
  }
  return c;
}

// Diagonal of a square matrix as an n x 1 column.
inline Tensor take_diag(Tape& tape, const Tensor& a) {
  if (a->rows != a->cols) {
    throw DimensionError("take_diag: shape " + a->shape_str() +
                         " is not square");
  }
  std::vector<double> out(a->rows);
  for (int i = 0; i < a->rows; ++i) {
    out[i] = a->value[static_cast<std::size_t>(i) * a->cols + i];
  }
  Tensor c = detail::result(tape, a->rows, 1, std::move(out), {a});
  if (c->needs_grad) {
    detail::set_backward(c, [a](TensorNode* self) {
      for (int i = 0; i < self->rows; ++i) {
        detail::accum(a, static_cast<std::size_t>(i) * a->cols + i,
                      self->grad[i]);
      }
    });
  }
  return c;
}

inline Tensor reshape(Tape& tape, const Tensor& a, int rows, int cols) {
  if (static_cast<std::size_t>(rows) * cols != a->size()) {
    throw DimensionError("reshape: " + a->shape_str() + " to " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  Tensor c = detail::result(tape, rows, cols, a->value, {a});
  if (c->needs_grad) {
    detail::set_backward(c, [a](TensorNode* self) {
      for (std::size_t i = 0; i < self->grad.size(); ++i) {
        detail::accum(a, i, self->grad[i]);
      }
    });
  }
  return c;
}

}  // namespace ops
}  // namespace topocl
