// Copyright 2026 The mtend Authors.
//
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

// Minimal tape-based reverse-mode automatic differentiation over dense
// row-major matrices. Rows are batch entries, columns are features.
//
// A Tape records nodes in creation order, which is already a topological
// order, so the reverse sweep is a single backwards pass over the node list.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtend/errors.hpp"

namespace mtend::nn {

template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::string shape_str(Eigen::Index r, Eigen::Index c) {
  return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
}

template <typename S>
struct Parameter {
  std::string name;
  Matrix<S> value;
  Matrix<S> grad;

  Parameter() = default;
  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Matrix<S>::Zero(rows, cols)), grad(Matrix<S>::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

template <typename S>
class Tape;

template <typename S>
struct Var {
  Tape<S>* tape = nullptr;
  int id = -1;

  const Matrix<S>& value() const { return tape->value(id); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
};

template <typename S>
class Tape {
 public:
  using Backward = std::function<void(Tape&, int)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const { return grad_enabled_; }
  std::size_t size() const { return nodes_.size(); }

  Var<S> constant(Matrix<S> value) { return push(std::move(value), false, nullptr); }

  // Leaf bound to a parameter; backward accumulates into `p.grad`.
  Var<S> param(Parameter<S>& p) {
    Var<S> v = push(p.value, grad_enabled_, nullptr);
    nodes_[v.id].param = &p;
    return v;
  }

  const Matrix<S>& value(int id) const { return nodes_[id].value; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }

  // Gradient buffer, allocated on first touch.
  Matrix<S>& grad(int id) {
    auto& n = nodes_[id];
    if (n.grad.size() == 0) n.grad.setZero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  // Records a derived node. `backward` runs only when some input needs gradients.
  Var<S> record(Matrix<S> value, std::initializer_list<Var<S>> inputs, Backward backward) {
    bool rg = false;
    for (const auto& in : inputs) rg = rg || nodes_[in.id].requires_grad;
    Var<S> v = push(std::move(value), rg && grad_enabled_, nullptr);
    if (nodes_[v.id].requires_grad) nodes_[v.id].backward = std::move(backward);
    return v;
  }

  Var<S> record(Matrix<S> value, std::span<const Var<S>> inputs, Backward backward) {
    bool rg = false;
    for (const auto& in : inputs) rg = rg || nodes_[in.id].requires_grad;
    Var<S> v = push(std::move(value), rg && grad_enabled_, nullptr);
    if (nodes_[v.id].requires_grad) nodes_[v.id].backward = std::move(backward);
    return v;
  }

  void backward(Var<S> output, const Matrix<S>& seed) {
    if (output.tape != this || output.id < 0 || output.id >= static_cast<int>(nodes_.size())) {
      throw UsageError("backward called on a variable that was not recorded on this tape");
    }
    if (backward_done_) throw UsageError("backward already ran on this tape");
    if (seed.rows() != output.rows() || seed.cols() != output.cols()) {
      throw ShapeError("backward seed " + shape_str(seed.rows(), seed.cols()) + " vs output " +
                       shape_str(output.rows(), output.cols()));
    }
    backward_done_ = true;
    if (!nodes_[output.id].requires_grad) return;
    grad(output.id) += seed;
    for (int id = output.id; id >= 0; --id) {
      auto& n = nodes_[id];
      if (!n.requires_grad || n.grad.size() == 0) continue;
      if (n.backward) n.backward(*this, id);
      if (n.param != nullptr) n.param->grad += n.grad;
    }
  }

  void backward(Var<S> scalar_output) {
    if (scalar_output.tape != this || scalar_output.id < 0) {
      throw UsageError("backward called before any forward pass was recorded");
    }
    backward(scalar_output, Matrix<S>::Ones(1, 1));
  }

 private:
  struct Node {
    Matrix<S> value;
    Matrix<S> grad;
    Backward backward;
    Parameter<S>* param = nullptr;
    bool requires_grad = false;
  };

  Var<S> push(Matrix<S> value, bool requires_grad, Backward backward) {
    nodes_.push_back(Node{std::move(value), {}, std::move(backward), nullptr, requires_grad});
    return Var<S>{this, static_cast<int>(nodes_.size()) - 1};
  }

  std::vector<Node> nodes_;
  bool grad_enabled_;
  bool backward_done_ = false;
};

// ---------------------------------------------------------------------------
// Operations

namespace detail {
template <typename S>
void require_same_shape(const char* op, const Var<S>& a, const Var<S>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": " + shape_str(a.rows(), a.cols()) + " vs " + shape_str(b.rows(), b.cols()));
  }
}
}  // namespace detail

template <typename S>
Var<S> matmul(Var<S> a, Var<S> b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_str(a.rows(), a.cols()) + " x " + shape_str(b.rows(), b.cols()));
  }
  Matrix<S> out;
  out.noalias() = a.value() * b.value();
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape<S>& t, int self) {
    const Matrix<S>& g = t.grad(self);
    if (t.requires_grad(a.id)) t.grad(a.id).noalias() += g * t.value(b.id).transpose();
    if (t.requires_grad(b.id)) t.grad(b.id).noalias() += t.value(a.id).transpose() * g;
  });
}

// x + bias, bias is a single row broadcast over all rows of x.
template <typename S>
Var<S> add_bias(Var<S> x, Var<S> bias) {
  if (bias.rows() != 1 || bias.cols() != x.cols()) {
    throw ShapeError("add_bias: " + shape_str(x.rows(), x.cols()) + " + " + shape_str(bias.rows(), bias.cols()));
  }
  Matrix<S> out = x.value().rowwise() + bias.value().row(0);
  return x.tape->record(std::move(out), {x, bias}, [x, bias](Tape<S>& t, int self) {
    const Matrix<S>& g = t.grad(self);
    if (t.requires_grad(x.id)) t.grad(x.id) += g;
    if (t.requires_grad(bias.id)) t.grad(bias.id) += g.colwise().sum();
  });
}

template <typename S>
Var<S> add(Var<S> a, Var<S> b) {
  detail::require_same_shape("add", a, b);
  Matrix<S> out = a.value() + b.value();
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape<S>& t, int self) {
    const Matrix<S>& g = t.grad(self);
    if (t.requires_grad(a.id)) t.grad(a.id) += g;
    if (t.requires_grad(b.id)) t.grad(b.id) += g;
  });
}

template <typename S>
Var<S> sub(Var<S> a, Var<S> b) {
  detail::require_same_shape("sub", a, b);
  Matrix<S> out = a.value() - b.value();
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape<S>& t, int self) {
    const Matrix<S>& g = t.grad(self);
    if (t.requires_grad(a.id)) t.grad(a.id) += g;
    if (t.requires_grad(b.id)) t.grad(b.id) -= g;
  });
}

// Elementwise product.
template <typename S>
Var<S> mul(Var<S> a, Var<S> b) {
  detail::require_same_shape("mul", a, b);
  Matrix<S> out = a.value().cwiseProduct(b.value());
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape<S>& t, int self) {
    const Matrix<S>& g = t.grad(self);
    if (t.requires_grad(a.id)) t.grad(a.id) += g.cwiseProduct(t.value(b.id));
    if (t.requires_grad(b.id)) t.grad(b.id) += g.cwiseProduct(t.value(a.id));
  });
}

// s * a + c
template <typename S>
Var<S> affine_scalar(Var<S> a, S s, S c = S(0)) {
  Matrix<S> out = (a.value().array() * s + c).matrix();
  return a.tape->record(std::move(out), {a}, [a, s](Tape<S>& t, int self) { t.grad(a.id) += t.grad(self) * s; });
}

template <typename S>
Var<S> tanh(Var<S> a) {
  Matrix<S> out = a.value().array().tanh().matrix();
  return a.tape->record(std::move(out), {a}, [a](Tape<S>& t, int self) {
    const auto y = t.value(self).array();
    t.grad(a.id).array() += t.grad(self).array() * (S(1) - y * y);
  });
}

template <typename S>
Var<S> sigmoid(Var<S> a) {
  Matrix<S> out = (S(1) / (S(1) + (-a.value().array()).exp())).matrix();
  return a.tape->record(std::move(out), {a}, [a](Tape<S>& t, int self) {
    const auto y = t.value(self).array();
    t.grad(a.id).array() += t.grad(self).array() * y * (S(1) - y);
  });
}

template <typename S>
Var<S> exp(Var<S> a) {
  Matrix<S> out = a.value().array().exp().matrix();
  return a.tape->record(std::move(out), {a}, [a](Tape<S>& t, int self) {
    t.grad(a.id).array() += t.grad(self).array() * t.value(self).array();
  });
}

template <typename S>
Var<S> square(Var<S> a) {
  Matrix<S> out = a.value().array().square().matrix();
  return a.tape->record(std::move(out), {a}, [a](Tape<S>& t, int self) {
    t.grad(a.id).array() += t.grad(self).array() * S(2) * t.value(a.id).array();
  });
}

// Gradient passes only where lo < a < hi.
template <typename S>
Var<S> clamp(Var<S> a, S lo, S hi) {
  Matrix<S> out = a.value().cwiseMax(lo).cwiseMin(hi);
  return a.tape->record(std::move(out), {a}, [a, lo, hi](Tape<S>& t, int self) {
    const auto x = t.value(a.id).array();
    t.grad(a.id).array() += t.grad(self).array() * ((x > lo) && (x < hi)).template cast<S>();
  });
}

// Elementwise min/max; ties route the gradient to the first argument.
template <typename S>
Var<S> minimum(Var<S> a, Var<S> b) {
  detail::require_same_shape("minimum", a, b);
  Matrix<S> out = a.value().cwiseMin(b.value());
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape<S>& t, int self) {
    const auto pick_a = (t.value(a.id).array() <= t.value(b.id).array()).template cast<S>();
    const auto& g = t.grad(self).array();
    if (t.requires_grad(a.id)) t.grad(a.id).array() += g * pick_a;
    if (t.requires_grad(b.id)) t.grad(b.id).array() += g * (S(1) - pick_a);
  });
}

template <typename S>
Var<S> maximum(Var<S> a, Var<S> b) {
  detail::require_same_shape("maximum", a, b);
  Matrix<S> out = a.value().cwiseMax(b.value());
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape<S>& t, int self) {
    const auto pick_a = (t.value(a.id).array() >= t.value(b.id).array()).template cast<S>();
    const auto& g = t.grad(self).array();
    if (t.requires_grad(a.id)) t.grad(a.id).array() += g * pick_a;
    if (t.requires_grad(b.id)) t.grad(b.id).array() += g * (S(1) - pick_a);
  });
}

template <typename S>
Var<S> sum(Var<S> a) {
  Matrix<S> out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape->record(std::move(out), {a}, [a](Tape<S>& t, int self) {
    t.grad(a.id).array() += t.grad(self)(0, 0);
  });
}

template <typename S>
Var<S> mean(Var<S> a) {
  const S inv = S(1) / static_cast<S>(a.value().size());
  return affine_scalar(sum(a), inv);
}

// Row sums: [R x C] -> [R x 1].
template <typename S>
Var<S> sum_cols(Var<S> a) {
  Matrix<S> out = a.value().rowwise().sum();
  return a.tape->record(std::move(out), {a}, [a](Tape<S>& t, int self) {
    t.grad(a.id).colwise() += t.grad(self).col(0);
  });
}

// out[r] = a[r, index[r]]
template <typename S>
Var<S> gather_cols(Var<S> a, std::vector<int> index) {
  if (static_cast<Eigen::Index>(index.size()) != a.rows()) {
    throw ShapeError("gather_cols: " + std::to_string(index.size()) + " indices for " + std::to_string(a.rows()) + " rows");
  }
  Matrix<S> out(a.rows(), 1);
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    if (index[r] < 0 || index[r] >= a.cols()) throw ShapeError("gather_cols: index out of range");
    out(r, 0) = a.value()(r, index[r]);
  }
  return a.tape->record(std::move(out), {a}, [a, index = std::move(index)](Tape<S>& t, int self) {
    auto& ga = t.grad(a.id);
    const auto& g = t.grad(self);
    for (Eigen::Index r = 0; r < ga.rows(); ++r) ga(r, index[r]) += g(r, 0);
  });
}

template <typename S>
Var<S> softmax_rows(Var<S> a) {
  Matrix<S> out = a.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    row.array() = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
  return a.tape->record(std::move(out), {a}, [a](Tape<S>& t, int self) {
    const auto& p = t.value(self);
    const auto& g = t.grad(self);
    const Matrix<S> dot = g.cwiseProduct(p).rowwise().sum();
    t.grad(a.id).array() += p.array() * (g.colwise() - dot.col(0)).array();
  });
}

template <typename S>
Var<S> log_softmax_rows(Var<S> a) {
  Matrix<S> out = a.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const S m = row.maxCoeff();
    const S lse = m + std::log((row.array() - m).exp().sum());
    row.array() -= lse;
  }
  return a.tape->record(std::move(out), {a}, [a](Tape<S>& t, int self) {
    const auto& g = t.grad(self);
    const Matrix<S> gsum = g.rowwise().sum();
    const Matrix<S> p = t.value(self).array().exp().matrix();
    t.grad(a.id).array() += g.array() - p.array().colwise() * gsum.col(0).array();
  });
}

// Per-row normalization to zero mean / unit variance, then gain and bias.
template <typename S>
Var<S> layer_norm(Var<S> x, Var<S> gain, Var<S> bias, S eps = S(1e-5)) {
  const Eigen::Index c = x.cols();
  if (gain.rows() != 1 || gain.cols() != c || bias.rows() != 1 || bias.cols() != c) {
    throw ShapeError("layer_norm: input " + shape_str(x.rows(), c) + " gain " + shape_str(gain.rows(), gain.cols()));
  }
  const Matrix<S>& xv = x.value();
  Matrix<S> xhat(xv.rows(), c);
  Matrix<S> inv_std(xv.rows(), 1);
  for (Eigen::Index r = 0; r < xv.rows(); ++r) {
    const S mu = xv.row(r).mean();
    const S var = (xv.row(r).array() - mu).square().mean();
    inv_std(r, 0) = S(1) / std::sqrt(var + eps);
    xhat.row(r) = (xv.row(r).array() - mu) * inv_std(r, 0);
  }
  Matrix<S> out = (xhat.array().rowwise() * gain.value().row(0).array()).rowwise() + bias.value().row(0).array();
  return x.tape->record(std::move(out), {x, gain, bias},
                        [x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape<S>& t, int self) {
                          const auto& g = t.grad(self);
                          if (t.requires_grad(gain.id)) t.grad(gain.id) += g.cwiseProduct(xhat).colwise().sum();
                          if (t.requires_grad(bias.id)) t.grad(bias.id) += g.colwise().sum();
                          if (t.requires_grad(x.id)) {
                            const Matrix<S> gh = g.array().rowwise() * t.value(gain.id).row(0).array();
                            const Matrix<S> m1 = gh.rowwise().mean();
                            const Matrix<S> m2 = gh.cwiseProduct(xhat).rowwise().mean();
                            Matrix<S> dx = (gh.colwise() - m1.col(0)) - (xhat.array().colwise() * m2.col(0).array()).matrix();
                            dx.array().colwise() *= inv_std.col(0).array();
                            t.grad(x.id) += dx;
                          }
                        });
}

template <typename S>
Var<S> concat_cols(const std::vector<Var<S>>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw ShapeError("concat_cols: row mismatch " + std::to_string(p.rows()) + " vs " + std::to_string(rows));
    cols += p.cols();
  }
  Matrix<S> out(rows, cols);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  return parts[0].tape->record(std::move(out), std::span<const Var<S>>(parts), [parts](Tape<S>& t, int self) {
    const auto& g = t.grad(self);
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      const Eigen::Index w = t.value(p.id).cols();
      if (t.requires_grad(p.id)) t.grad(p.id) += g.middleCols(off, w);
      off += w;
    }
  });
}

template <typename S>
Var<S> concat_rows(const std::vector<Var<S>>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const Eigen::Index cols = parts[0].cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw ShapeError("concat_rows: column mismatch");
    rows += p.rows();
  }
  Matrix<S> out(rows, cols);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    out.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  return parts[0].tape->record(std::move(out), std::span<const Var<S>>(parts), [parts](Tape<S>& t, int self) {
    const auto& g = t.grad(self);
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      const Eigen::Index h = t.value(p.id).rows();
      if (t.requires_grad(p.id)) t.grad(p.id) += g.middleRows(off, h);
      off += h;
    }
  });
}

template <typename S>
Var<S> slice_cols(Var<S> a, Eigen::Index start, Eigen::Index width) {
  if (start < 0 || start + width > a.cols()) throw ShapeError("slice_cols: out of range");
  Matrix<S> out = a.value().middleCols(start, width);
  return a.tape->record(std::move(out), {a}, [a, start, width](Tape<S>& t, int self) {
    t.grad(a.id).middleCols(start, width) += t.grad(self);
  });
}

template <typename S>
Var<S> slice_rows(Var<S> a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || start + count > a.rows()) throw ShapeError("slice_rows: out of range");
  Matrix<S> out = a.value().middleRows(start, count);
  return a.tape->record(std::move(out), {a}, [a, start, count](Tape<S>& t, int self) {
    t.grad(a.id).middleRows(start, count) += t.grad(self);
  });
}

// [R x C] -> [R/n x n*C]: consecutive groups of n rows become one row.
template <typename S>
Var<S> group_rows(Var<S> a, Eigen::Index n) {
  if (n <= 0 || a.rows() % n != 0) throw ShapeError("group_rows: " + std::to_string(a.rows()) + " rows not divisible by " + std::to_string(n));
  const Eigen::Index rows = a.rows() / n;
  const Eigen::Index cols = a.cols() * n;
  Matrix<S> out = Eigen::Map<const Matrix<S>>(a.value().data(), rows, cols);
  return a.tape->record(std::move(out), {a}, [a, rows, cols](Tape<S>& t, int self) {
    auto& ga = t.grad(a.id);
    Eigen::Map<Matrix<S>>(ga.data(), rows, cols) += t.grad(self);
  });
}

// Each row repeated n times consecutively: [R x C] -> [R*n x C].
template <typename S>
Var<S> repeat_rows(Var<S> a, Eigen::Index n) {
  Matrix<S> out(a.rows() * n, a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) out.middleRows(r * n, n).rowwise() = a.value().row(r);
  return a.tape->record(std::move(out), {a}, [a, n](Tape<S>& t, int self) {
    auto& ga = t.grad(a.id);
    const auto& g = t.grad(self);
    for (Eigen::Index r = 0; r < ga.rows(); ++r) ga.row(r) += g.middleRows(r * n, n).colwise().sum();
  });
}

// Scaled dot-product attention applied independently to consecutive blocks
// of `block` rows: for each block, softmax(Q K^T * scale) V. When `weights`
// is given it receives the row-stochastic attention matrices stacked
// block after block ([R x block]).
template <typename S>
Var<S> block_attention(Var<S> q, Var<S> k, Var<S> v, Eigen::Index block, S scale, Matrix<S>* weights = nullptr) {
  if (q.rows() != k.rows() || q.rows() != v.rows()) {
    throw ShapeError("attention: row counts Q " + std::to_string(q.rows()) + " K " + std::to_string(k.rows()) + " V " +
                     std::to_string(v.rows()));
  }
  if (q.cols() != k.cols()) throw ShapeError("attention: query width " + std::to_string(q.cols()) + " vs key width " + std::to_string(k.cols()));
  if (block <= 0 || q.rows() % block != 0) throw ShapeError("attention: rows not divisible into blocks of " + std::to_string(block));
  const Eigen::Index blocks = q.rows() / block;
  Matrix<S> probs(q.rows(), block);
  Matrix<S> out(q.rows(), v.cols());
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const auto qb = q.value().middleRows(b * block, block);
    const auto kb = k.value().middleRows(b * block, block);
    const auto vb = v.value().middleRows(b * block, block);
    Matrix<S> s = (qb * kb.transpose()) * scale;
    for (Eigen::Index r = 0; r < block; ++r) {
      auto row = s.row(r);
      row.array() = (row.array() - row.maxCoeff()).exp();
      row /= row.sum();
    }
    out.middleRows(b * block, block).noalias() = s * vb;
    probs.middleRows(b * block, block) = s;
  }
  if (weights != nullptr) *weights = probs;
  return q.tape->record(std::move(out), {q, k, v}, [q, k, v, block, blocks, scale, probs = std::move(probs)](Tape<S>& t, int self) {
    const auto& g = t.grad(self);
    const bool gq = t.requires_grad(q.id), gk = t.requires_grad(k.id), gv = t.requires_grad(v.id);
    for (Eigen::Index b = 0; b < blocks; ++b) {
      const auto p = probs.middleRows(b * block, block);
      const auto gb = g.middleRows(b * block, block);
      if (gv) t.grad(v.id).middleRows(b * block, block).noalias() += p.transpose() * gb;
      if (!gq && !gk) continue;
      Matrix<S> dp = gb * t.value(v.id).middleRows(b * block, block).transpose();
      const Matrix<S> dot = dp.cwiseProduct(p).rowwise().sum();
      Matrix<S> ds = (p.array() * (dp.colwise() - dot.col(0)).array()).matrix() * scale;
      if (gq) t.grad(q.id).middleRows(b * block, block).noalias() += ds * t.value(k.id).middleRows(b * block, block);
      if (gk) t.grad(k.id).middleRows(b * block, block).noalias() += ds.transpose() * t.value(q.id).middleRows(b * block, block);
    }
  });
}

}  // namespace mtend::nn
