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

#include <cmath>
#include <string>
#include <vector>

#include "mtend/nn/autodiff.hpp"
#include "mtend/rng.hpp"

namespace mtend::nn {

template <typename S>
using ParamList = std::vector<Parameter<S>*>;

inline double standard_normal(Rng& rng) {
  // Box-Muller on our own uniform draws keeps initialization platform-independent.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Orthogonal initialization (rows x cols) scaled by `gain`.
template <typename S>
void orthogonal_init(Matrix<S>& w, double gain, Rng& rng) {
  const Eigen::Index rows = w.rows(), cols = w.cols();
  const bool tall = rows >= cols;
  Eigen::MatrixXd a(tall ? rows : cols, tall ? cols : rows);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = standard_normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::VectorXd d = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (d(j) < 0) q.col(j) *= -1.0;
  }
  if (!tall) q.transposeInPlace();
  w = (q * gain).template cast<S>();
}

template <typename S>
struct Linear {
  Parameter<S> weight;  // [in x out]
  Parameter<S> bias;    // [1 x out]
  bool has_bias = true;

  Linear() = default;
  Linear(const std::string& name, int in, int out, bool with_bias = true)
      : weight(name + "/weight", in, out), bias(name + "/bias", 1, with_bias ? out : 0), has_bias(with_bias) {}

  void init(double gain, Rng& rng) {
    orthogonal_init(weight.value, gain, rng);
    bias.value.setZero();
  }

  int in_features() const { return static_cast<int>(weight.value.rows()); }
  int out_features() const { return static_cast<int>(weight.value.cols()); }

  Var<S> operator()(Tape<S>& tape, Var<S> x) {
    if (x.cols() != weight.value.rows()) {
      throw ShapeError(weight.name + ": input " + shape_str(x.rows(), x.cols()) + " vs weight " +
                       shape_str(weight.value.rows(), weight.value.cols()));
    }
    Var<S> y = matmul(x, tape.param(weight));
    return has_bias ? add_bias(y, tape.param(bias)) : y;
  }

  void collect(ParamList<S>& out) {
    out.push_back(&weight);
    if (has_bias) out.push_back(&bias);
  }
};

template <typename S>
struct LayerNorm {
  Parameter<S> gain;
  Parameter<S> bias;

  LayerNorm() = default;
  LayerNorm(const std::string& name, int dim) : gain(name + "/gain", 1, dim), bias(name + "/bias", 1, dim) {
    gain.value.setOnes();
  }

  Var<S> operator()(Tape<S>& tape, Var<S> x) { return layer_norm(x, tape.param(gain), tape.param(bias)); }

  void collect(ParamList<S>& out) {
    out.push_back(&gain);
    out.push_back(&bias);
  }
};

// Standard GRU (reset gate applied to the hidden projection):
//   r = sigmoid(x W_ir + b_ir + h W_hr + b_hr)
//   z = sigmoid(x W_iz + b_iz + h W_hz + b_hz)
//   n = tanh(x W_in + b_in + r * (h W_hn + b_hn))
//   h' = (1 - z) * n + z * h
// Gate blocks are packed [r | z | n] along the output columns.
template <typename S>
struct GRUCell {
  Parameter<S> w_ih;  // [in x 3H]
  Parameter<S> w_hh;  // [H x 3H]
  Parameter<S> b_ih;  // [1 x 3H]
  Parameter<S> b_hh;  // [1 x 3H]
  int hidden = 0;

  GRUCell() = default;
  GRUCell(const std::string& name, int in, int hidden_size)
      : w_ih(name + "/w_ih", in, 3 * hidden_size),
        w_hh(name + "/w_hh", hidden_size, 3 * hidden_size),
        b_ih(name + "/b_ih", 1, 3 * hidden_size),
        b_hh(name + "/b_hh", 1, 3 * hidden_size),
        hidden(hidden_size) {}

  void init(Rng& rng) {
    for (int g = 0; g < 3; ++g) {
      Matrix<S> block(w_ih.value.rows(), hidden);
      orthogonal_init(block, 1.0, rng);
      w_ih.value.middleCols(g * hidden, hidden) = block;
      Matrix<S> hblock(hidden, hidden);
      orthogonal_init(hblock, 1.0, rng);
      w_hh.value.middleCols(g * hidden, hidden) = hblock;
    }
    b_ih.value.setZero();
    b_hh.value.setZero();
  }

  Var<S> operator()(Tape<S>& tape, Var<S> x, Var<S> h) {
    if (h.cols() != hidden || x.rows() != h.rows()) {
      throw ShapeError(w_ih.name + ": input " + shape_str(x.rows(), x.cols()) + " hidden " + shape_str(h.rows(), h.cols()));
    }
    Var<S> gi = add_bias(matmul(x, tape.param(w_ih)), tape.param(b_ih));
    Var<S> gh = add_bias(matmul(h, tape.param(w_hh)), tape.param(b_hh));
    Var<S> r = sigmoid(add(slice_cols(gi, 0, hidden), slice_cols(gh, 0, hidden)));
    Var<S> z = sigmoid(add(slice_cols(gi, hidden, hidden), slice_cols(gh, hidden, hidden)));
    Var<S> n = tanh(add(slice_cols(gi, 2 * hidden, hidden), mul(r, slice_cols(gh, 2 * hidden, hidden))));
    // (1 - z) * n + z * h = n + z * (h - n)
    return add(n, mul(z, sub(h, n)));
  }

  void collect(ParamList<S>& out) {
    out.push_back(&w_ih);
    out.push_back(&w_hh);
    out.push_back(&b_ih);
    out.push_back(&b_hh);
  }
};

// Multi-head attention over groups of `block` rows (one group per set of
// agents observed together):
//   head_j = Attention(Q W^Q_j, K W^K_j, V W^V_j)
//   M_out  = Concat(head_1..head_H) W^o
template <typename S>
struct MultiHeadAttention {
  std::vector<Parameter<S>> w_q;  // H x [d_model x d_head]
  std::vector<Parameter<S>> w_k;
  std::vector<Parameter<S>> w_v;
  Parameter<S> w_o;  // [H*d_head x d_model]
  int heads = 0;
  int d_head = 0;

  MultiHeadAttention() = default;
  MultiHeadAttention(const std::string& name, int d_model, int num_heads, int head_dim)
      : w_o(name + "/w_o", num_heads * head_dim, d_model), heads(num_heads), d_head(head_dim) {
    for (int j = 0; j < num_heads; ++j) {
      w_q.emplace_back(name + "/head" + std::to_string(j) + "/w_q", d_model, head_dim);
      w_k.emplace_back(name + "/head" + std::to_string(j) + "/w_k", d_model, head_dim);
      w_v.emplace_back(name + "/head" + std::to_string(j) + "/w_v", d_model, head_dim);
    }
  }

  void init(Rng& rng) {
    for (int j = 0; j < heads; ++j) {
      orthogonal_init(w_q[j].value, 1.0, rng);
      orthogonal_init(w_k[j].value, 1.0, rng);
      orthogonal_init(w_v[j].value, 1.0, rng);
    }
    orthogonal_init(w_o.value, 1.0, rng);
  }

  // `weights`, when provided, receives one [R x block] matrix per head.
  Var<S> operator()(Tape<S>& tape, Var<S> q, Var<S> k, Var<S> v, Eigen::Index block,
                    std::vector<Matrix<S>>* weights = nullptr) {
    const S scale = S(1) / std::sqrt(static_cast<S>(d_head));
    std::vector<Var<S>> outs;
    if (weights != nullptr) weights->assign(heads, Matrix<S>());
    for (int j = 0; j < heads; ++j) {
      Var<S> qh = matmul(q, tape.param(w_q[j]));
      Var<S> kh = matmul(k, tape.param(w_k[j]));
      Var<S> vh = matmul(v, tape.param(w_v[j]));
      outs.push_back(block_attention(qh, kh, vh, block, scale, weights != nullptr ? &(*weights)[j] : nullptr));
    }
    return matmul(heads == 1 ? outs[0] : concat_cols(outs), tape.param(w_o));
  }

  void collect(ParamList<S>& out) {
    for (int j = 0; j < heads; ++j) {
      out.push_back(&w_q[j]);
      out.push_back(&w_k[j]);
      out.push_back(&w_v[j]);
    }
    out.push_back(&w_o);
  }
};

template <typename S>
void zero_grad(const ParamList<S>& params) {
  for (auto* p : params) p->zero_grad();
}

template <typename S>
double grad_norm(const ParamList<S>& params) {
  double sq = 0.0;
  for (const auto* p : params) sq += static_cast<double>(p->grad.squaredNorm());
  return std::sqrt(sq);
}

// Scales gradients so their global norm is at most `max_norm`; returns the pre-clip norm.
template <typename S>
double clip_grad_norm(const ParamList<S>& params, double max_norm) {
  const double norm = grad_norm(params);
  if (norm > max_norm && norm > 0.0) {
    const S scale = static_cast<S>(max_norm / (norm + 1e-6));
    for (auto* p : params) p->grad *= scale;
  }
  return norm;
}

template <typename S>
class Adam {
 public:
  explicit Adam(double lr = 5e-4, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-5)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  long steps() const { return steps_; }

  void step(const ParamList<S>& params) {
    if (m_.empty()) {
      for (const auto* p : params) {
        m_.push_back(Matrix<S>::Zero(p->value.rows(), p->value.cols()));
        v_.push_back(Matrix<S>::Zero(p->value.rows(), p->value.cols()));
      }
    }
    if (m_.size() != params.size()) throw UsageError("Adam: parameter list changed between steps");
    ++steps_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
    const S step_size = static_cast<S>(lr_ / bc1);
    const S inv_sqrt_bc2 = static_cast<S>(1.0 / std::sqrt(bc2));
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto* p = params[i];
      m_[i] = m_[i] * static_cast<S>(beta1_) + p->grad * static_cast<S>(1.0 - beta1_);
      v_[i] = v_[i] * static_cast<S>(beta2_) + p->grad.cwiseAbs2() * static_cast<S>(1.0 - beta2_);
      p->value.array() -= step_size * m_[i].array() / ((v_[i].array().sqrt() * inv_sqrt_bc2) + static_cast<S>(eps_));
    }
  }

  // Exposed for checkpointing.
  std::vector<Matrix<S>>& first_moments() { return m_; }
  std::vector<Matrix<S>>& second_moments() { return v_; }
  void set_steps(long s) { steps_ = s; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long steps_ = 0;
  std::vector<Matrix<S>> m_;
  std::vector<Matrix<S>> v_;
};

}  // namespace mtend::nn
