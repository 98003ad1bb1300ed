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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "gradcheck.hpp"
#include "mtend/nn/layers.hpp"
#include "oracles.hpp"

using namespace mtend;
using namespace mtend::nn;
using gradcheck::max_relative_error;
using gradcheck::random_matrix;

namespace {

oracle::AttentionParams to_oracle(const MultiHeadAttention<double>& mha) {
  oracle::AttentionParams p;
  for (int j = 0; j < mha.heads; ++j) {
    p.wq.push_back(mha.w_q[j].value);
    p.wk.push_back(mha.w_k[j].value);
    p.wv.push_back(mha.w_v[j].value);
  }
  p.wo = mha.w_o.value;
  return p;
}

}  // namespace

TEST(Linear, ForwardAndGradients) {
  Rng rng = make_stream(3, RngStream::kInit);
  Linear<double> lin("l", 4, 3);
  lin.init(1.0, rng);
  lin.bias.value = random_matrix(rng, 1, 3);
  Parameter<double> x("x", 5, 4);
  x.value = random_matrix(rng, 5, 4);
  Tape<double> t(false);
  const Matrix<double> y = lin(t, t.constant(x.value)).value();
  const Matrix<double> want = (x.value * lin.weight.value).rowwise() + lin.bias.value.row(0);
  EXPECT_LT((y - want).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(max_relative_error({&x, &lin.weight, &lin.bias}, [&](auto& tp) { return lin(tp, tp.param(x)); }), 1e-6);
  EXPECT_THROW(lin(t, t.constant(Matrix<double>::Zero(2, 5))), ShapeError);
}

TEST(Linear, OrthogonalInit) {
  Rng rng = make_stream(4, RngStream::kInit);
  Linear<double> tall("t", 8, 3), wide("w", 3, 8);
  tall.init(2.0, rng);
  wide.init(1.0, rng);
  EXPECT_LT((tall.weight.value.transpose() * tall.weight.value - 4.0 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((wide.weight.value * wide.weight.value.transpose() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LayerNorm, NormalizesRowsAndGradients) {
  Rng rng = make_stream(5, RngStream::kInit);
  LayerNorm<double> ln("ln", 6);
  Parameter<double> x("x", 4, 6);
  x.value = random_matrix(rng, 4, 6, 3.0);
  Tape<double> t(false);
  const Matrix<double> y = ln(t, t.constant(x.value)).value();
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const double mu = y.row(r).mean();
    const double var = (y.row(r).array() - mu).square().mean();
    EXPECT_NEAR(mu, 0.0, 1e-12);
    EXPECT_NEAR(var, 1.0, 1e-5);
  }
  ln.gain.value = random_matrix(rng, 1, 6);
  ln.bias.value = random_matrix(rng, 1, 6);
  EXPECT_LT(max_relative_error({&x, &ln.gain, &ln.bias}, [&](auto& tp) { return ln(tp, tp.param(x)); }), 1e-5);
}

TEST(GRU, MatchesEquationsAndGradients) {
  Rng rng = make_stream(6, RngStream::kInit);
  GRUCell<double> gru("g", 3, 4);
  gru.init(rng);
  gru.b_ih.value = random_matrix(rng, 1, 12, 0.3);
  gru.b_hh.value = random_matrix(rng, 1, 12, 0.3);
  Parameter<double> x("x", 2, 3), h("h", 2, 4);
  x.value = random_matrix(rng, 2, 3);
  h.value = random_matrix(rng, 2, 4, 0.5);
  Tape<double> t(false);
  const Matrix<double> got = gru(t, t.constant(x.value), t.constant(h.value)).value();
  auto sig = [](const Eigen::MatrixXd& m) { return (1.0 / (1.0 + (-m.array()).exp())).matrix().eval(); };
  const Eigen::MatrixXd gi = (x.value * gru.w_ih.value).rowwise() + gru.b_ih.value.row(0);
  const Eigen::MatrixXd gh = (h.value * gru.w_hh.value).rowwise() + gru.b_hh.value.row(0);
  const Eigen::MatrixXd r = sig(gi.leftCols(4) + gh.leftCols(4));
  const Eigen::MatrixXd z = sig(gi.middleCols(4, 4) + gh.middleCols(4, 4));
  const Eigen::MatrixXd n = (gi.rightCols(4).array() + r.array() * gh.rightCols(4).array()).tanh().matrix();
  const Eigen::MatrixXd want = ((1.0 - z.array()) * n.array() + z.array() * h.value.array()).matrix();
  EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-14);
  // Unrolled over three steps, parameters reused at every step.
  EXPECT_LT(max_relative_error({&x, &h, &gru.w_ih, &gru.w_hh, &gru.b_ih, &gru.b_hh},
                               [&](auto& tp) {
                                 auto xs = tp.param(x);
                                 auto hs = tp.param(h);
                                 for (int k = 0; k < 3; ++k) hs = gru(tp, xs, hs);
                                 return hs;
                               }),
            1e-6);
}

TEST(MultiHeadAttention, MatchesOracleAndRowStochastic) {
  Rng rng = make_stream(7, RngStream::kInit);
  MultiHeadAttention<double> mha("a", 8, 2, 4);
  mha.init(rng);
  const int n = 3, groups = 4;
  const Eigen::MatrixXd q = random_matrix(rng, n * groups, 8), k = random_matrix(rng, n * groups, 8), v = random_matrix(rng, n * groups, 8);
  Tape<double> t(false);
  std::vector<Matrix<double>> weights;
  const Matrix<double> got = mha(t, t.constant(q), t.constant(k), t.constant(v), n, &weights).value();
  std::vector<Eigen::MatrixXd> want_w;
  const Eigen::MatrixXd want = oracle::attention(q, k, v, to_oracle(mha), n, &want_w);
  EXPECT_LT(oracle::relative_error(got, want), 1e-12);
  ASSERT_EQ(weights.size(), 2u);
  for (int h = 0; h < 2; ++h) {
    ASSERT_EQ(weights[h].rows(), n * groups);
    ASSERT_EQ(weights[h].cols(), n);
    EXPECT_LT(oracle::relative_error(weights[h], want_w[h]), 1e-12);
    for (Eigen::Index r = 0; r < weights[h].rows(); ++r) {
      EXPECT_NEAR(weights[h].row(r).sum(), 1.0, 1e-12);
      EXPECT_GE(weights[h].row(r).minCoeff(), 0.0);
    }
  }
}

TEST(MultiHeadAttention, PermutationEquivariant) {
  Rng rng = make_stream(8, RngStream::kInit);
  MultiHeadAttention<double> mha("a", 6, 3, 2);
  mha.init(rng);
  const int n = 4;
  const Eigen::MatrixXd x = random_matrix(rng, n, 6);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::rotate(perm.begin(), perm.begin() + 1, perm.end());
  std::swap(perm[0], perm[2]);
  Eigen::MatrixXd px(n, 6);
  for (int i = 0; i < n; ++i) px.row(i) = x.row(perm[i]);
  Tape<double> t(false);
  const Matrix<double> y = mha(t, t.constant(x), t.constant(x), t.constant(x), n).value();
  const Matrix<double> py = mha(t, t.constant(px), t.constant(px), t.constant(px), n).value();
  for (int i = 0; i < n; ++i) EXPECT_LT((py.row(i) - y.row(perm[i])).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MultiHeadAttention, SingleAgentAttendsToItself) {
  Rng rng = make_stream(9, RngStream::kInit);
  MultiHeadAttention<double> mha("a", 5, 2, 3);
  mha.init(rng);
  const Eigen::MatrixXd x = random_matrix(rng, 3, 5);
  Tape<double> t(false);
  std::vector<Matrix<double>> w;
  const Matrix<double> y = mha(t, t.constant(x), t.constant(x), t.constant(x), 1, &w).value();
  for (const auto& h : w) EXPECT_EQ(h, Matrix<double>::Ones(3, 1));
  Eigen::MatrixXd cat(3, 6);
  for (int j = 0; j < 2; ++j) cat.middleCols(3 * j, 3) = x * mha.w_v[j].value;
  EXPECT_LT((y - cat * mha.w_o.value).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MultiHeadAttention, Gradients) {
  Rng rng = make_stream(10, RngStream::kInit);
  MultiHeadAttention<double> mha("a", 4, 2, 3);
  mha.init(rng);
  Parameter<double> x("x", 6, 4);
  x.value = random_matrix(rng, 6, 4);
  ParamList<double> params{&x};
  mha.collect(params);
  EXPECT_LT(max_relative_error(params,
                               [&](auto& tp) {
                                 auto v = tp.param(x);
                                 return mha(tp, v, v, v, 3);
                               }),
            1e-6);
}

TEST(Optim, ClipGradNorm) {
  Parameter<double> a("a", 1, 2), b("b", 1, 1);
  a.grad << 3, 0;
  b.grad << 4;
  const ParamList<double> ps{&a, &b};
  EXPECT_DOUBLE_EQ(clip_grad_norm(ps, 10.0), 5.0);
  EXPECT_EQ(a.grad(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(clip_grad_norm(ps, 1.0), 5.0);
  EXPECT_NEAR(grad_norm(ps), 1.0, 1e-6);
}

TEST(Optim, AdamMatchesReference) {
  Parameter<double> p("p", 1, 2);
  p.value << 1.0, -2.0;
  Adam<double> opt(0.1);
  double m[2] = {0, 0}, v[2] = {0, 0}, ref[2] = {1.0, -2.0};
  const double g_seq[3][2] = {{0.5, -1.0}, {0.2, 0.3}, {-0.4, 0.1}};
  for (int s = 0; s < 3; ++s) {
    p.grad << g_seq[s][0], g_seq[s][1];
    opt.step({&p});
    for (int i = 0; i < 2; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g_seq[s][i];
      v[i] = 0.999 * v[i] + 0.001 * g_seq[s][i] * g_seq[s][i];
      const double mh = m[i] / (1 - std::pow(0.9, s + 1));
      const double vh = v[i] / (1 - std::pow(0.999, s + 1));
      ref[i] -= 0.1 * mh / (std::sqrt(vh) + 1e-5);
    }
  }
  EXPECT_NEAR(p.value(0, 0), ref[0], 1e-12);
  EXPECT_NEAR(p.value(0, 1), ref[1], 1e-12);
}
