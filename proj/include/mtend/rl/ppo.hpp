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

// Clipped-surrogate PPO losses, advantage normalization and running value
// normalization.

#include <cmath>
#include <span>
#include <vector>

#include "mtend/nn/autodiff.hpp"

namespace mtend::rl {

using nn::Matrix;
using nn::Tape;
using nn::Var;

// In place: mean 0, std 1 (population std, eps 1e-8 in the denominator).
inline void normalize_advantages(std::span<double> adv, double eps = 1e-8) {
  if (adv.empty()) return;
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= static_cast<double>(adv.size());
  const double inv = 1.0 / (std::sqrt(var) + eps);
  for (double& a : adv) a = (a - mean) * inv;
}

template <typename S>
struct ActorLossOutput {
  Var<S> loss;
  double policy_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double ratio_mean = 0.0;
};

// loss = -mean(min(rho A, clip(rho, 1-eps, 1+eps) A)) - entropy_coef * mean(H)
template <typename S>
ActorLossOutput<S> actor_loss(Tape<S>& tape, Var<S> logits, std::vector<int> actions, const Matrix<S>& old_log_probs,
                              const Matrix<S>& advantages, double clip, double entropy_coef) {
  ActorLossOutput<S> out;
  Var<S> logp_all = log_softmax_rows(logits);
  Var<S> logp = gather_cols(logp_all, std::move(actions));
  Var<S> old = tape.constant(old_log_probs);
  Var<S> adv = tape.constant(advantages);
  Var<S> ratio = exp(sub(logp, old));
  Var<S> surr1 = mul(ratio, adv);
  Var<S> surr2 = mul(clamp(ratio, static_cast<S>(1.0 - clip), static_cast<S>(1.0 + clip)), adv);
  Var<S> policy = affine_scalar(mean(minimum(surr1, surr2)), S(-1));
  Var<S> ent = affine_scalar(mean(sum_cols(mul(exp(logp_all), logp_all))), S(-1));
  out.loss = add(policy, affine_scalar(ent, static_cast<S>(-entropy_coef)));

  out.policy_loss = static_cast<double>(policy.value()(0, 0));
  out.entropy = static_cast<double>(ent.value()(0, 0));
  const auto& r = ratio.value();
  const auto n = static_cast<double>(r.rows());
  out.ratio_mean = static_cast<double>(r.sum()) / n;
  out.approx_kl = static_cast<double>((old_log_probs - logp.value()).sum()) / n;
  double clipped = 0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) clipped += std::abs(static_cast<double>(r(i, 0)) - 1.0) > clip ? 1 : 0;
  out.clip_fraction = clipped / n;
  return out;
}

// value_coef * mean(max((v - R)^2, (v_clip - R)^2)), v_clip = v_old + clip(v - v_old, -eps, eps).
template <typename S>
Var<S> value_loss(Tape<S>& tape, Var<S> values, const Matrix<S>& old_values, const Matrix<S>& targets, double clip,
                  double value_coef, bool clip_value) {
  Var<S> target = tape.constant(targets);
  Var<S> unclipped = square(sub(values, target));
  Var<S> loss;
  if (clip_value) {
    Var<S> old = tape.constant(old_values);
    Var<S> clipped_v = add(old, clamp(sub(values, old), static_cast<S>(-clip), static_cast<S>(clip)));
    loss = mean(maximum(unclipped, square(sub(clipped_v, target))));
  } else {
    loss = mean(unclipped);
  }
  return affine_scalar(loss, static_cast<S>(value_coef));
}

// Debiased exponential running mean/variance of value targets.
class ValueNormalizer {
 public:
  explicit ValueNormalizer(double beta = 0.99999, double eps = 1e-5) : beta_(beta), eps_(eps) {}

  void update(std::span<const double> xs) {
    if (xs.empty()) return;
    double m = 0.0, sq = 0.0;
    for (double x : xs) {
      m += x;
      sq += x * x;
    }
    m /= static_cast<double>(xs.size());
    sq /= static_cast<double>(xs.size());
    mean_ = beta_ * mean_ + (1 - beta_) * m;
    mean_sq_ = beta_ * mean_sq_ + (1 - beta_) * sq;
    debias_ = beta_ * debias_ + (1 - beta_);
  }

  double mean() const { return debias_ > 0 ? mean_ / std::max(debias_, eps_) : 0.0; }
  double std() const {
    if (debias_ <= 0) return 1.0;
    const double m = mean();
    const double var = mean_sq_ / std::max(debias_, eps_) - m * m;
    return std::sqrt(std::max(var, 1e-2));
  }
  double normalize(double x) const { return (x - mean()) / std(); }
  double denormalize(double x) const { return x * std() + mean(); }

  // Raw accumulator state, for checkpoints.
  double raw_mean() const { return mean_; }
  double raw_mean_sq() const { return mean_sq_; }
  double raw_debias() const { return debias_; }
  void set_raw(double mean, double mean_sq, double debias) {
    mean_ = mean;
    mean_sq_ = mean_sq;
    debias_ = debias;
  }

 private:
  double beta_, eps_;
  double mean_ = 0.0, mean_sq_ = 0.0, debias_ = 0.0;
};

}  // namespace mtend::rl
