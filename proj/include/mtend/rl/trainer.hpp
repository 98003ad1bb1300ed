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

// MAPPO with parameter-shared recurrent actors and per-agent centralized
// critics (plain or attention-based). One update = collect a rollout from
// every environment, compute GAE per agent stream, then run clipped-surrogate
// epochs over shuffled minibatches of recurrent chunks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mtend/metrics.hpp"
#include "mtend/nn/checkpoint.hpp"
#include "mtend/nn/layers.hpp"
#include "mtend/rl/gae.hpp"
#include "mtend/rl/networks.hpp"
#include "mtend/rl/ppo.hpp"
#include "mtend/rl/vector_env.hpp"
#include "mtend/rng.hpp"

namespace mtend::rl {

struct TrainConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  int ppo_epochs = 5;
  int minibatches = 2;
  int chunk_length = 10;
  int rollout_length = 200;  // steps per env per update; multiple of chunk_length
  double learning_rate = 5e-4;
  double critic_learning_rate = 5e-4;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double max_grad_norm = 10.0;
  int num_envs = 32;
  long episodes = 2000;
  bool use_value_norm = true;
  bool clip_value_loss = true;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline std::vector<std::string> train_config_violations(const TrainConfig& c) {
  std::vector<std::string> e;
  if (!(c.gamma >= 0 && c.gamma <= 1)) e.push_back("gamma must be in [0, 1]");
  if (!(c.gae_lambda >= 0 && c.gae_lambda <= 1)) e.push_back("gae_lambda must be in [0, 1]");
  if (!(c.clip > 0)) e.push_back("clip must be positive");
  if (c.ppo_epochs < 1) e.push_back("ppo_epochs must be >= 1");
  if (c.minibatches < 1) e.push_back("minibatches must be >= 1");
  if (c.chunk_length < 1) e.push_back("chunk_length must be >= 1");
  if (c.rollout_length < 1 || c.chunk_length < 1 || c.rollout_length % c.chunk_length != 0) {
    e.push_back("rollout_length must be a positive multiple of chunk_length");
  }
  if (!(c.learning_rate >= 0) || !(c.critic_learning_rate >= 0)) e.push_back("learning rates must be non-negative");
  if (!(c.max_grad_norm > 0)) e.push_back("max_grad_norm must be positive");
  if (c.num_envs < 1) e.push_back("num_envs must be >= 1");
  if (c.episodes < 1) e.push_back("episodes must be >= 1");
  if (c.num_envs >= 1 && c.chunk_length >= 1 && c.rollout_length % std::max(1, c.chunk_length) == 0 &&
      c.num_envs * (c.rollout_length / std::max(1, c.chunk_length)) < c.minibatches) {
    e.push_back("fewer recurrent chunks than minibatches");
  }
  return e;
}

// Rollout storage. Row (t, e, i) = (t * envs + e) * agents + i.
template <typename S>
struct TrajectoryBatch {
  int steps = 0, envs = 0, agents = 0, obs_dim = 0, chunk = 0, hidden = 0;
  Matrix<S> obs;
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> values;  // unnormalized
  std::vector<double> rewards;
  Matrix<double> reward_components;  // [rows x 7]
  std::vector<double> dones;         // per (t, e): episode ended after step t
  std::vector<Matrix<S>> actor_h0;   // per chunk: [envs*agents x H]
  std::vector<Matrix<S>> critic_h0;
  std::vector<double> bootstrap;  // per (e, i)
  std::vector<double> advantages;
  std::vector<double> returns;

  int rows() const { return steps * envs * agents; }
  int row(int t, int e, int i) const { return (t * envs + e) * agents + i; }
  int num_chunks() const { return steps / chunk; }
};

struct UpdateStats {
  long update = 0;
  long episodes_done = 0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double ratio_mean = 0.0;
  double actor_grad_norm = 0.0;
  double critic_grad_norm = 0.0;
  double mean_reward = 0.0;
};

enum class ActionMode { kSample, kGreedy };

inline std::string update_stats_csv_header() {
  return "update,episodes_done,policy_loss,value_loss,entropy,approx_kl,clip_fraction,ratio_mean,actor_grad_norm,critic_grad_norm,mean_reward";
}

inline std::string update_stats_csv_row(const UpdateStats& s) {
  std::ostringstream os;
  os << std::setprecision(8) << s.update << ',' << s.episodes_done << ',' << s.policy_loss << ',' << s.value_loss << ','
     << s.entropy << ',' << s.approx_kl << ',' << s.clip_fraction << ',' << s.ratio_mean << ',' << s.actor_grad_norm << ','
     << s.critic_grad_norm << ',' << s.mean_reward;
  return os.str();
}

template <typename S>
class MappoTrainer {
 public:
  using EpisodeCallback = std::function<void(long episode_index, const EpisodeMetrics&)>;

  MappoTrainer(const ScenarioConfig& scenario, const ObservationConfig& obs, const RewardConfig& reward,
               const TrainConfig& train, const NetworkConfig& net, CriticVariant variant, std::uint64_t seed)
      : train_(train),
        net_(net),
        variant_(variant),
        seed_(seed),
        env_(scenario, obs, reward, train.num_envs),
        actor_(env_.obs_dim(), net),
        critic_(variant, env_.obs_dim(), env_.num_agents(), net),
        actor_opt_(train.learning_rate),
        critic_opt_(train.critic_learning_rate) {
    const auto errors = train_config_violations(train);
    if (!errors.empty()) {
      std::string msg;
      for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
      throw ConfigError("invalid train config: " + msg);
    }
    Rng init = make_stream(seed_, RngStream::kInit);
    actor_.init(init);
    critic_.init(init);
  }

  const TrainConfig& train_config() const { return train_; }
  VectorEnv& env() { return env_; }
  ActorNetwork<S>& actor() { return actor_; }
  CriticNetwork<S>& critic() { return critic_; }
  ValueNormalizer& value_norm() { return value_norm_; }
  long updates_done() const { return updates_; }
  long episodes_done() const { return episodes_; }
  void on_episode(EpisodeCallback cb) { episode_cb_ = std::move(cb); }

  long updates_needed(long episodes) const {
    const long per_update = static_cast<long>(train_.num_envs) * episodes_per_env_per_update();
    return (episodes + per_update - 1) / per_update;
  }

  // Collects one rollout from freshly reset environments.
  TrajectoryBatch<S> collect_rollout(ActionMode mode, std::uint64_t epoch) {
    env_.reset_all(seed_, epoch);
    Rng rng = make_stream(seed_, RngStream::kActions, epoch);
    return collect(mode, rng, epoch);
  }

  // Fills advantages/returns via per-(env, agent) GAE.
  void compute_advantages(TrajectoryBatch<S>& b) const {
    b.advantages.assign(b.rows(), 0.0);
    b.returns.assign(b.rows(), 0.0);
    std::vector<double> r(b.steps), v(b.steps), d(b.steps);
    for (int e = 0; e < b.envs; ++e) {
      for (int i = 0; i < b.agents; ++i) {
        for (int t = 0; t < b.steps; ++t) {
          r[t] = b.rewards[b.row(t, e, i)];
          v[t] = b.values[b.row(t, e, i)];
          d[t] = b.dones[t * b.envs + e];
        }
        const auto out = compute_gae(r, v, d, b.bootstrap[e * b.agents + i], train_.gamma, train_.gae_lambda);
        for (int t = 0; t < b.steps; ++t) {
          b.advantages[b.row(t, e, i)] = out.advantages[t];
          b.returns[b.row(t, e, i)] = out.returns[t];
        }
      }
    }
  }

  // PPO epochs over minibatches of (env, chunk) units; all agents of a unit
  // stay together so the critic sees complete agent sets.
  UpdateStats optimize(TrajectoryBatch<S>& b, std::uint64_t epoch) {
    if (b.advantages.empty()) compute_advantages(b);
    if (train_.use_value_norm) value_norm_.update(b.returns);
    Rng rng = make_stream(seed_, RngStream::kMinibatch, epoch);
    const int chunks = b.num_chunks();
    std::vector<int> units(b.envs * chunks);
    std::iota(units.begin(), units.end(), 0);

    UpdateStats stats;
    int count = 0;
    auto actor_params = actor_.parameters();
    auto critic_params = critic_.parameters();
    for (int ep = 0; ep < train_.ppo_epochs; ++ep) {
      shuffle(units, rng);
      for (int mb = 0; mb < train_.minibatches; ++mb) {
        const std::size_t lo = units.size() * mb / train_.minibatches;
        const std::size_t hi = units.size() * (mb + 1) / train_.minibatches;
        if (hi <= lo) continue;
        const auto s = minibatch_step(b, std::span<const int>(units).subspan(lo, hi - lo), actor_params, critic_params);
        stats.policy_loss += s.policy_loss;
        stats.value_loss += s.value_loss;
        stats.entropy += s.entropy;
        stats.approx_kl += s.approx_kl;
        stats.clip_fraction += s.clip_fraction;
        stats.ratio_mean += s.ratio_mean;
        stats.actor_grad_norm += s.actor_grad_norm;
        stats.critic_grad_norm += s.critic_grad_norm;
        ++count;
      }
    }
    if (count > 0) {
      for (double* f : {&stats.policy_loss, &stats.value_loss, &stats.entropy, &stats.approx_kl, &stats.clip_fraction,
                        &stats.ratio_mean, &stats.actor_grad_norm, &stats.critic_grad_norm}) {
        *f /= count;
      }
    }
    stats.mean_reward = std::accumulate(b.rewards.begin(), b.rewards.end(), 0.0) / std::max(1, b.rows());
    return stats;
  }

  // Collect + optimize. Episode callbacks fire for every finished episode.
  UpdateStats update() {
    const std::uint64_t epoch = static_cast<std::uint64_t>(updates_);
    TrajectoryBatch<S> batch = collect_rollout(ActionMode::kSample, epoch);
    UpdateStats stats = optimize(batch, epoch);
    ++updates_;
    stats.update = updates_;
    stats.episodes_done = episodes_;
    return stats;
  }

  // Greedy evaluation episodes; uses its own jitter/epoch streams.
  std::vector<EpisodeMetrics> evaluate(long episodes, std::uint64_t eval_seed) {
    std::vector<EpisodeMetrics> out;
    auto saved_cb = std::move(episode_cb_);
    const long saved_episodes = episodes_;
    episode_cb_ = [&](long, const EpisodeMetrics& m) {
      if (static_cast<long>(out.size()) < episodes) out.push_back(m);
    };
    for (long round = 0; static_cast<long>(out.size()) < episodes; ++round) {
      const std::uint64_t epoch = (1ull << 40) + static_cast<std::uint64_t>(round);
      env_.reset_all(eval_seed, epoch);
      Rng rng = make_stream(eval_seed, RngStream::kEval, epoch);
      collect(ActionMode::kGreedy, rng, epoch);
    }
    episodes_ = saved_episodes;
    episode_cb_ = std::move(saved_cb);
    return out;
  }

  // Parameters, optimizer moments, value normalizer and counters.
  nn::Checkpoint checkpoint() {
    nn::Checkpoint ck;
    ck.push_back(nn::scalar_entry("meta/obs_dim", env_.obs_dim()));
    ck.push_back(nn::scalar_entry("meta/num_agents", env_.num_agents()));
    ck.push_back(nn::scalar_entry("meta/critic_variant", variant_ == CriticVariant::kAttention ? 1 : 0));
    ck.push_back(nn::scalar_entry("meta/updates_done", static_cast<double>(updates_)));
    ck.push_back(nn::scalar_entry("meta/episodes_done", static_cast<double>(episodes_)));
    ck.push_back(nn::scalar_entry("value_norm/mean", value_norm_.raw_mean()));
    ck.push_back(nn::scalar_entry("value_norm/mean_sq", value_norm_.raw_mean_sq()));
    ck.push_back(nn::scalar_entry("value_norm/debias", value_norm_.raw_debias()));
    auto ap = actor_.parameters();
    auto cp = critic_.parameters();
    nn::append_parameters(ck, ap);
    nn::append_parameters(ck, cp);
    append_optimizer(ck, "optim/actor", actor_opt_, ap);
    append_optimizer(ck, "optim/critic", critic_opt_, cp);
    return ck;
  }

  // Throws ShapeError naming the first mismatching field.
  void restore(const nn::Checkpoint& ck, bool with_optimizer = true) {
    const int obs = static_cast<int>(nn::read_scalar(ck, "meta/obs_dim"));
    if (obs != env_.obs_dim()) {
      throw ShapeError("observation length: checkpoint " + std::to_string(obs) + " vs config " + std::to_string(env_.obs_dim()) +
                       " (check include_velocities/include_time_since_ready/representation/include_blockers/include_walls)");
    }
    const int agents = static_cast<int>(nn::read_scalar(ck, "meta/num_agents"));
    if (agents != env_.num_agents()) {
      throw ShapeError("num_agents: checkpoint " + std::to_string(agents) + " vs config " + std::to_string(env_.num_agents()));
    }
    const bool attn = nn::read_scalar(ck, "meta/critic_variant") != 0.0;
    if (attn != (variant_ == CriticVariant::kAttention)) {
      throw ShapeError(std::string("critic variant: checkpoint ") + (attn ? "attention" : "plain") + " vs config " +
                       to_string(variant_));
    }
    auto ap = actor_.parameters();
    auto cp = critic_.parameters();
    nn::load_parameters(ck, ap);
    nn::load_parameters(ck, cp);
    value_norm_.set_raw(nn::read_scalar(ck, "value_norm/mean"), nn::read_scalar(ck, "value_norm/mean_sq"),
                        nn::read_scalar(ck, "value_norm/debias"));
    updates_ = static_cast<long>(nn::read_scalar(ck, "meta/updates_done"));
    episodes_ = static_cast<long>(nn::read_scalar(ck, "meta/episodes_done"));
    if (with_optimizer) {
      restore_optimizer(ck, "optim/actor", actor_opt_, ap);
      restore_optimizer(ck, "optim/critic", critic_opt_, cp);
    }
  }

 private:
  struct MinibatchStats {
    double policy_loss, value_loss, entropy, approx_kl, clip_fraction, ratio_mean, actor_grad_norm, critic_grad_norm;
  };

  long episodes_per_env_per_update() const {
    const int t = env_.scenario().episode_length();
    return std::max(1, train_.rollout_length / t);
  }

  static void shuffle(std::vector<int>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(v[i - 1], v[std::min(j, i - 1)]);
    }
  }

  static int sample_categorical(const S* logits, Rng& rng) {
    double mx = logits[0];
    for (int k = 1; k < kNumActions; ++k) mx = std::max(mx, static_cast<double>(logits[k]));
    double p[kNumActions];
    double total = 0.0;
    for (int k = 0; k < kNumActions; ++k) total += p[k] = std::exp(static_cast<double>(logits[k]) - mx);
    double u = uniform01(rng) * total;
    for (int k = 0; k < kNumActions; ++k) {
      if ((u -= p[k]) < 0.0) return k;
    }
    return kNumActions - 1;
  }

  static int argmax(const S* logits) {
    int best = 0;
    for (int k = 1; k < kNumActions; ++k) {
      if (logits[k] > logits[best]) best = k;
    }
    return best;
  }

  static double log_prob(const S* logits, int a) {
    double mx = logits[0];
    for (int k = 1; k < kNumActions; ++k) mx = std::max(mx, static_cast<double>(logits[k]));
    double total = 0.0;
    for (int k = 0; k < kNumActions; ++k) total += std::exp(static_cast<double>(logits[k]) - mx);
    return static_cast<double>(logits[a]) - mx - std::log(total);
  }

  TrajectoryBatch<S> collect(ActionMode mode, Rng& rng, std::uint64_t epoch) {
    const int E = env_.num_envs(), N = env_.num_agents(), R = E * N, H = net_.hidden;
    TrajectoryBatch<S> b;
    b.steps = train_.rollout_length;
    b.envs = E;
    b.agents = N;
    b.obs_dim = env_.obs_dim();
    b.chunk = train_.chunk_length;
    b.hidden = H;
    b.obs.resize(b.rows(), b.obs_dim);
    b.actions.resize(b.rows());
    b.log_probs.resize(b.rows());
    b.values.resize(b.rows());
    b.rewards.resize(b.rows());
    b.reward_components.resize(b.rows(), kNumRewardComponents);
    b.dones.assign(static_cast<std::size_t>(b.steps) * E, 0.0);
    b.bootstrap.assign(R, 0.0);

    Matrix<S> h_actor = Matrix<S>::Zero(R, H);
    Matrix<S> h_critic = Matrix<S>::Zero(R, H);
    Matrix<S> obs;
    std::vector<int> actions(R);
    std::vector<RewardBreakdown> rewards;
    std::vector<std::uint8_t> done;
    std::vector<FinishedEpisode> finished;

    for (int t = 0; t < b.steps; ++t) {
      if (t % b.chunk == 0) {
        b.actor_h0.push_back(h_actor);
        b.critic_h0.push_back(h_critic);
      }
      env_.observe(obs);
      b.obs.middleRows(static_cast<Eigen::Index>(t) * R, R) = obs;
      {
        Tape<S> tape(false);
        auto a = actor_.forward(tape, tape.constant(obs), tape.constant(h_actor), 1);
        auto c = critic_.forward(tape, tape.constant(obs), tape.constant(h_critic), 1);
        const auto& logits = a.out.value();
        for (int r = 0; r < R; ++r) {
          const S* row = logits.row(r).data();
          actions[r] = mode == ActionMode::kSample ? sample_categorical(row, rng) : argmax(row);
          b.actions[t * R + r] = actions[r];
          b.log_probs[t * R + r] = log_prob(row, actions[r]);
          const double v = static_cast<double>(c.out.value()(r, 0));
          b.values[t * R + r] = train_.use_value_norm ? value_norm_.denormalize(v) : v;
        }
        h_actor = a.hidden.value();
        h_critic = c.hidden.value();
      }
      finished.clear();
      env_.step(actions, rewards, done, finished);
      for (int e = 0; e < E; ++e) {
        for (int i = 0; i < N; ++i) {
          const auto& rw = rewards[e][i];
          b.rewards[b.row(t, e, i)] = rw.total;
          const auto comps = rw.components();
          for (int k = 0; k < kNumRewardComponents; ++k) b.reward_components(b.row(t, e, i), k) = comps[k];
        }
        b.dones[t * E + e] = done[e];
      }
      for (auto& f : finished) {
        if (episode_cb_) episode_cb_(episodes_, f.metrics);
        ++episodes_;
        env_.reset(f.env, seed_, (epoch << 8) + static_cast<std::uint64_t>(t + 1));
        h_actor.middleRows(f.env * N, N).setZero();
        h_critic.middleRows(f.env * N, N).setZero();
      }
    }
    // Bootstrap for streams still running at the end of the rollout.
    bool any_running = false;
    for (int e = 0; e < E; ++e) any_running = any_running || b.dones[(b.steps - 1) * E + e] == 0.0;
    if (any_running) {
      env_.observe(obs);
      Tape<S> tape(false);
      auto c = critic_.forward(tape, tape.constant(obs), tape.constant(h_critic), 1);
      for (int e = 0; e < E; ++e) {
        if (b.dones[(b.steps - 1) * E + e] != 0.0) continue;
        for (int i = 0; i < N; ++i) {
          const double v = static_cast<double>(c.out.value()(e * N + i, 0));
          b.bootstrap[e * N + i] = train_.use_value_norm ? value_norm_.denormalize(v) : v;
        }
      }
    }
    return b;
  }

  MinibatchStats minibatch_step(const TrajectoryBatch<S>& b, std::span<const int> units, const nn::ParamList<S>& actor_params,
                                const nn::ParamList<S>& critic_params) {
    const int L = b.chunk, N = b.agents, U = static_cast<int>(units.size()), R = U * N;
    const int chunks = b.num_chunks();
    Matrix<S> obs(static_cast<Eigen::Index>(L) * R, b.obs_dim);
    Matrix<S> ha(R, b.hidden), hc(R, b.hidden);
    Matrix<S> old_logp(L * R, 1), old_values(L * R, 1), targets(L * R, 1), adv_m(L * R, 1);
    std::vector<int> actions(L * R);
    std::vector<double> adv(L * R);
    for (int u = 0; u < U; ++u) {
      const int e = units[u] / chunks;
      const int c = units[u] % chunks;
      for (int i = 0; i < N; ++i) {
        ha.row(u * N + i) = b.actor_h0[c].row(e * N + i);
        hc.row(u * N + i) = b.critic_h0[c].row(e * N + i);
      }
      for (int l = 0; l < L; ++l) {
        for (int i = 0; i < N; ++i) {
          const int src = b.row(c * L + l, e, i);
          const int dst = l * R + u * N + i;
          obs.row(dst) = b.obs.row(src);
          actions[dst] = b.actions[src];
          old_logp(dst, 0) = static_cast<S>(b.log_probs[src]);
          adv[dst] = b.advantages[src];
          const double v = b.values[src];
          const double ret = b.returns[src];
          old_values(dst, 0) = static_cast<S>(train_.use_value_norm ? value_norm_.normalize(v) : v);
          targets(dst, 0) = static_cast<S>(train_.use_value_norm ? value_norm_.normalize(ret) : ret);
        }
      }
    }
    normalize_advantages(adv);
    for (int k = 0; k < L * R; ++k) adv_m(k, 0) = static_cast<S>(adv[k]);

    MinibatchStats s{};
    {
      nn::zero_grad(actor_params);
      Tape<S> tape;
      auto out = actor_.forward(tape, tape.constant(obs), tape.constant(ha), L);
      auto loss = actor_loss(tape, out.out, actions, old_logp, adv_m, train_.clip, train_.entropy_coef);
      const double lv = static_cast<double>(loss.loss.value()(0, 0));
      if (!std::isfinite(lv)) throw NumericError("non-finite actor loss " + std::to_string(lv) + " at update " + std::to_string(updates_));
      tape.backward(loss.loss);
      s.actor_grad_norm = nn::clip_grad_norm(actor_params, train_.max_grad_norm);
      if (!std::isfinite(s.actor_grad_norm)) throw NumericError("non-finite actor gradient at update " + std::to_string(updates_));
      actor_opt_.step(actor_params);
      s.policy_loss = loss.policy_loss;
      s.entropy = loss.entropy;
      s.approx_kl = loss.approx_kl;
      s.clip_fraction = loss.clip_fraction;
      s.ratio_mean = loss.ratio_mean;
    }
    {
      nn::zero_grad(critic_params);
      Tape<S> tape;
      auto out = critic_.forward(tape, tape.constant(obs), tape.constant(hc), L);
      auto loss = value_loss(tape, out.out, old_values, targets, train_.clip, train_.value_coef, train_.clip_value_loss);
      const double lv = static_cast<double>(loss.value()(0, 0));
      if (!std::isfinite(lv)) throw NumericError("non-finite value loss " + std::to_string(lv) + " at update " + std::to_string(updates_));
      tape.backward(loss);
      s.critic_grad_norm = nn::clip_grad_norm(critic_params, train_.max_grad_norm);
      if (!std::isfinite(s.critic_grad_norm)) throw NumericError("non-finite critic gradient at update " + std::to_string(updates_));
      critic_opt_.step(critic_params);
      s.value_loss = lv;
    }
    return s;
  }

  static void append_optimizer(nn::Checkpoint& ck, const std::string& prefix, nn::Adam<S>& opt, const nn::ParamList<S>& params) {
    ck.push_back(nn::scalar_entry(prefix + "/steps", static_cast<double>(opt.steps())));
    if (opt.steps() == 0) return;
    for (std::size_t i = 0; i < params.size(); ++i) {
      ck.push_back(nn::to_entry(prefix + "/m/" + params[i]->name, opt.first_moments()[i]));
      ck.push_back(nn::to_entry(prefix + "/v/" + params[i]->name, opt.second_moments()[i]));
    }
  }

  static void restore_optimizer(const nn::Checkpoint& ck, const std::string& prefix, nn::Adam<S>& opt,
                                const nn::ParamList<S>& params) {
    const long steps = static_cast<long>(nn::read_scalar(ck, prefix + "/steps"));
    opt.set_steps(steps);
    opt.first_moments().clear();
    opt.second_moments().clear();
    if (steps == 0) return;
    for (const auto* p : params) {
      Matrix<S> m(p->value.rows(), p->value.cols()), v(p->value.rows(), p->value.cols());
      nn::load_matrix(ck, prefix + "/m/" + p->name, m);
      nn::load_matrix(ck, prefix + "/v/" + p->name, v);
      opt.first_moments().push_back(std::move(m));
      opt.second_moments().push_back(std::move(v));
    }
  }

  TrainConfig train_;
  NetworkConfig net_;
  CriticVariant variant_;
  std::uint64_t seed_;
  VectorEnv env_;
  ActorNetwork<S> actor_;
  CriticNetwork<S> critic_;
  nn::Adam<S> actor_opt_;
  nn::Adam<S> critic_opt_;
  ValueNormalizer value_norm_;
  long updates_ = 0;
  long episodes_ = 0;
  EpisodeCallback episode_cb_;
};

}  // namespace mtend::rl
