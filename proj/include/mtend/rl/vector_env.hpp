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

// A batch of independent tending episodes stepped in lockstep, producing
// observations, per-component rewards and finished-episode metrics.

#include <functional>
#include <span>
#include <vector>

#include "mtend/metrics.hpp"
#include "mtend/nn/autodiff.hpp"
#include "mtend/observation.hpp"
#include "mtend/reward.hpp"
#include "mtend/rng.hpp"
#include "mtend/scenario.hpp"

namespace mtend::rl {

struct EnvTransition {
  int env = 0;
  const ScenarioState* prev = nullptr;
  const ScenarioState* curr = nullptr;
  std::span<const int> actions;
  const StepEvents* events = nullptr;
  const RewardBreakdown* rewards = nullptr;
};

struct FinishedEpisode {
  int env = 0;
  EpisodeMetrics metrics;
};

class VectorEnv {
 public:
  using StepObserver = std::function<void(const EnvTransition&)>;
  using ResetObserver = std::function<void(int env, const ScenarioState&)>;

  VectorEnv(const ScenarioConfig& scenario, const ObservationConfig& obs, const RewardConfig& reward, int num_envs)
      : scenario_(scenario),
        observer_(scenario_.layout(), scenario_.episode_length(), obs),
        reward_(reward),
        states_(num_envs),
        running_(num_envs) {
    if (num_envs < 1) throw ConfigError("num_envs must be >= 1");
  }

  const TendingScenario& scenario() const { return scenario_; }
  const ObservationBuilder& observation() const { return observer_; }
  const RewardConfig& reward_config() const { return reward_; }
  int num_envs() const { return static_cast<int>(states_.size()); }
  int num_agents() const { return scenario_.num_agents(); }
  int obs_dim() const { return observer_.dim(); }
  const ScenarioState& state(int env) const { return states_[env]; }

  void on_step(StepObserver f) { step_observer_ = std::move(f); }
  void on_reset(ResetObserver f) { reset_observer_ = std::move(f); }

  // Spawn jitter for env e in epoch k is drawn from stream (seed, kSpawnJitter, k * 2^16 + e).
  void reset(int env, std::uint64_t seed, std::uint64_t epoch) {
    Rng rng = make_stream(seed, RngStream::kSpawnJitter, (epoch << 16) + static_cast<std::uint64_t>(env));
    states_[env] = scenario_.reset(&rng);
    running_[env] = EpisodeMetrics{};
    if (reset_observer_) reset_observer_(env, states_[env]);
  }

  void reset_all(std::uint64_t seed, std::uint64_t epoch) {
    for (int e = 0; e < num_envs(); ++e) reset(e, seed, epoch);
  }

  // Rows e*N + i.
  template <typename S>
  void observe(nn::Matrix<S>& out) const {
    const int n = num_agents();
    out.resize(static_cast<Eigen::Index>(num_envs()) * n, obs_dim());
    std::vector<double> buf(obs_dim());
    for (int e = 0; e < num_envs(); ++e) {
      for (int i = 0; i < n; ++i) {
        observer_.build(states_[e], i, buf);
        for (int k = 0; k < obs_dim(); ++k) out(e * n + i, k) = static_cast<S>(buf[k]);
      }
    }
  }

  // Steps every env with actions[e*N + i]. Fills `rewards` (one breakdown per
  // env) and `done` (episode reached its horizon). Finished episodes are
  // appended to `finished`; those envs are left terminal until reset.
  void step(std::span<const int> actions, std::vector<RewardBreakdown>& rewards, std::vector<std::uint8_t>& done,
            std::vector<FinishedEpisode>& finished) {
    const int n = num_agents();
    if (static_cast<int>(actions.size()) != num_envs() * n) {
      throw ShapeError("VectorEnv::step: " + std::to_string(actions.size()) + " actions for " + std::to_string(num_envs()) +
                       " envs x " + std::to_string(n) + " agents");
    }
    rewards.resize(num_envs());
    done.assign(num_envs(), 0);
    for (int e = 0; e < num_envs(); ++e) {
      const ScenarioState prev = states_[e];
      const auto act = actions.subspan(static_cast<std::size_t>(e) * n, n);
      const StepEvents events = scenario_.step(states_[e], act);
      rewards[e] = compute_rewards(scenario_, prev, states_[e], events, reward_);
      accumulate_returns(running_[e], rewards[e]);
      if (step_observer_) step_observer_({e, &prev, &states_[e], act, &events, &rewards[e]});
      if (scenario_.finished(states_[e])) {
        done[e] = 1;
        EpisodeMetrics m = episode_metrics(scenario_, states_[e]);
        m.return_total = running_[e].return_total;
        m.component_returns = running_[e].component_returns;
        finished.push_back({e, std::move(m)});
      }
    }
  }

 private:
  TendingScenario scenario_;
  ObservationBuilder observer_;
  RewardConfig reward_;
  std::vector<ScenarioState> states_;
  std::vector<EpisodeMetrics> running_;
  StepObserver step_observer_;
  ResetObserver reset_observer_;
};

}  // namespace mtend::rl
