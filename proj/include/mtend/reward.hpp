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

// Componentized per-agent rewards: pick, place, collision, progress towards
// the closest ready machine, progress towards storage, uncollected-part
// penalty and time penalty. The total is the plain sum of the seven.

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mtend/errors.hpp"
#include "mtend/scenario.hpp"

namespace mtend {

enum class UncollectedMode { kFixed, kIncreasing };

struct RewardConfig {
  double pick = 1.0;
  double place = 2.0;
  double collision = -1.0;
  double progress_scale = 0.5;    // pr
  double uncollected = -0.005;    // u
  double time_penalty = -0.01;    // tp
  bool share_pick_place = false;
  UncollectedMode uncollected_mode = UncollectedMode::kFixed;
  bool enable_time_penalty = true;
  bool enable_distance_shaping = true;
  bool enable_uncollected_penalty = true;
  bool collision_on_onset = true;  // false: penalize every contacting step

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

inline std::vector<std::string> reward_config_violations(const RewardConfig& c) {
  std::vector<std::string> errors;
  auto finite = [&](double v, const char* name) {
    if (!std::isfinite(v)) errors.push_back(std::string(name) + " must be finite");
  };
  finite(c.pick, "pick");
  finite(c.place, "place");
  finite(c.collision, "collision");
  finite(c.progress_scale, "progress_scale");
  finite(c.uncollected, "uncollected");
  finite(c.time_penalty, "time_penalty");
  if (c.pick < 0) errors.push_back("pick reward must be non-negative");
  if (c.place < 0) errors.push_back("place reward must be non-negative");
  if (c.collision > 0) errors.push_back("collision penalty must be non-positive");
  if (c.uncollected > 0) errors.push_back("uncollected penalty must be non-positive");
  if (c.time_penalty > 0) errors.push_back("time penalty must be non-positive");
  return errors;
}

inline constexpr int kNumRewardComponents = 7;

inline constexpr std::array<const char*, kNumRewardComponents> kRewardComponentNames = {
    "r_pick", "r_place", "r_collision", "r_progress_machine", "r_progress_storage", "r_uncollected", "r_time"};

struct AgentReward {
  double pick = 0.0;
  double place = 0.0;
  double collision = 0.0;
  double progress_machine = 0.0;
  double progress_storage = 0.0;
  double uncollected = 0.0;
  double time = 0.0;
  double total = 0.0;

  std::array<double, kNumRewardComponents> components() const {
    return {pick, place, collision, progress_machine, progress_storage, uncollected, time};
  }
};

using RewardBreakdown = std::vector<AgentReward>;

inline double progress_to_machine(double prev_distance, double curr_distance, bool has_part, double scale) {
  return has_part ? 0.0 : scale * (prev_distance - curr_distance);
}

inline double progress_to_storage(double prev_distance, double curr_distance, bool has_part, double scale) {
  return has_part ? scale * (prev_distance - curr_distance) : 0.0;
}

inline double uncollected_penalty(std::span<const MachineState> machines, const RewardConfig& config) {
  if (config.uncollected_mode == UncollectedMode::kFixed) {
    int ready = 0;
    for (const auto& m : machines) ready += m.ready ? 1 : 0;
    return ready * config.uncollected;
  }
  long steps = 0;
  for (const auto& m : machines) steps += m.ready ? m.uncollected_steps : 0;
  return static_cast<double>(steps) * config.uncollected;
}

// Index of the ready machine (in `readiness`) whose anchor is closest to `p`,
// or -1 when none is ready. Ties go to the lowest index.
inline int closest_ready_machine(const LayoutSpec& layout, std::span<const MachineState> readiness, Vec2 p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < readiness.size(); ++m) {
    if (!readiness[m].ready) continue;
    const double d = distance(p, layout.machines[m].anchor);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(m);
    }
  }
  return best;
}

// `curr` must be the successor of `prev` produced by the step that emitted
// `events`. Progress shaping branches on the pre-step has-part flag and
// targets the closest machine that was ready before the step, measuring both
// distances against that same target.
inline RewardBreakdown compute_rewards(const TendingScenario& scenario, const ScenarioState& prev,
                                       const ScenarioState& curr, const StepEvents& events, const RewardConfig& config) {
  const int n = scenario.num_agents();
  if (curr.t != prev.t + 1 || static_cast<int>(prev.agents.size()) != n || static_cast<int>(curr.agents.size()) != n ||
      prev.machines.size() != curr.machines.size()) {
    throw UsageError("compute_rewards: states are not consecutive (t=" + std::to_string(prev.t) + " -> " +
                     std::to_string(curr.t) + ")");
  }
  const auto& layout = scenario.layout();
  RewardBreakdown out(n);

  const double global_uncollected = config.enable_uncollected_penalty ? uncollected_penalty(curr.machines, config) : 0.0;
  const int num_picks = static_cast<int>(events.picks.size());
  const int num_places = static_cast<int>(events.places.size());

  for (int i = 0; i < n; ++i) {
    auto& r = out[i];
    if (config.share_pick_place) {
      r.pick = config.pick * num_picks;
      r.place = config.place * num_places;
    } else {
      for (const auto& p : events.picks) r.pick += p.agent == i ? config.pick : 0.0;
      for (const int a : events.places) r.place += a == i ? config.place : 0.0;
    }
    const int hits = config.collision_on_onset ? events.onsets_for_agent(i) : events.contacts_for_agent(i);
    r.collision = config.collision * hits;

    if (config.enable_distance_shaping) {
      const Vec2 p0 = prev.agents[i].position;
      const Vec2 p1 = curr.agents[i].position;
      const bool had_part = prev.tasks[i].has_part;
      if (had_part) {
        const Vec2 anchor = layout.storage.anchor;
        r.progress_storage = progress_to_storage(distance(p0, anchor), distance(p1, anchor), true, config.progress_scale);
      } else {
        const int target = closest_ready_machine(layout, prev.machines, p1);
        if (target >= 0) {
          const Vec2 anchor = layout.machines[target].anchor;
          r.progress_machine =
              progress_to_machine(distance(p0, anchor), distance(p1, anchor), false, config.progress_scale);
        }
      }
    }
    r.uncollected = global_uncollected;
    if (config.enable_time_penalty && r.pick == 0.0 && r.place == 0.0 && global_uncollected == 0.0) {
      r.time = config.time_penalty;
    }
    r.total = r.pick + r.place + r.collision + r.progress_machine + r.progress_storage + r.uncollected + r.time;
  }
  return out;
}

}  // namespace mtend
