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

// Machine-tending game logic on top of the kinematic world.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mtend/errors.hpp"
#include "mtend/layout.hpp"
#include "mtend/rng.hpp"
#include "mtend/world.hpp"

namespace mtend {

struct TendingRules {
  int episode_length = 200;
  int production_delay = 20;
  double pick_margin = 0.05;   // pick when centre is within radius + margin of the anchor
  double place_margin = 0.05;  // place when the disc comes within margin of the storage box

  friend bool operator==(const TendingRules&, const TendingRules&) = default;
};

struct ScenarioConfig {
  LayoutSpec layout = default_layout();
  PhysicsParams physics{};
  TendingRules rules{};
};

struct MachineState {
  bool ready = true;
  int production_timer = 0;
  int uncollected_steps = 0;  // ns_i
  int parts_collected = 0;    // picks taken from this machine

  friend bool operator==(const MachineState&, const MachineState&) = default;
};

struct AgentTaskState {
  bool has_part = false;
  int parts_collected = 0;
  int parts_delivered = 0;
  int collisions = 0;  // contact onsets involving this agent

  friend bool operator==(const AgentTaskState&, const AgentTaskState&) = default;
};

struct ScenarioState {
  int t = 0;
  std::vector<KinematicState> agents;
  std::vector<MachineState> machines;
  std::vector<AgentTaskState> tasks;
  std::vector<BodyPair> active_contacts;  // sorted; previous step's contact set

  friend bool operator==(const ScenarioState&, const ScenarioState&) = default;
};

struct PickEvent {
  int agent = 0;
  int machine = 0;
  friend bool operator==(const PickEvent&, const PickEvent&) = default;
};

struct StepEvents {
  std::vector<PickEvent> picks;
  std::vector<int> places;
  std::vector<ContactEvent> contacts;  // all contacts this step; onset flagged

  friend bool operator==(const StepEvents&, const StepEvents&) = default;

  int onsets_for_agent(int agent) const {
    int count = 0;
    for (const auto& c : contacts) {
      if (c.onset && (c.body_a == agent || c.body_b == agent)) ++count;
    }
    return count;
  }
  int contacts_for_agent(int agent) const {
    int count = 0;
    for (const auto& c : contacts) {
      if (c.body_a == agent || c.body_b == agent) ++count;
    }
    return count;
  }
};

struct PickCandidate {
  int agent = 0;
  double distance = 0.0;
};

// Closest candidate wins; exact ties go to the lowest agent index.
inline int resolve_pick_contention(std::span<const PickCandidate> candidates) {
  if (candidates.empty()) throw UsageError("resolve_pick_contention: no candidates");
  const PickCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.distance < best->distance || (c.distance == best->distance && c.agent < best->agent)) best = &c;
  }
  return best->agent;
}

// Advances production by one step. Machines flagged in `picked_this_step`
// keep the freshly reset timer.
inline void update_production(std::span<MachineState> machines, std::span<const std::uint8_t> picked_this_step = {}) {
  for (std::size_t i = 0; i < machines.size(); ++i) {
    auto& m = machines[i];
    if (i < picked_this_step.size() && picked_this_step[i]) continue;
    if (m.ready) {
      ++m.uncollected_steps;
    } else if (--m.production_timer <= 0) {
      m.production_timer = 0;
      m.ready = true;
      m.uncollected_steps = 0;
    }
  }
}

class TendingScenario {
 public:
  explicit TendingScenario(ScenarioConfig config)
      : config_(std::move(config)), index_(config_.layout), specs_(body_specs(config_.layout)) {
    validate_layout(config_.layout);
    if (config_.rules.episode_length < 1) throw ConfigError("episode_length must be >= 1");
    if (config_.rules.production_delay < 1) throw ConfigError("production_delay must be >= 1");
    const auto boxes = static_boxes(config_.layout);
    static_states_.reserve(boxes.size());
    for (const auto& b : boxes) static_states_.push_back({b.center, {}});
  }

  const ScenarioConfig& config() const { return config_; }
  const LayoutSpec& layout() const { return config_.layout; }
  const BodyIndex& index() const { return index_; }
  std::span<const BodySpec> specs() const { return specs_; }
  int num_agents() const { return index_.num_agents; }
  int num_machines() const { return index_.num_machines; }
  int episode_length() const { return config_.rules.episode_length; }

  // Maximum parts one machine can yield per episode under the metric convention.
  int parts_per_machine_max() const { return config_.rules.episode_length / config_.rules.production_delay; }

  // Jitter draws come from `rng` only when the layout enables it.
  ScenarioState reset(Rng* rng = nullptr) const {
    ScenarioState state;
    const auto& layout = config_.layout;
    for (const Vec2 spawn : layout.spawns) {
      Vec2 p = spawn;
      if (layout.spawn_jitter > 0.0 && rng != nullptr) {
        p.x += uniform(*rng, -layout.spawn_jitter, layout.spawn_jitter);
        p.y += uniform(*rng, -layout.spawn_jitter, layout.spawn_jitter);
      }
      state.agents.push_back({p, {}});
    }
    state.machines.assign(layout.machines.size(), MachineState{});
    state.tasks.assign(layout.spawns.size(), AgentTaskState{});
    return state;
  }

  ScenarioState reset(std::uint64_t seed) const {
    Rng rng = make_stream(seed, RngStream::kSpawnJitter);
    return reset(&rng);
  }

  bool finished(const ScenarioState& state) const { return state.t >= config_.rules.episode_length; }

  // Fills `all` with agent states followed by the static bodies.
  void body_states(const ScenarioState& state, std::vector<KinematicState>& all) const {
    all.clear();
    all.insert(all.end(), state.agents.begin(), state.agents.end());
    all.insert(all.end(), static_states_.begin(), static_states_.end());
  }

  double pick_radius() const { return config_.layout.agent_radius + config_.rules.pick_margin; }

  bool in_place_zone(Vec2 p) const {
    return distance_to_box(p, config_.layout.storage.body) <= config_.layout.agent_radius + config_.rules.place_margin;
  }

  StepEvents step(ScenarioState& state, std::span<const int> actions) const {
    const int n = num_agents();
    const int m = num_machines();
    if (finished(state)) throw EpisodeFinishedError("episode already finished at t=" + std::to_string(state.t));
    if (static_cast<int>(actions.size()) != n) {
      throw ShapeError("scenario_step: expected " + std::to_string(n) + " actions, got " + std::to_string(actions.size()));
    }
    for (const int a : actions) {
      if (a < 0 || a >= kNumActions) throw InvalidActionError("action id " + std::to_string(a) + " outside 0..4");
    }
    const auto& phys = config_.physics;

    // (1) physics
    for (int i = 0; i < n; ++i) {
      const Vec2 f = action_to_force(actions[i], phys.force_gain);
      state.agents[i] = integrate(state.agents[i], f, config_.layout.agent_mass, phys);
    }

    // (2) contacts
    StepEvents events;
    std::vector<KinematicState> bodies;
    body_states(state, bodies);
    events.contacts = detect_contacts(specs_, bodies, state.active_contacts, phys.contact_margin);
    resolve_contacts(specs_, bodies, events.contacts, phys);
    for (int i = 0; i < n; ++i) state.agents[i] = bodies[i];
    state.active_contacts = contact_pairs(events.contacts);
    for (const auto& c : events.contacts) {
      if (!c.onset) continue;
      if (index_.is_agent(c.body_a)) ++state.tasks[c.body_a].collisions;
      if (index_.is_agent(c.body_b)) ++state.tasks[c.body_b].collisions;
    }

    // (3) picks, machines in layout order
    std::vector<std::uint8_t> picked_machine(m, 0);
    std::vector<std::uint8_t> picked_agent(n, 0);
    std::vector<PickCandidate> candidates;
    for (int k = 0; k < m; ++k) {
      if (!state.machines[k].ready) continue;
      candidates.clear();
      const Vec2 anchor = config_.layout.machines[k].anchor;
      for (int i = 0; i < n; ++i) {
        if (state.tasks[i].has_part || picked_agent[i]) continue;
        const double d = distance(state.agents[i].position, anchor);
        if (d <= pick_radius()) candidates.push_back({i, d});
      }
      if (candidates.empty()) continue;
      const int winner = resolve_pick_contention(candidates);
      auto& machine = state.machines[k];
      machine.ready = false;
      machine.production_timer = config_.rules.production_delay;
      machine.uncollected_steps = 0;
      ++machine.parts_collected;
      state.tasks[winner].has_part = true;
      ++state.tasks[winner].parts_collected;
      picked_machine[k] = 1;
      picked_agent[winner] = 1;
      events.picks.push_back({winner, k});
    }

    // (4) places; an agent that picked this step cannot also place
    for (int i = 0; i < n; ++i) {
      auto& task = state.tasks[i];
      if (!task.has_part || picked_agent[i]) continue;
      if (!in_place_zone(state.agents[i].position)) continue;
      task.has_part = false;
      ++task.parts_delivered;
      events.places.push_back(i);
    }

    // (5) production
    update_production(state.machines, picked_machine);

    // (6) clock
    ++state.t;
    return events;
  }

 private:
  ScenarioConfig config_;
  BodyIndex index_;
  std::vector<BodySpec> specs_;
  std::vector<KinematicState> static_states_;
};

}  // namespace mtend
