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

// Per-agent observation vectors.
//
// Field order (fixed, so checkpoints stay portable):
//   self:     absolute position (2), has-part flag (1)
//   machines: relative position (P), ready flag (1), [time since ready (1)]   x M
//   storage:  relative position (P)
//   others:   relative position (P), has-part flag (1), [velocity (2)]       x (N-1), ascending index
//   blockers: relative position (P)                                           x B, optional
//   walls:    relative position (P)                                           x 4, optional
// where P = 2 for centre points and 4 for two opposite corners (min, max).
// Agents use their bounding-box corners in the two-corner representation.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mtend/layout.hpp"
#include "mtend/scenario.hpp"

namespace mtend {

enum class EntityRepresentation { kCenter, kTwoCorners };

struct ObservationConfig {
  bool include_velocities = false;
  bool include_time_since_ready = false;
  bool normalize = true;
  EntityRepresentation representation = EntityRepresentation::kCenter;
  bool include_blockers = false;
  bool include_walls = true;

  friend bool operator==(const ObservationConfig&, const ObservationConfig&) = default;
};

struct ObservationField {
  std::string name;
  int offset = 0;
  int width = 0;
};

// Relative offsets use a symmetric frame wide enough for any static point.
struct NormalizationFrame {
  Vec2 world_min;
  Vec2 world_max;
  Vec2 relative_extent;

  explicit NormalizationFrame(const LayoutSpec& layout)
      : world_min(layout.world_min),
        world_max(layout.world_max),
        relative_extent(layout.extent() + Vec2{2 * layout.wall_thickness, 2 * layout.wall_thickness}) {}
};

struct NormalizeDiagnostics {
  long clamped = 0;
};

inline double clamp_unit(double v, NormalizeDiagnostics* diag) {
  if (v < 0.0 || v > 1.0) {
    if (diag != nullptr) ++diag->clamped;
    return std::clamp(v, 0.0, 1.0);
  }
  return v;
}

inline Vec2 normalize_absolute(Vec2 p, Vec2 world_min, Vec2 world_max, NormalizeDiagnostics* diag = nullptr) {
  const Vec2 ext = world_max - world_min;
  return {clamp_unit((p.x - world_min.x) / ext.x, diag), clamp_unit((p.y - world_min.y) / ext.y, diag)};
}

inline Vec2 normalize_relative(Vec2 p, Vec2 extent, NormalizeDiagnostics* diag = nullptr) {
  return {clamp_unit((p.x + extent.x) / (2 * extent.x), diag), clamp_unit((p.y + extent.y) / (2 * extent.y), diag)};
}

class ObservationBuilder {
 public:
  ObservationBuilder(const LayoutSpec& layout, int episode_length, ObservationConfig config)
      : layout_(layout), frame_(layout), episode_length_(episode_length), config_(config) {
    build_schema();
  }

  const ObservationConfig& config() const { return config_; }
  int dim() const { return dim_; }
  const std::vector<ObservationField>& schema() const { return schema_; }
  const NormalizeDiagnostics& diagnostics() const { return diag_; }

  static int dimension(const ObservationConfig& c, int num_agents, int num_machines, int num_blockers) {
    const int p = c.representation == EntityRepresentation::kCenter ? 2 : 4;
    int d = 3;
    d += num_machines * (p + 1 + (c.include_time_since_ready ? 1 : 0));
    d += p;
    d += (num_agents - 1) * (p + 1 + (c.include_velocities ? 2 : 0));
    if (c.include_blockers) d += num_blockers * p;
    if (c.include_walls) d += 4 * p;
    return d;
  }

  void build(const ScenarioState& state, int agent, std::span<double> out) const {
    if (static_cast<int>(out.size()) != dim_) {
      throw ShapeError("observation buffer has " + std::to_string(out.size()) + " entries, expected " + std::to_string(dim_));
    }
    const Vec2 self = state.agents.at(agent).position;
    std::size_t k = 0;
    auto put = [&](double v) { out[k++] = v; };
    auto put_abs = [&](Vec2 p) {
      if (config_.normalize) p = normalize_absolute(p, frame_.world_min, frame_.world_max, &diag_);
      put(p.x);
      put(p.y);
    };
    auto put_rel_point = [&](Vec2 target) {
      Vec2 d = target - self;
      if (config_.normalize) d = normalize_relative(d, frame_.relative_extent, &diag_);
      put(d.x);
      put(d.y);
    };
    auto put_rel_box = [&](const Box& box) {
      if (config_.representation == EntityRepresentation::kCenter) {
        put_rel_point(box.center);
      } else {
        put_rel_point(box.min());
        put_rel_point(box.max());
      }
    };

    put_abs(self);
    put(state.tasks[agent].has_part ? 1.0 : 0.0);
    for (std::size_t m = 0; m < layout_.machines.size(); ++m) {
      put_rel_box(layout_.machines[m].body);
      put(state.machines[m].ready ? 1.0 : 0.0);
      if (config_.include_time_since_ready) {
        put(static_cast<double>(state.machines[m].uncollected_steps) / episode_length_);
      }
    }
    put_rel_box(layout_.storage.body);
    const double r = layout_.agent_radius;
    for (int j = 0; j < static_cast<int>(state.agents.size()); ++j) {
      if (j == agent) continue;
      put_rel_box({state.agents[j].position, {r, r}});
      put(state.tasks[j].has_part ? 1.0 : 0.0);
      if (config_.include_velocities) {
        const Vec2 v = state.agents[j].velocity;
        put(v.x);
        put(v.y);
      }
    }
    if (config_.include_blockers) {
      for (const auto& b : layout_.blockers) put_rel_box(b);
    }
    if (config_.include_walls) {
      for (const auto& w : layout_.walls()) put_rel_box(w);
    }
  }

  std::vector<double> build(const ScenarioState& state, int agent) const {
    std::vector<double> out(dim_);
    build(state, agent, out);
    return out;
  }

 private:
  void build_schema() {
    const int p = config_.representation == EntityRepresentation::kCenter ? 2 : 4;
    const std::string pos = p == 2 ? "rel_center" : "rel_corners";
    int offset = 0;
    auto add = [&](std::string name, int width) {
      schema_.push_back({std::move(name), offset, width});
      offset += width;
    };
    add("self.abs_position", 2);
    add("self.has_part", 1);
    for (int m = 0; m < layout_.num_machines(); ++m) {
      const std::string base = "machine[" + std::to_string(m) + "].";
      add(base + pos, p);
      add(base + "ready", 1);
      if (config_.include_time_since_ready) add(base + "time_since_ready", 1);
    }
    add("storage." + pos, p);
    for (int j = 1; j < layout_.num_agents(); ++j) {
      const std::string base = "other[" + std::to_string(j - 1) + "].";
      add(base + pos, p);
      add(base + "has_part", 1);
      if (config_.include_velocities) add(base + "velocity", 2);
    }
    if (config_.include_blockers) {
      for (std::size_t b = 0; b < layout_.blockers.size(); ++b) add("blocker[" + std::to_string(b) + "]." + pos, p);
    }
    if (config_.include_walls) {
      for (int w = 0; w < 4; ++w) add("wall[" + std::to_string(w) + "]." + pos, p);
    }
    dim_ = offset;
  }

  LayoutSpec layout_;
  NormalizationFrame frame_;
  int episode_length_;
  ObservationConfig config_;
  std::vector<ObservationField> schema_;
  int dim_ = 0;
  mutable NormalizeDiagnostics diag_;
};

inline std::vector<double> build_observation(const TendingScenario& scenario, const ScenarioState& state, int agent,
                                             const ObservationConfig& config) {
  return ObservationBuilder(scenario.layout(), scenario.episode_length(), config).build(state, agent);
}

}  // namespace mtend
