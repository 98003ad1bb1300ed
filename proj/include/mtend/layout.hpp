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
#include <sstream>
#include <string>
#include <vector>

#include "mtend/errors.hpp"
#include "mtend/world.hpp"

namespace mtend {

struct Box {
  Vec2 center{};
  Vec2 half_extents{};

  Vec2 min() const { return center - half_extents; }
  Vec2 max() const { return center + half_extents; }
  friend bool operator==(const Box&, const Box&) = default;
};

// Distance from a point to a box (0 inside).
inline double distance_to_box(Vec2 p, const Box& box) {
  const Vec2 rel = p - box.center;
  const double dx = std::max(std::abs(rel.x) - box.half_extents.x, 0.0);
  const double dy = std::max(std::abs(rel.y) - box.half_extents.y, 0.0);
  return std::hypot(dx, dy);
}

inline bool boxes_overlap(const Box& a, const Box& b) {
  return std::abs(a.center.x - b.center.x) < a.half_extents.x + b.half_extents.x &&
         std::abs(a.center.y - b.center.y) < a.half_extents.y + b.half_extents.y;
}

// Anchor: the pick point on the machine's accessible face.
struct MachineSpec {
  Box body;
  Vec2 anchor{};
  friend bool operator==(const MachineSpec&, const MachineSpec&) = default;
};

// Anchor: the point distances to storage are measured against.
struct StorageSpec {
  Box body;
  Vec2 anchor{};
  friend bool operator==(const StorageSpec&, const StorageSpec&) = default;
};

struct LayoutSpec {
  Vec2 world_min{-1.0, -1.0};
  Vec2 world_max{1.0, 1.0};
  double agent_radius = 0.06;
  double agent_mass = 1.0;
  double wall_thickness = 0.1;
  // Half-width of the uniform box around each spawn point; 0 disables jitter.
  double spawn_jitter = 0.0;
  std::vector<Vec2> spawns;
  std::vector<MachineSpec> machines;
  std::vector<Box> blockers;
  StorageSpec storage;

  friend bool operator==(const LayoutSpec&, const LayoutSpec&) = default;

  int num_agents() const { return static_cast<int>(spawns.size()); }
  int num_machines() const { return static_cast<int>(machines.size()); }
  Vec2 extent() const { return world_max - world_min; }

  // Left, right, bottom, top. Side walls cover the corners.
  std::vector<Box> walls() const {
    const double t = wall_thickness;
    const Vec2 c = (world_min + world_max) * 0.5;
    const Vec2 h = extent() * 0.5;
    return {
        {{world_min.x - t / 2, c.y}, {t / 2, h.y + t}},
        {{world_max.x + t / 2, c.y}, {t / 2, h.y + t}},
        {{c.x, world_min.y - t / 2}, {h.x, t / 2}},
        {{c.x, world_max.y + t / 2}, {h.x, t / 2}},
    };
  }
};

// Body ids: agents [0, N), machines [N, N+M), blockers, storage, walls.
struct BodyIndex {
  int num_agents = 0;
  int num_machines = 0;
  int num_blockers = 0;

  explicit BodyIndex(const LayoutSpec& layout)
      : num_agents(layout.num_agents()),
        num_machines(layout.num_machines()),
        num_blockers(static_cast<int>(layout.blockers.size())) {}

  int agent(int i) const { return i; }
  int machine(int m) const { return num_agents + m; }
  int blocker(int b) const { return num_agents + num_machines + b; }
  int storage() const { return num_agents + num_machines + num_blockers; }
  int wall(int w) const { return storage() + 1 + w; }
  int total() const { return wall(4); }
  bool is_agent(int id) const { return id < num_agents; }
};

inline std::vector<BodySpec> body_specs(const LayoutSpec& layout) {
  std::vector<BodySpec> specs;
  for (int i = 0; i < layout.num_agents(); ++i) specs.push_back(BodySpec::circle(layout.agent_radius, layout.agent_mass));
  for (const auto& m : layout.machines) specs.push_back(BodySpec::box(BodyKind::kMachine, m.body.half_extents));
  for (const auto& b : layout.blockers) specs.push_back(BodySpec::box(BodyKind::kBlocker, b.half_extents));
  specs.push_back(BodySpec::box(BodyKind::kStorage, layout.storage.body.half_extents));
  for (const auto& w : layout.walls()) specs.push_back(BodySpec::box(BodyKind::kWall, w.half_extents));
  return specs;
}

// Static body centres in body-id order (after the agents).
inline std::vector<Box> static_boxes(const LayoutSpec& layout) {
  std::vector<Box> boxes;
  for (const auto& m : layout.machines) boxes.push_back(m.body);
  for (const auto& b : layout.blockers) boxes.push_back(b);
  boxes.push_back(layout.storage.body);
  for (const auto& w : layout.walls()) boxes.push_back(w);
  return boxes;
}

// Outward normal of the box face containing `p`, or a zero vector when `p`
// is not on the boundary.
inline Vec2 face_normal(const Box& box, Vec2 p, double eps = 1e-9) {
  const Vec2 rel = p - box.center;
  const bool within_x = std::abs(rel.x) <= box.half_extents.x + eps;
  const bool within_y = std::abs(rel.y) <= box.half_extents.y + eps;
  if (within_y && std::abs(std::abs(rel.x) - box.half_extents.x) <= eps) return {rel.x > 0 ? 1.0 : -1.0, 0.0};
  if (within_x && std::abs(std::abs(rel.y) - box.half_extents.y) <= eps) return {0.0, rel.y > 0 ? 1.0 : -1.0};
  return {};
}

inline std::vector<std::string> layout_violations(const LayoutSpec& layout) {
  std::vector<std::string> errors;
  auto fmt = [](Vec2 v) {
    std::ostringstream os;
    os << "(" << v.x << ", " << v.y << ")";
    return os.str();
  };
  const Vec2 ext = layout.extent();
  if (!(ext.x > 0 && ext.y > 0)) errors.push_back("world_max must exceed world_min on both axes");
  if (!(layout.agent_radius > 0)) errors.push_back("agent_radius must be positive");
  if (!(layout.agent_mass > 0)) errors.push_back("agent_mass must be positive");
  if (!(layout.wall_thickness > 0)) errors.push_back("wall_thickness must be positive");
  if (layout.spawn_jitter < 0) errors.push_back("spawn_jitter must be non-negative");
  if (layout.spawns.empty()) errors.push_back("at least one agent spawn point is required");
  if (layout.machines.empty()) errors.push_back("at least one machine is required");
  if (!errors.empty()) return errors;

  struct Named {
    std::string name;
    Box box;
  };
  std::vector<Named> statics;
  for (std::size_t i = 0; i < layout.machines.size(); ++i) statics.push_back({"machine " + std::to_string(i), layout.machines[i].body});
  for (std::size_t i = 0; i < layout.blockers.size(); ++i) statics.push_back({"blocker " + std::to_string(i), layout.blockers[i]});
  statics.push_back({"storage", layout.storage.body});
  const auto walls = layout.walls();
  for (std::size_t i = 0; i < walls.size(); ++i) statics.push_back({"wall " + std::to_string(i), walls[i]});

  for (const auto& s : statics) {
    if (!(s.box.half_extents.x > 0 && s.box.half_extents.y > 0)) errors.push_back(s.name + " has non-positive half extents");
  }
  for (std::size_t a = 0; a < statics.size(); ++a) {
    for (std::size_t b = a + 1; b < statics.size(); ++b) {
      if (boxes_overlap(statics[a].box, statics[b].box)) errors.push_back(statics[a].name + " overlaps " + statics[b].name);
    }
  }

  const double r = layout.agent_radius;
  auto disc_free = [&](Vec2 c, double radius) {
    for (const auto& s : statics) {
      if (distance_to_box(c, s.box) < radius) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < layout.spawns.size(); ++i) {
    const Vec2 p = layout.spawns[i];
    // Jittered spawns must stay collision-free anywhere in the jitter box.
    const double reach = r + layout.spawn_jitter * std::sqrt(2.0);
    if (p.x - reach < layout.world_min.x || p.x + reach > layout.world_max.x || p.y - reach < layout.world_min.y ||
        p.y + reach > layout.world_max.y) {
      errors.push_back("spawn " + std::to_string(i) + " at " + fmt(p) + " is outside the world");
    }
    if (!disc_free(p, reach)) errors.push_back("spawn " + std::to_string(i) + " at " + fmt(p) + " collides with a static body");
    for (std::size_t j = i + 1; j < layout.spawns.size(); ++j) {
      if (distance(p, layout.spawns[j]) < 2 * reach) {
        errors.push_back("spawns " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }
  for (std::size_t m = 0; m < layout.machines.size(); ++m) {
    const auto& spec = layout.machines[m];
    const Vec2 n = face_normal(spec.body, spec.anchor);
    if (n == Vec2{}) {
      errors.push_back("machine " + std::to_string(m) + " anchor " + fmt(spec.anchor) + " is not on the machine boundary");
      continue;
    }
    if (!disc_free(spec.anchor + n * (r + 1e-6), r)) {
      errors.push_back("machine " + std::to_string(m) + " anchor " + fmt(spec.anchor) + " is not reachable");
    }
  }
  if (face_normal(layout.storage.body, layout.storage.anchor) == Vec2{}) {
    errors.push_back("storage anchor " + fmt(layout.storage.anchor) + " is not on the storage boundary");
  }
  return errors;
}

inline void validate_layout(const LayoutSpec& layout) {
  const auto errors = layout_violations(layout);
  if (errors.empty()) return;
  std::string msg;
  for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
  throw LayoutError(msg);
}

// Three agents idle at the top, two machines with blockers over their top
// faces (accessible from the inner side), storage at the bottom centre.
inline LayoutSpec default_layout() {
  LayoutSpec layout;
  layout.spawns = {{-0.5, 0.8}, {0.0, 0.8}, {0.5, 0.8}};
  layout.machines = {
      {{{-0.6, -0.35}, {0.15, 0.15}}, {-0.45, -0.35}},
      {{{0.6, -0.35}, {0.15, 0.15}}, {0.45, -0.35}},
  };
  layout.blockers = {
      {{-0.6, -0.12}, {0.17, 0.06}},
      {{0.6, -0.12}, {0.17, 0.06}},
  };
  layout.storage = {{{0.0, -0.8}, {0.2, 0.1}}, {0.0, -0.7}};
  return layout;
}

}  // namespace mtend
