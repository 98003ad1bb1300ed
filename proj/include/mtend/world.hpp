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

// Planar kinematic world: force-driven point-mass discs among static
// axis-aligned rectangles, with damping, semi-implicit integration and
// projection-based contact resolution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtend/errors.hpp"

namespace mtend {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

enum class BodyKind { kAgent, kMachine, kBlocker, kStorage, kWall };

inline const char* to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::kAgent: return "agent";
    case BodyKind::kMachine: return "machine";
    case BodyKind::kBlocker: return "blocker";
    case BodyKind::kStorage: return "storage";
    case BodyKind::kWall: return "wall";
  }
  return "?";
}

// Agents are circles (radius > 0); every other kind is an axis-aligned box
// described by half extents. Static bodies ignore mass.
struct BodySpec {
  BodyKind kind = BodyKind::kAgent;
  double radius = 0.0;
  Vec2 half_extents{};
  double mass = 1.0;

  static BodySpec circle(double radius, double mass) {
    return {BodyKind::kAgent, radius, {}, mass};
  }
  static BodySpec box(BodyKind kind, Vec2 half_extents) {
    return {kind, 0.0, half_extents, 0.0};
  }

  bool is_circle() const { return kind == BodyKind::kAgent; }
  bool is_static() const { return kind != BodyKind::kAgent; }
};

struct KinematicState {
  Vec2 position{};
  Vec2 velocity{};

  friend bool operator==(const KinematicState&, const KinematicState&) = default;
};

struct ContactEvent {
  int body_a = 0;  // body_a < body_b
  int body_b = 0;
  bool onset = false;
  double depth = 0.0;  // penetration; <= 0 means touching within the margin
  Vec2 normal{};       // unit normal pointing from body_a towards body_b

  friend bool operator==(const ContactEvent&, const ContactEvent&) = default;
};

struct PhysicsParams {
  double dt = 0.1;
  double damping = 0.25;
  double force_gain = 1.0;
  double max_speed = 0.5;
  // Gap below which two bodies count as touching.
  double contact_margin = 1e-7;
  int max_resolve_iterations = 200;
};

inline constexpr int kNumActions = 5;

// 0 none, 1 left, 2 right, 3 down, 4 up.
inline Vec2 action_to_force(int action, double force_gain) {
  switch (action) {
    case 0: return {0.0, 0.0};
    case 1: return {-force_gain, 0.0};
    case 2: return {force_gain, 0.0};
    case 3: return {0.0, -force_gain};
    case 4: return {0.0, force_gain};
    default:
      throw InvalidActionError("action id " + std::to_string(action) + " outside 0..4");
  }
}

inline Vec2 clamp_speed(Vec2 v, double max_speed) {
  const double speed = v.norm();
  if (speed > max_speed && speed > 0.0) return v * (max_speed / speed);
  return v;
}

// Semi-implicit Euler: v' = clamp((v + f/m dt)(1 - damping)), p' = p + v' dt.
inline KinematicState integrate(const KinematicState& state, Vec2 force, double mass,
                                const PhysicsParams& params) {
  if (!(params.dt > 0.0)) throw NumericError("integrate: dt must be positive");
  if (!force.finite()) throw NumericError("integrate: non-finite force");
  KinematicState next;
  next.velocity = clamp_speed((state.velocity + force * (params.dt / mass)) * (1.0 - params.damping),
                              params.max_speed);
  next.position = state.position + next.velocity * params.dt;
  return next;
}

namespace detail {

struct Penetration {
  double depth;  // positive when overlapping
  Vec2 normal;   // from first body to second
};

inline Penetration circle_circle(Vec2 a, double ra, Vec2 b, double rb) {
  const Vec2 d = b - a;
  const double dist = d.norm();
  const Vec2 n = dist > 0.0 ? d / dist : Vec2{1.0, 0.0};
  return {ra + rb - dist, n};
}

// Normal points from the box towards the circle.
inline Penetration box_circle(Vec2 box_center, Vec2 half, Vec2 c, double r) {
  const Vec2 rel = c - box_center;
  const Vec2 closest{std::clamp(rel.x, -half.x, half.x), std::clamp(rel.y, -half.y, half.y)};
  const bool inside = std::abs(rel.x) < half.x && std::abs(rel.y) < half.y;
  if (!inside) {
    const Vec2 d = rel - closest;
    const double dist = d.norm();
    return {r - dist, dist > 0.0 ? d / dist : Vec2{0.0, 1.0}};
  }
  // Centre inside: push out through the nearest face.
  const double gap_x = half.x - std::abs(rel.x);
  const double gap_y = half.y - std::abs(rel.y);
  if (gap_x < gap_y) return {r + gap_x, {rel.x >= 0.0 ? 1.0 : -1.0, 0.0}};
  return {r + gap_y, {0.0, rel.y >= 0.0 ? 1.0 : -1.0}};
}

inline Penetration penetration(const BodySpec& a, Vec2 pa, const BodySpec& b, Vec2 pb) {
  if (a.is_circle() && b.is_circle()) return circle_circle(pa, a.radius, pb, b.radius);
  if (a.is_circle()) {
    const auto p = box_circle(pb, b.half_extents, pa, a.radius);
    return {p.depth, -p.normal};
  }
  if (b.is_circle()) return box_circle(pa, a.half_extents, pb, b.radius);
  // Static boxes never move relative to each other; report box overlap for validation only.
  const Vec2 d = pb - pa;
  const double ox = a.half_extents.x + b.half_extents.x - std::abs(d.x);
  const double oy = a.half_extents.y + b.half_extents.y - std::abs(d.y);
  if (ox < oy) return {std::min(ox, oy), {d.x >= 0.0 ? 1.0 : -1.0, 0.0}};
  return {std::min(ox, oy), {0.0, d.y >= 0.0 ? 1.0 : -1.0}};
}

}  // namespace detail

// Unordered body pair, stored with first < second.
using BodyPair = std::pair<int, int>;

// Reports every pair involving at least one dynamic body whose gap is below
// the contact margin. `previous` must be sorted; onset is true for pairs absent
// from it.
inline std::vector<ContactEvent> detect_contacts(std::span<const BodySpec> specs,
                                                 std::span<const KinematicState> states,
                                                 std::span<const BodyPair> previous = {},
                                                 double contact_margin = PhysicsParams{}.contact_margin) {
  if (specs.size() != states.size()) {
    throw ShapeError("detect_contacts: " + std::to_string(specs.size()) + " specs vs " +
                     std::to_string(states.size()) + " states");
  }
  std::vector<ContactEvent> contacts;
  const int n = static_cast<int>(specs.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (specs[a].is_static() && specs[b].is_static()) continue;
      const auto p = detail::penetration(specs[a], states[a].position, specs[b], states[b].position);
      if (p.depth > -contact_margin) {
        const BodyPair key{a, b};
        const bool was = std::binary_search(previous.begin(), previous.end(), key);
        contacts.push_back({a, b, !was, p.depth, p.normal});
      }
    }
  }
  return contacts;
}

inline std::vector<BodyPair> contact_pairs(std::span<const ContactEvent> contacts) {
  std::vector<BodyPair> pairs;
  pairs.reserve(contacts.size());
  for (const auto& c : contacts) pairs.emplace_back(c.body_a, c.body_b);
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

// Projects overlapping bodies apart until no penetration above `tolerance`
// remains. Static bodies never move; agent pairs split the correction equally.
// Approaching normal velocity is removed; agent pairs exchange a normal impulse
// so tangential and total momentum are preserved.
inline void resolve_contacts(std::span<const BodySpec> specs, std::span<KinematicState> states,
                             std::span<const ContactEvent> contacts, const PhysicsParams& params = {},
                             double tolerance = 1e-12) {
  auto correct_velocity = [&](int a, int b, Vec2 n) {
    if (specs[a].is_static()) {
      const double vn = states[b].velocity.dot(n);
      if (vn < 0.0) states[b].velocity -= n * vn;
    } else if (specs[b].is_static()) {
      const double vn = states[a].velocity.dot(n);
      if (vn > 0.0) states[a].velocity -= n * vn;
    } else {
      const double vn = (states[b].velocity - states[a].velocity).dot(n);
      if (vn < 0.0) {
        const double inv_a = 1.0 / specs[a].mass;
        const double inv_b = 1.0 / specs[b].mass;
        const double j = -vn / (inv_a + inv_b);
        states[a].velocity -= n * (j * inv_a);
        states[b].velocity += n * (j * inv_b);
      }
    }
  };

  for (const auto& c : contacts) {
    if (c.depth > 0.0) correct_velocity(c.body_a, c.body_b, c.normal);
  }

  const int n = static_cast<int>(specs.size());
  for (int iter = 0; iter < params.max_resolve_iterations; ++iter) {
    double worst = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (specs[a].is_static() && specs[b].is_static()) continue;
        const auto p = detail::penetration(specs[a], states[a].position, specs[b], states[b].position);
        if (p.depth <= tolerance) continue;
        worst = std::max(worst, p.depth);
        if (specs[a].is_static()) {
          states[b].position += p.normal * p.depth;
        } else if (specs[b].is_static()) {
          states[a].position -= p.normal * p.depth;
        } else {
          states[a].position -= p.normal * (0.5 * p.depth);
          states[b].position += p.normal * (0.5 * p.depth);
        }
        correct_velocity(a, b, p.normal);
      }
    }
    if (worst <= tolerance) return;
  }
}

// Largest penetration depth among dynamic/any pairs; used by tests and diagnostics.
inline double max_penetration(std::span<const BodySpec> specs, std::span<const KinematicState> states) {
  double worst = 0.0;
  const int n = static_cast<int>(specs.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (specs[a].is_static() && specs[b].is_static()) continue;
      worst = std::max(worst, detail::penetration(specs[a], states[a].position, specs[b], states[b].position).depth);
    }
  }
  return worst;
}

}  // namespace mtend
