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

#include <cmath>
#include <vector>

#include "mtend/layout.hpp"
#include "mtend/rng.hpp"
#include "mtend/scenario.hpp"
#include "mtend/world.hpp"

using namespace mtend;

namespace {

PhysicsParams loose_speed() {
  PhysicsParams p;
  p.max_speed = 100.0;
  return p;
}

}  // namespace

TEST(Integrate, DampedCoastMatchesClosedForm) {
  const KinematicState s{{0, 0}, {1, 0}};
  const auto next = integrate(s, {0, 0}, 1.0, loose_speed());
  EXPECT_DOUBLE_EQ(next.velocity.x, 0.75);
  EXPECT_DOUBLE_EQ(next.velocity.y, 0.0);
  EXPECT_DOUBLE_EQ(next.position.x, 0.075);
}

TEST(Integrate, RepeatedCoastDecaysGeometrically) {
  KinematicState s{{0, 0}, {1, 0}};
  const auto p = loose_speed();
  double expected_x = 0.0;
  for (int k = 1; k <= 10; ++k) {
    s = integrate(s, {0, 0}, 1.0, p);
    expected_x += std::pow(0.75, k) * 0.1;
    EXPECT_NEAR(s.velocity.x, std::pow(0.75, k), 1e-15);
  }
  EXPECT_NEAR(s.position.x, expected_x, 1e-14);
}

TEST(Integrate, ForceAccelerationAndMass) {
  const KinematicState s{{0, 0}, {0, 0}};
  const auto a = integrate(s, {2, 0}, 1.0, loose_speed());
  const auto b = integrate(s, {2, 0}, 2.0, loose_speed());
  EXPECT_DOUBLE_EQ(a.velocity.x, 2 * 0.1 * 0.75);
  EXPECT_DOUBLE_EQ(b.velocity.x, a.velocity.x / 2);
}

TEST(Integrate, SpeedNeverExceedsMaximum) {
  PhysicsParams p;
  KinematicState s{};
  Rng rng = make_stream(3, RngStream::kActions);
  for (int k = 0; k < 5000; ++k) {
    const Vec2 f{uniform(rng, -50, 50), uniform(rng, -50, 50)};
    s = integrate(s, f, 1.0, p);
    EXPECT_LE(s.velocity.norm(), p.max_speed + 1e-12);
  }
}

TEST(Integrate, RejectsBadInputs) {
  PhysicsParams p;
  p.dt = 0.0;
  EXPECT_THROW(integrate({}, {0, 0}, 1.0, p), NumericError);
  EXPECT_THROW(integrate({}, {NAN, 0}, 1.0, PhysicsParams{}), NumericError);
}

TEST(Actions, MapToAxisForces) {
  EXPECT_EQ(action_to_force(0, 1.0), (Vec2{0, 0}));
  EXPECT_EQ(action_to_force(1, 2.0), (Vec2{-2, 0}));
  EXPECT_EQ(action_to_force(2, 1.0), (Vec2{1, 0}));
  EXPECT_EQ(action_to_force(3, 1.0), (Vec2{0, -1}));
  EXPECT_EQ(action_to_force(4, 1.0), (Vec2{0, 1}));
  EXPECT_THROW(action_to_force(5, 1.0), InvalidActionError);
  EXPECT_THROW(action_to_force(-1, 1.0), InvalidActionError);
}

TEST(Contacts, DisjointCirclesHaveNoContact) {
  const std::vector<BodySpec> specs{BodySpec::circle(0.1, 1), BodySpec::circle(0.1, 1)};
  const std::vector<KinematicState> states{{{0, 0}, {}}, {{1, 0}, {}}};
  EXPECT_TRUE(detect_contacts(specs, states).empty());
}

TEST(Contacts, OverlappingCirclesReportOneOnset) {
  const std::vector<BodySpec> specs{BodySpec::circle(0.1, 1), BodySpec::circle(0.1, 1)};
  const std::vector<KinematicState> states{{{0, 0}, {}}, {{0.15, 0}, {}}};
  const auto c = detect_contacts(specs, states);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c[0].onset);
  EXPECT_NEAR(c[0].depth, 0.05, 1e-15);
  EXPECT_EQ(c[0].normal, (Vec2{1, 0}));
  // Same pair already active last step: not an onset.
  const std::vector<BodyPair> prev{{0, 1}};
  EXPECT_FALSE(detect_contacts(specs, states, prev)[0].onset);
}

TEST(Contacts, CircleNearWallFace) {
  // Wall occupying x <= 0; circle of radius 0.1 centred 0.05 from the face.
  const std::vector<BodySpec> specs{BodySpec::circle(0.1, 1), BodySpec::box(BodyKind::kWall, {0.5, 1.0})};
  const std::vector<KinematicState> states{{{0.05, 0.0}, {}}, {{-0.5, 0.0}, {}}};
  const auto c = detect_contacts(specs, states);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].depth, 0.05, 1e-15);
  EXPECT_EQ(c[0].normal, (Vec2{-1, 0}));  // from agent towards wall
}

TEST(Contacts, CornerDistanceIsEuclidean) {
  const std::vector<BodySpec> specs{BodySpec::circle(0.1, 1), BodySpec::box(BodyKind::kBlocker, {0.5, 0.5})};
  // Closest box point is the corner (0.5, 0.5); centre offset (0.06, 0.08) -> distance 0.1 exactly touching.
  std::vector<KinematicState> states{{{0.56, 0.58}, {}}, {{0, 0}, {}}};
  auto c = detect_contacts(specs, states);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].depth, 0.0, 1e-15);
  states[0].position = {0.57, 0.59};
  EXPECT_TRUE(detect_contacts(specs, states).empty());
}

TEST(Contacts, StaticPairsAreIgnored) {
  const std::vector<BodySpec> specs{BodySpec::box(BodyKind::kWall, {1, 1}), BodySpec::box(BodyKind::kMachine, {1, 1})};
  const std::vector<KinematicState> states{{{0, 0}, {}}, {{0.5, 0}, {}}};
  EXPECT_TRUE(detect_contacts(specs, states).empty());
}

TEST(Resolve, AgentPairSplitsCorrectionAndConservesMomentum) {
  const std::vector<BodySpec> specs{BodySpec::circle(0.1, 1), BodySpec::circle(0.1, 1)};
  std::vector<KinematicState> states{{{0, 0}, {0.3, 0.1}}, {{0.15, 0}, {-0.1, 0.2}}};
  const Vec2 momentum = states[0].velocity + states[1].velocity;
  const auto contacts = detect_contacts(specs, states);
  resolve_contacts(specs, states, contacts);
  EXPECT_NEAR(states[0].position.x, -0.025, 1e-12);
  EXPECT_NEAR(states[1].position.x, 0.175, 1e-12);
  const Vec2 after = states[0].velocity + states[1].velocity;
  EXPECT_NEAR(after.x, momentum.x, 1e-15);
  EXPECT_NEAR(after.y, momentum.y, 1e-15);
  // Tangential components untouched, normal approach removed.
  EXPECT_DOUBLE_EQ(states[0].velocity.y, 0.1);
  EXPECT_DOUBLE_EQ(states[1].velocity.y, 0.2);
  EXPECT_GE(states[1].velocity.x - states[0].velocity.x, -1e-15);
}

TEST(Resolve, StaticBodyPushesAgentOutFully) {
  const std::vector<BodySpec> specs{BodySpec::circle(0.1, 1), BodySpec::box(BodyKind::kWall, {0.5, 1.0})};
  std::vector<KinematicState> states{{{0.05, 0.3}, {-0.4, 0.2}}, {{-0.5, 0.0}, {}}};
  resolve_contacts(specs, states, detect_contacts(specs, states));
  EXPECT_NEAR(states[0].position.x, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(states[0].position.y, 0.3);
  EXPECT_DOUBLE_EQ(states[0].velocity.x, 0.0);
  EXPECT_DOUBLE_EQ(states[0].velocity.y, 0.2);
  EXPECT_EQ(states[1].position, (Vec2{-0.5, 0.0}));
}

TEST(WorldProperty, NoTunnelingOrPenetrationUnderRandomActions) {
  const TendingScenario scenario{ScenarioConfig{}};
  const auto& layout = scenario.layout();
  const auto& p = scenario.config().physics;
  // Precondition of the no-tunnelling property at default settings: one step
  // cannot carry an agent centre past the middle of any static box.
  double min_half = 1e9;
  for (const auto& b : static_boxes(layout)) min_half = std::min({min_half, b.half_extents.x, b.half_extents.y});
  ASSERT_LT(p.max_speed * p.dt, min_half + layout.agent_radius);

  ScenarioState state = scenario.reset(nullptr);
  Rng rng = make_stream(11, RngStream::kActions);
  std::vector<int> actions(scenario.num_agents());
  std::vector<KinematicState> bodies;
  for (int step = 0; step < 10000; ++step) {
    if (scenario.finished(state)) state = scenario.reset(nullptr);
    for (int& a : actions) a = static_cast<int>(uniform01(rng) * kNumActions);
    scenario.step(state, actions);
    for (const auto& a : state.agents) {
      ASSERT_GE(a.position.x, layout.world_min.x + layout.agent_radius - 1e-9);
      ASSERT_LE(a.position.x, layout.world_max.x - layout.agent_radius + 1e-9);
      ASSERT_GE(a.position.y, layout.world_min.y + layout.agent_radius - 1e-9);
      ASSERT_LE(a.position.y, layout.world_max.y - layout.agent_radius + 1e-9);
      ASSERT_LE(a.velocity.norm(), p.max_speed + 1e-12);
    }
    scenario.body_states(state, bodies);
    ASSERT_LE(max_penetration(scenario.specs(), bodies), 1e-9);
  }
}

TEST(WorldProperty, DeterministicTrajectories) {
  const TendingScenario scenario{ScenarioConfig{}};
  auto run = [&] {
    ScenarioState s = scenario.reset(nullptr);
    Rng rng = make_stream(5, RngStream::kActions);
    std::vector<int> actions(scenario.num_agents());
    std::vector<ScenarioState> out;
    while (!scenario.finished(s)) {
      for (int& a : actions) a = static_cast<int>(uniform01(rng) * kNumActions);
      scenario.step(s, actions);
      out.push_back(s);
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}
