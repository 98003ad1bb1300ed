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

#include <vector>

#include "mtend/observation.hpp"
#include "mtend/rng.hpp"
#include "mtend/scenario.hpp"

using namespace mtend;

namespace {

// Every toggle combination of the ablation grid.
std::vector<ObservationConfig> all_configs() {
  std::vector<ObservationConfig> out;
  for (int bits = 0; bits < 64; ++bits) {
    ObservationConfig c;
    c.include_velocities = bits & 1;
    c.include_time_since_ready = bits & 2;
    c.normalize = bits & 4;
    c.representation = (bits & 8) ? EntityRepresentation::kTwoCorners : EntityRepresentation::kCenter;
    c.include_blockers = bits & 16;
    c.include_walls = bits & 32;
    out.push_back(c);
  }
  return out;
}

ScenarioState random_state(const TendingScenario& sc, std::uint64_t seed, int steps) {
  auto s = sc.reset(nullptr);
  Rng rng = make_stream(seed, RngStream::kActions);
  std::vector<int> a(sc.num_agents());
  for (int k = 0; k < steps; ++k) {
    for (int& x : a) x = static_cast<int>(uniform01(rng) * kNumActions);
    sc.step(s, a);
  }
  return s;
}

bool is_positional(const std::string& name) {
  return name.find("position") != std::string::npos || name.find("rel_") != std::string::npos;
}

}  // namespace

TEST(Observation, DefaultLengthIs25) {
  const TendingScenario sc{ScenarioConfig{}};
  const ObservationBuilder b(sc.layout(), sc.episode_length(), ObservationConfig{});
  EXPECT_EQ(b.dim(), 2 + 1 + 2 * 3 + 2 + 2 * 3 + 4 * 2);
  EXPECT_EQ(b.dim(), 25);
  EXPECT_EQ(ObservationBuilder::dimension(ObservationConfig{}, 3, 2, 2), 25);
}

TEST(Observation, LengthFormulaAndSchemaForEveryToggle) {
  const TendingScenario sc{ScenarioConfig{}};
  const auto s = random_state(sc, 1, 30);
  for (const auto& c : all_configs()) {
    const ObservationBuilder b(sc.layout(), sc.episode_length(), c);
    // Independent bookkeeping: P entries per entity position.
    const int p = c.representation == EntityRepresentation::kCenter ? 2 : 4;
    const int expected = 3 + 2 * (p + 1 + c.include_time_since_ready) + p + 2 * (p + 1 + 2 * c.include_velocities) +
                         (c.include_blockers ? 2 * p : 0) + (c.include_walls ? 4 * p : 0);
    EXPECT_EQ(b.dim(), expected);
    int total = 0;
    for (const auto& f : b.schema()) {
      EXPECT_EQ(f.offset, total);
      total += f.width;
    }
    EXPECT_EQ(total, b.dim());
    EXPECT_EQ(static_cast<int>(b.build(s, 0).size()), expected);
  }
}

TEST(Observation, NormalizedPositionsInUnitInterval) {
  const TendingScenario sc{ScenarioConfig{}};
  for (const auto& c : all_configs()) {
    if (!c.normalize) continue;
    const ObservationBuilder b(sc.layout(), sc.episode_length(), c);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto s = random_state(sc, seed, 60);
      for (int i = 0; i < sc.num_agents(); ++i) {
        const auto o = b.build(s, i);
        for (const auto& f : b.schema()) {
          for (int k = 0; k < f.width; ++k) {
            const double v = o[f.offset + k];
            if (is_positional(f.name) || f.name.find("ready") != std::string::npos || f.name.find("has_part") != std::string::npos) {
              EXPECT_GE(v, 0.0) << f.name;
              EXPECT_LE(v, 1.0) << f.name;
            }
          }
        }
      }
    }
    EXPECT_EQ(b.diagnostics().clamped, 0);
  }
}

TEST(Observation, HasPartFlag) {
  const TendingScenario sc{ScenarioConfig{}};
  auto s = sc.reset(nullptr);
  s.tasks[1].has_part = true;
  const ObservationBuilder b(sc.layout(), sc.episode_length(), ObservationConfig{});
  EXPECT_EQ(b.build(s, 1)[2], 1.0);
  EXPECT_EQ(b.build(s, 0)[2], 0.0);
  // Agent 0 sees agent 1 as its first "other": offset 3 + 2*3 + 2 + 2 = 13.
  EXPECT_EQ(b.build(s, 0)[13], 1.0);
}

TEST(Observation, RawValuesWhenNotNormalized) {
  const TendingScenario sc{ScenarioConfig{}};
  const auto s = random_state(sc, 4, 50);
  ObservationConfig c;
  c.normalize = false;
  c.include_velocities = true;
  const ObservationBuilder b(sc.layout(), sc.episode_length(), c);
  const auto o = b.build(s, 1);
  const auto& l = sc.layout();
  const Vec2 self = s.agents[1].position;
  EXPECT_DOUBLE_EQ(o[0], self.x);
  EXPECT_DOUBLE_EQ(o[1], self.y);
  EXPECT_DOUBLE_EQ(o[3], l.machines[0].body.center.x - self.x);
  EXPECT_DOUBLE_EQ(o[4], l.machines[0].body.center.y - self.y);
  EXPECT_DOUBLE_EQ(o[5], s.machines[0].ready ? 1.0 : 0.0);
  EXPECT_DOUBLE_EQ(o[9], l.storage.body.center.x - self.x);
  // other[0] is agent 0: rel pos, has_part, velocity.
  EXPECT_DOUBLE_EQ(o[11], s.agents[0].position.x - self.x);
  EXPECT_DOUBLE_EQ(o[14], s.agents[0].velocity.x);
  EXPECT_DOUBLE_EQ(o[15], s.agents[0].velocity.y);
}

TEST(Observation, RelativeAntisymmetry) {
  const TendingScenario sc{ScenarioConfig{}};
  ObservationConfig c;
  c.normalize = false;
  const ObservationBuilder b(sc.layout(), sc.episode_length(), c);
  const auto s = random_state(sc, 8, 77);
  const int other = 11;  // first other-agent block
  const int stride = 3;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const int slot_ij = j < i ? j : j - 1;
      const int slot_ji = i < j ? i : i - 1;
      const auto oi = b.build(s, i);
      const auto oj = b.build(s, j);
      EXPECT_DOUBLE_EQ(oi[other + stride * slot_ij], -oj[other + stride * slot_ji]);
      EXPECT_DOUBLE_EQ(oi[other + stride * slot_ij + 1], -oj[other + stride * slot_ji + 1]);
    }
  }
}

TEST(Observation, TimeSinceReadyOnlyTouchesMachineBlock) {
  const TendingScenario sc{ScenarioConfig{}};
  const auto s = random_state(sc, 2, 40);
  ObservationConfig off, on;
  on.include_time_since_ready = true;
  const ObservationBuilder bo(sc.layout(), sc.episode_length(), off);
  const ObservationBuilder bn(sc.layout(), sc.episode_length(), on);
  for (int i = 0; i < 3; ++i) {
    const auto a = bo.build(s, i);
    const auto b = bn.build(s, i);
    ASSERT_EQ(b.size(), a.size() + 2);
    // self block and machine 0's rel/ready
    for (int k = 0; k < 6; ++k) EXPECT_EQ(a[k], b[k]);
    EXPECT_DOUBLE_EQ(b[6], s.machines[0].uncollected_steps / 200.0);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(a[6 + k], b[7 + k]);
    EXPECT_DOUBLE_EQ(b[10], s.machines[1].uncollected_steps / 200.0);
    for (std::size_t k = 9; k < a.size(); ++k) EXPECT_EQ(a[k], b[k + 2]);
  }
}

TEST(Observation, TwoCornersReplacesCenters) {
  const TendingScenario sc{ScenarioConfig{}};
  ObservationConfig c;
  c.normalize = false;
  c.representation = EntityRepresentation::kTwoCorners;
  const ObservationBuilder b(sc.layout(), sc.episode_length(), c);
  const auto s = sc.reset(nullptr);
  const auto o = b.build(s, 0);
  const Vec2 self = s.agents[0].position;
  const auto& m = sc.layout().machines[0].body;
  EXPECT_DOUBLE_EQ(o[3], m.min().x - self.x);
  EXPECT_DOUBLE_EQ(o[4], m.min().y - self.y);
  EXPECT_DOUBLE_EQ(o[5], m.max().x - self.x);
  EXPECT_DOUBLE_EQ(o[6], m.max().y - self.y);
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_absolute({0, 0}, {-1, -1}, {1, 1}), (Vec2{0.5, 0.5}));
  EXPECT_EQ(normalize_relative({0, 0}, {2.2, 2.2}), (Vec2{0.5, 0.5}));
  EXPECT_EQ(normalize_relative({2.2, -2.2}, {2.2, 2.2}), (Vec2{1.0, 0.0}));
  NormalizeDiagnostics d;
  EXPECT_EQ(normalize_relative({5.0, 0}, {2.2, 2.2}, &d), (Vec2{1.0, 0.5}));
  EXPECT_EQ(d.clamped, 1);
}

TEST(Observation, BufferSizeChecked) {
  const TendingScenario sc{ScenarioConfig{}};
  const ObservationBuilder b(sc.layout(), sc.episode_length(), ObservationConfig{});
  std::vector<double> small(10);
  EXPECT_THROW(b.build(sc.reset(nullptr), 0, small), ShapeError);
}
