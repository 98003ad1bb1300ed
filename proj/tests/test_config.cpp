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

#include <filesystem>
#include <fstream>

#include "mtend/config.hpp"

using namespace mtend;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(MTEND_SOURCE_DIR) / "configs";

std::string error_of(const std::string& text) {
  try {
    parse_config(text, kConfigs);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalConfigGetsDefaults) {
  const auto c = parse_config("layout: layouts/default.yaml\n", kConfigs);
  EXPECT_EQ(c.scenario.layout, default_layout());
  // Best observation and reward settings.
  EXPECT_FALSE(c.observation.include_velocities);
  EXPECT_FALSE(c.observation.include_time_since_ready);
  EXPECT_TRUE(c.observation.normalize);
  EXPECT_EQ(c.observation.representation, EntityRepresentation::kCenter);
  EXPECT_FALSE(c.observation.include_blockers);
  EXPECT_TRUE(c.observation.include_walls);
  EXPECT_FALSE(c.reward.share_pick_place);
  EXPECT_EQ(c.reward.uncollected_mode, UncollectedMode::kFixed);
  EXPECT_EQ(c.critic, rl::CriticVariant::kAttention);
  EXPECT_EQ(c.train.episodes, 2000);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(parse_config(""), parse_config("layout: default\n"));
}

TEST(Config, IncreasingModeParsed) {
  const auto c = parse_config("reward:\n  uncollected_mode: increasing\n");
  EXPECT_EQ(c.reward.uncollected_mode, UncollectedMode::kIncreasing);
}

TEST(Config, UnknownKeyNamedWithLine) {
  const auto msg = error_of("name: x\nreward:\n  pick: 1.0\n  bogus: 3\n");
  EXPECT_NE(msg.find("unknown key 'bogus' in section 'reward' (line 4)"), std::string::npos) << msg;
  EXPECT_NE(error_of("trian:\n  gamma: 0.9\n").find("unknown key 'trian'"), std::string::npos);
}

TEST(Config, AllViolationsListed) {
  const auto msg = error_of("train:\n  gamma: 2.0\n  num_envs: 0\nseeds: []\nobservation:\n  representation: corners\n");
  EXPECT_NE(msg.find("gamma must be in [0, 1]"), std::string::npos) << msg;
  EXPECT_NE(msg.find("num_envs must be >= 1"), std::string::npos);
  EXPECT_NE(msg.find("seeds must be nonempty"), std::string::npos);
  EXPECT_NE(msg.find("corners"), std::string::npos);
}

TEST(Config, WrongTypeAndParseErrors) {
  EXPECT_NE(error_of("train:\n  gamma: high\n").find("'train.gamma' has the wrong type (line 2)"), std::string::npos);
  EXPECT_NE(error_of("train: [1, 2\n").find("parse error at line"), std::string::npos);
  EXPECT_NE(error_of("layout: missing.yaml\n").find("layout file 'missing.yaml' does not exist"), std::string::npos);
}

TEST(Config, LayoutValidationReported) {
  const auto msg = error_of("layout:\n  spawns: [[0.0, 0.8], [0.0, 0.8], [0.5, 0.8]]\n");
  EXPECT_NE(msg.find("spawns 0 and 1 overlap"), std::string::npos) << msg;
}

TEST(Config, RoundTrip) {
  ExperimentConfig c;
  c.name = "rt";
  c.scenario.layout.spawn_jitter = 0.02;
  c.scenario.layout.blockers.pop_back();
  c.observation.include_velocities = true;
  c.observation.representation = EntityRepresentation::kTwoCorners;
  c.reward.uncollected_mode = UncollectedMode::kIncreasing;
  c.reward.progress_scale = 0.1 + 0.2;  // not exactly representable in short decimal
  c.train.learning_rate = 3e-4;
  c.train.num_envs = 4;
  c.critic = rl::CriticVariant::kPlain;
  c.seeds = {7, 11};
  c.train.episodes = 123;
  const auto text = serialize_config(c);
  EXPECT_EQ(parse_config(text), c);
  EXPECT_EQ(serialize_config(parse_config(text)), text);
  ExperimentConfig d;
  EXPECT_EQ(parse_config(serialize_config(d)), d);
}

TEST(Config, EveryShippedConfigLoads) {
  int count = 0;
  for (const auto& e : fs::recursive_directory_iterator(kConfigs)) {
    if (e.path().extension() != ".yaml" || e.path().parent_path().filename() == "layouts" ||
        e.path().parent_path().filename() == "sweeps") {
      continue;
    }
    EXPECT_NO_THROW(load_config(e.path())) << e.path();
    const auto c = load_config(e.path());
    EXPECT_EQ(parse_config(serialize_config(c)), c) << e.path();
    ++count;
  }
  EXPECT_GE(count, 17 + 1);
}

TEST(Config, AblationRowsChangeOneAspect) {
  const auto base = load_config(kConfigs / "ablations" / "observation_exp1.yaml");
  EXPECT_TRUE(base.observation.include_velocities);
  EXPECT_TRUE(base.reward.share_pick_place);
  for (int k = 2; k <= 7; ++k) {
    const auto c = load_config(kConfigs / "ablations" / ("observation_exp" + std::to_string(k) + ".yaml"));
    EXPECT_NE(c.observation, base.observation) << k;
    EXPECT_EQ(c.reward, base.reward) << k;
  }
  for (int k = 2; k <= 6; ++k) {
    const auto c = load_config(kConfigs / "ablations" / ("reward_exp" + std::to_string(k) + ".yaml"));
    EXPECT_EQ(c.observation, base.observation) << k;
    EXPECT_NE(c.reward, base.reward) << k;
  }
  EXPECT_EQ(load_config(kConfigs / "ablations" / "reward_exp5.yaml").reward.uncollected_mode, UncollectedMode::kIncreasing);
  const auto full = load_config(kConfigs / "full_scale.yaml");
  EXPECT_EQ(full.train.episodes, 18200);
  EXPECT_EQ(full.seeds.size(), 3u);
}

TEST(Config, Sweeps) {
  EXPECT_EQ(load_sweep(kConfigs / "sweeps" / "observation.yaml").configs.size(), 7u);
  EXPECT_EQ(load_sweep(kConfigs / "sweeps" / "reward.yaml").configs.size(), 6u);
  EXPECT_EQ(load_sweep(kConfigs / "sweeps" / "combination.yaml").configs.size(), 4u);
  const auto tmp = fs::temp_directory_path() / "mtend_bad_sweep.yaml";
  std::ofstream(tmp) << "configs: [nope.yaml]\n";
  EXPECT_THROW(load_sweep(tmp), ConfigError);
  fs::remove(tmp);
}
