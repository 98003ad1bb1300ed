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

#include <algorithm>
#include <sstream>
#include <vector>

#include "mtend/metrics.hpp"

using namespace mtend;

namespace {

// Per-episode metrics whose machine split sums to `total`.
EpisodeMetrics episode(double total_collected) {
  EpisodeMetrics m;
  m.collected = static_cast<int>(total_collected);
  const std::vector<double> machines{total_collected / 2, total_collected / 2};
  const std::vector<double> agents{total_collected / 3, total_collected / 3, total_collected / 3};
  m.avr_mu = machine_utilization(machines, 10).average;
  m.avr_au = agent_utilization(agents, 20).average;
  return m;
}

}  // namespace

TEST(Metrics, UtilizationMatchesReportedPairs) {
  // M = 2 machines, P_imax = 10, N = 3 agents.
  for (auto [total, util] : {std::pair{10.2, 0.51}, std::pair{11.86, 0.59}}) {
    const auto m = episode(total);
    EXPECT_NEAR(m.avr_mu, util, 0.005);
    EXPECT_NEAR(m.avr_au, util, 0.005);
  }
}

TEST(Metrics, UtilizationIndependentOfSplit) {
  // Avr(MU) = total / (M P_imax) and Avr(AU) = total / P_max regardless of who collected.
  const std::vector<double> machines{7, 3};
  const std::vector<double> agents{10, 0, 0};
  EXPECT_DOUBLE_EQ(machine_utilization(machines, 10).average, 0.5);
  EXPECT_DOUBLE_EQ(agent_utilization(agents, 20).average, 0.5);
  EXPECT_DOUBLE_EQ(agent_utilization(agents, 20).per_entity[0], 1.5);
}

TEST(Metrics, UtilizationErrors) {
  const std::vector<double> over{11, 0};
  EXPECT_THROW(machine_utilization(over, 10), UsageError);
  EXPECT_THROW(machine_utilization({}, 10), UsageError);
  EXPECT_THROW(agent_utilization(over, 0), UsageError);
}

TEST(Metrics, EpisodeMetricsFromState) {
  const TendingScenario sc{ScenarioConfig{}};
  EXPECT_EQ(sc.parts_per_machine_max(), 10);
  auto s = sc.reset(nullptr);
  s.machines[0].parts_collected = 4;
  s.machines[1].parts_collected = 2;
  s.tasks[0].parts_collected = 5;
  s.tasks[1].parts_collected = 1;
  s.tasks[0].parts_delivered = 4;
  s.tasks[2].collisions = 3;
  const auto m = episode_metrics(sc, s);
  EXPECT_EQ(m.collected, 6);
  EXPECT_EQ(m.delivered, 4);
  EXPECT_EQ(m.collisions, 3);
  EXPECT_DOUBLE_EQ(m.avr_mu, 0.3);
  EXPECT_DOUBLE_EQ(m.avr_au, 0.3);
}

TEST(Metrics, AggregateWindowAndSeeds) {
  auto run = [](std::vector<int> collected) {
    std::vector<EpisodeMetrics> out;
    for (int c : collected) {
      EpisodeMetrics m;
      m.collected = c;
      out.push_back(m);
    }
    return out;
  };
  // Window 2: seed means 4 and 6 -> mean 5, population std 1.
  const auto r = aggregate({run({100, 3, 5}), run({0, 6, 6})}, 2);
  EXPECT_DOUBLE_EQ(r.get("collected").mean, 5.0);
  EXPECT_DOUBLE_EQ(r.get("collected").std, 1.0);
  EXPECT_EQ(r.seeds, 2);
  // Three seeds 4, 5, 6: std sqrt(2/3).
  const auto r3 = aggregate({run({4}), run({5}), run({6})}, 1);
  EXPECT_NEAR(r3.get("collected").std, 0.816, 5e-4);
  EXPECT_THROW(aggregate({run({1})}, 2), UsageError);
  EXPECT_THROW(aggregate({}, 1), UsageError);
  EXPECT_THROW(r.get("bogus"), UsageError);
}

TEST(Metrics, CsvColumnsFixed) {
  EXPECT_EQ(metrics_csv_header(),
            "seed,episode,collected,delivered,collisions,avr_mu,avr_au,return_total,r_pick,r_place,r_collision,r_progress_machine,"
            "r_progress_storage,r_uncollected,r_time");
  EpisodeMetrics m;
  m.collected = 3;
  m.avr_mu = 0.15;
  const auto row = metrics_csv_row(2, 17, m);
  EXPECT_EQ(row.rfind("2,17,3,0,0,0.15,", 0), 0u);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 14);
}

TEST(Metrics, ReportTableFormat) {
  EpisodeMetrics m;
  m.collected = 10;
  std::ostringstream os;
  write_report_table(os, {{"demo", aggregate({{m}}, 1)}});
  EXPECT_NE(os.str().find("10.00 (0.00)"), std::string::npos);
  EXPECT_NE(os.str().find("Avr(MU)"), std::string::npos);
}
