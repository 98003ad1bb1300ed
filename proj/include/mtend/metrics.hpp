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

// Episode metrics (collected, delivered, collisions, machine and agent
// utilization) and their aggregation over episodes and seeds.

#include <array>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mtend/errors.hpp"
#include "mtend/reward.hpp"
#include "mtend/scenario.hpp"

namespace mtend {

struct EpisodeMetrics {
  int collected = 0;
  int delivered = 0;
  int collisions = 0;
  std::vector<int> per_machine;  // P_i per machine
  std::vector<int> per_agent;    // P_i per agent
  double avr_mu = 0.0;
  double avr_au = 0.0;
  double return_total = 0.0;  // summed over agents
  std::array<double, kNumRewardComponents> component_returns{};
};

struct Utilization {
  std::vector<double> per_entity;
  double average = 0.0;
};

// MU_i = P_i / P_imax, Avr(MU) = sum MU_i / M.
inline Utilization machine_utilization(std::span<const double> parts, double parts_max) {
  if (!(parts_max > 0)) throw UsageError("machine_utilization: P_imax must be positive");
  if (parts.empty()) throw UsageError("machine_utilization: no machines");
  Utilization u;
  for (double p : parts) {
    if (p > parts_max + 1e-9) {
      throw UsageError("machine_utilization: " + std::to_string(p) + " parts exceed P_imax " + std::to_string(parts_max));
    }
    u.per_entity.push_back(p / parts_max);
  }
  u.average = std::accumulate(u.per_entity.begin(), u.per_entity.end(), 0.0) / static_cast<double>(parts.size());
  return u;
}

// AU_i = P_i / (P_max / N), Avr(AU) = sum AU_i / N.
inline Utilization agent_utilization(std::span<const double> parts, double parts_max) {
  if (parts.empty()) throw UsageError("agent_utilization: no agents");
  if (!(parts_max > 0)) throw UsageError("agent_utilization: P_max must be positive");
  const double share = parts_max / static_cast<double>(parts.size());
  Utilization u;
  for (double p : parts) u.per_entity.push_back(p / share);
  u.average = std::accumulate(u.per_entity.begin(), u.per_entity.end(), 0.0) / static_cast<double>(parts.size());
  return u;
}

// Finalizes an episode from the terminal state. P_max = M * P_imax.
inline EpisodeMetrics episode_metrics(const TendingScenario& scenario, const ScenarioState& final_state) {
  EpisodeMetrics m;
  std::vector<double> machine_parts, agent_parts;
  for (const auto& machine : final_state.machines) {
    m.per_machine.push_back(machine.parts_collected);
    machine_parts.push_back(machine.parts_collected);
  }
  for (const auto& task : final_state.tasks) {
    m.per_agent.push_back(task.parts_collected);
    agent_parts.push_back(task.parts_collected);
    m.collected += task.parts_collected;
    m.delivered += task.parts_delivered;
    m.collisions += task.collisions;
  }
  const double pimax = scenario.parts_per_machine_max();
  m.avr_mu = machine_utilization(machine_parts, pimax).average;
  m.avr_au = agent_utilization(agent_parts, pimax * scenario.num_machines()).average;
  return m;
}

// Accumulates per-step reward breakdowns into an episode's return columns.
inline void accumulate_returns(EpisodeMetrics& m, const RewardBreakdown& rewards) {
  for (const auto& r : rewards) {
    const auto c = r.components();
    for (int k = 0; k < kNumRewardComponents; ++k) m.component_returns[k] += c[k];
    m.return_total += r.total;
  }
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

inline MeanStd mean_std(std::span<const double> xs) {
  if (xs.empty()) throw UsageError("mean_std: empty sample");
  MeanStd out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return out;
}

inline constexpr std::array<const char*, 5> kReportMetrics = {"collected", "delivered", "collisions", "avr_mu", "avr_au"};

inline std::array<double, 5> metric_values(const EpisodeMetrics& m) {
  return {static_cast<double>(m.collected), static_cast<double>(m.delivered), static_cast<double>(m.collisions), m.avr_mu,
          m.avr_au};
}

struct AggregateReport {
  int window = 0;
  int seeds = 0;
  std::array<MeanStd, 5> metrics{};          // across seeds, in kReportMetrics order
  std::vector<std::array<double, 5>> per_seed;  // final-window means per seed

  const MeanStd& get(const std::string& name) const {
    for (std::size_t i = 0; i < kReportMetrics.size(); ++i) {
      if (name == kReportMetrics[i]) return metrics[i];
    }
    throw UsageError("unknown metric " + name);
  }
};

// Mean over the last `window` episodes of each seed, then mean and population
// std across seeds.
inline AggregateReport aggregate(const std::vector<std::vector<EpisodeMetrics>>& runs, int window) {
  if (runs.empty()) throw UsageError("aggregate: no runs");
  if (window <= 0) throw UsageError("aggregate: window must be positive");
  AggregateReport report;
  report.window = window;
  report.seeds = static_cast<int>(runs.size());
  for (const auto& run : runs) {
    if (run.empty()) throw UsageError("aggregate: empty episode stream");
    if (static_cast<int>(run.size()) < window) {
      throw UsageError("aggregate: window " + std::to_string(window) + " exceeds stream of " + std::to_string(run.size()) +
                       " episodes");
    }
    std::array<double, 5> sums{};
    for (std::size_t e = run.size() - window; e < run.size(); ++e) {
      const auto v = metric_values(run[e]);
      for (int k = 0; k < 5; ++k) sums[k] += v[k];
    }
    for (auto& s : sums) s /= window;
    report.per_seed.push_back(sums);
  }
  for (int k = 0; k < 5; ++k) {
    std::vector<double> xs;
    for (const auto& s : report.per_seed) xs.push_back(s[k]);
    report.metrics[k] = mean_std(xs);
  }
  return report;
}

inline std::string format_mean_std(const MeanStd& m, int precision = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << m.mean << " (" << m.std << ")";
  return os.str();
}

// Text table with one column per labelled report, metrics as rows.
inline void write_report_table(std::ostream& os, const std::vector<std::pair<std::string, AggregateReport>>& columns) {
  const int w = 20;
  os << std::left << std::setw(12) << "Metric";
  for (const auto& [label, r] : columns) os << " | " << std::setw(w) << label;
  os << "\n" << std::string(12 + columns.size() * (w + 3), '-') << "\n";
  const std::array<const char*, 5> pretty = {"Collected", "Delivered", "Collisions", "Avr(MU)", "Avr(AU)"};
  for (int k = 0; k < 5; ++k) {
    os << std::left << std::setw(12) << pretty[k];
    for (const auto& [label, r] : columns) os << " | " << std::setw(w) << format_mean_std(r.metrics[k]);
    os << "\n";
  }
}

inline std::string metrics_csv_header() {
  std::string h = "seed,episode,collected,delivered,collisions,avr_mu,avr_au,return_total";
  for (const char* name : kRewardComponentNames) h += std::string(",") + name;
  return h;
}

inline std::string metrics_csv_row(long seed, long episode, const EpisodeMetrics& m) {
  std::ostringstream os;
  os << std::setprecision(10) << seed << ',' << episode << ',' << m.collected << ',' << m.delivered << ',' << m.collisions
     << ',' << m.avr_mu << ',' << m.avr_au << ',' << m.return_total;
  for (double c : m.component_returns) os << ',' << c;
  return os.str();
}

}  // namespace mtend
