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

#include <span>
#include <string>
#include <vector>

#include "mtend/errors.hpp"

namespace mtend::rl {

struct AdvantageResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Generalized advantage estimation over one trajectory:
//   delta_t = r_t + gamma V_{t+1} (1 - done_t) - V_t
//   A_t     = delta_t + gamma lambda (1 - done_t) A_{t+1}
// V_T is `bootstrap`. done_t marks that the episode ended after step t.
inline AdvantageResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                                   std::span<const double> dones, double bootstrap, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw ShapeError("compute_gae: rewards " + std::to_string(n) + ", values " + std::to_string(values.size()) +
                     ", dones " + std::to_string(dones.size()));
  }
  AdvantageResult out{std::vector<double>(n), std::vector<double>(n)};
  double next_value = bootstrap;
  double next_adv = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double live = 1.0 - dones[k];
    const double delta = rewards[k] + gamma * next_value * live - values[k];
    next_adv = delta + gamma * lambda * live * next_adv;
    out.advantages[k] = next_adv;
    out.returns[k] = next_adv + values[k];
    next_value = values[k];
  }
  return out;
}

}  // namespace mtend::rl
