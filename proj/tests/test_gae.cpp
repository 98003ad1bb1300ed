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

#include "mtend/rl/gae.hpp"
#include "mtend/rng.hpp"
#include "oracles.hpp"

using namespace mtend;
using namespace mtend::rl;

TEST(Gae, HandExample) {
  // Two steps, no terminal.
  const std::vector<double> r{1.0, 2.0}, v{0.5, 1.0}, d{0.0, 0.0};
  const auto out = compute_gae(r, v, d, 3.0, 0.9, 0.5);
  const double delta1 = 2.0 + 0.9 * 3.0 - 1.0;
  const double delta0 = 1.0 + 0.9 * 1.0 - 0.5;
  EXPECT_DOUBLE_EQ(out.advantages[1], delta1);
  EXPECT_DOUBLE_EQ(out.advantages[0], delta0 + 0.45 * delta1);
  EXPECT_DOUBLE_EQ(out.returns[0], out.advantages[0] + 0.5);
}

TEST(Gae, TerminalCutsBootstrapAndPropagation) {
  const std::vector<double> r{1.0, 1.0, 1.0}, v{0.2, 0.3, 0.4}, d{0.0, 1.0, 0.0};
  const auto out = compute_gae(r, v, d, 10.0, 0.99, 0.95);
  EXPECT_DOUBLE_EQ(out.advantages[1], 1.0 - 0.3);
  EXPECT_DOUBLE_EQ(out.advantages[2], 1.0 + 0.99 * 10.0 - 0.4);
}

TEST(Gae, LambdaOneGivesDiscountedReturns) {
  const std::vector<double> r{1, 2, 3, 4}, v{0.1, -0.2, 0.3, 0.0}, d{0, 0, 0, 0};
  const auto out = compute_gae(r, v, d, 5.0, 0.9, 1.0);
  double g = 5.0;
  for (int k = 3; k >= 0; --k) {
    g = r[k] + 0.9 * g;
    EXPECT_NEAR(out.returns[k], g, 1e-12);
  }
}

TEST(Gae, ShapeMismatch) {
  const std::vector<double> a{1, 2}, b{1};
  EXPECT_THROW(compute_gae(a, b, a, 0.0, 0.9, 0.9), ShapeError);
}

// Recursive form equals the explicit double sum on random trajectories.
TEST(GaeProperty, MatchesDoubleSum) {
  Rng rng = make_stream(11, RngStream::kActions);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(uniform01(rng) * 60);
    std::vector<double> r(n), v(n), d(n);
    for (int k = 0; k < n; ++k) {
      r[k] = uniform(rng, -2.0, 2.0);
      v[k] = uniform(rng, -5.0, 5.0);
      d[k] = uniform01(rng) < 0.1 ? 1.0 : 0.0;
    }
    const double boot = uniform(rng, -5.0, 5.0), gamma = uniform(rng, 0.8, 1.0), lambda = uniform(rng, 0.0, 1.0);
    const auto got = compute_gae(r, v, d, boot, gamma, lambda);
    const auto want = oracle::gae_double_sum(r, v, d, boot, gamma, lambda);
    for (int k = 0; k < n; ++k) {
      ASSERT_NEAR(got.advantages[k], want[k], 1e-10);
      ASSERT_NEAR(got.returns[k], want[k] + v[k], 1e-10);
    }
  }
}
