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

#include <cstdint>
#include <random>

namespace mtend {

// Every random consumer draws from its own stream derived from the root seed:
//   stream(seed, consumer, index) = mt19937_64(splitmix(seed ^ splitmix(consumer) ^ splitmix(index)))
// so reordering consumers never shifts another consumer's draws.
enum class RngStream : std::uint64_t {
  kInit = 1,          // network parameter initialization
  kSpawnJitter = 2,   // per (update, env) spawn jitter
  kActions = 3,       // per update action sampling
  kMinibatch = 4,     // per update minibatch shuffling
  kEval = 5,          // evaluation-time jitter
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t seed, RngStream consumer, std::uint64_t index = 0) {
  const std::uint64_t mixed =
      splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(consumer) * 0x100000001B3ull) ^
      splitmix64(index + 0x632BE59BD9B4E019ull);
  return Rng(splitmix64(mixed));
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

}  // namespace mtend
