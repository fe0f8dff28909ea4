// Copyright 2026 The S2DN Authors. All Rights Reserved.
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

#ifndef S2DN_RNG_HPP_
#define S2DN_RNG_HPP_

#include <cstdint>

namespace s2dn {

// SplitMix64 generator. This is a wire contract shared with other
// implementations of the preprocessing pipeline: every draw sequence
// (noise injection, negative sampling, initialization) must be reproducible
// bit for bit from the seed, so the three derived draws below are fixed.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Top 53 bits scaled to [0, 1).
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // floor(uniform01() * n); n must be positive.
  std::uint64_t uniform_int(std::uint64_t n) {
    auto v = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

  // Uniform draw strictly inside (0, 1); used where a log of the draw is
  // taken (Gumbel noise, concrete relaxation).
  double uniform_open01() {
    double u;
    do {
      u = uniform01();
    } while (u <= 0.0);
    return u;
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Seed for an independent sub-stream: the first SplitMix64 output of
// (seed XOR index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  DetRng rng(seed ^ index);
  return rng.next();
}

}  // namespace s2dn

#endif  // S2DN_RNG_HPP_
