// Copyright 2026 The trajlab Authors
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

namespace trajlab {

inline constexpr std::uint64_t kSplitMixGolden = 0x9E3779B97F4A7C15ULL;

/// Finalizer of the splitmix64 reference generator.
[[nodiscard]] constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// splitmix64: tiny, full-period, used only for seeding and stream derivation.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += kSplitMixGolden;
    return splitmix64_mix(state_);
  }

 private:
  std::uint64_t state_;
};

/// Seed of the index-th independent substream of a master seed.
/// Closed form of the index-th splitmix64 output, so substreams can be
/// derived in any order (and in parallel) without advancing shared state.
[[nodiscard]] constexpr std::uint64_t derive_stream(std::uint64_t master_seed,
                                                    std::uint64_t index) {
  return splitmix64_mix(master_seed + (index + 1) * kSplitMixGolden);
}

/// xoshiro256++ reference generator. Bit-exact on any platform; no libm in
/// the double path, so generated corpora reproduce byte-for-byte everywhere.
class Xoshiro256pp {
 public:
  explicit constexpr Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  constexpr std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Uniform integer in [0, bound). bound == 0 returns 0.
  constexpr std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) return 0;
    // Rejection-free multiply-shift; bias < 2^-53 for the small bounds used here.
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(bound));
  }

  constexpr bool coin() { return (next() >> 63) != 0; }

  /// Approximate standard normal: Irwin-Hall sum of 12 uniforms minus 6.
  /// Exact moments up to order 3, tails clipped at +/-6; adequate for the
  /// small measurement-noise sigmas used here and fully portable.
  constexpr double approx_normal() {
    double acc = 0.0;
    for (int i = 0; i < 12; ++i) acc += next_double();
    return acc - 6.0;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4] = {};
};

}  // namespace trajlab
