// Copyright 2026 The specband Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPECBAND_RNG_HPP
#define SPECBAND_RNG_HPP

// Reproducible random streams. Every derived quantity (uniform reals, bounded
// integers, normals, Poisson counts) is defined here on top of xoshiro256++
// so that other implementations can regenerate identical streams; standard
// library distributions are implementation-defined and are not used.

#include <cstdint>
#include <string_view>

namespace specband {

/// One SplitMix64 finalization step applied to `z + golden gamma`.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}
  constexpr std::uint64_t next() {
    const std::uint64_t out = splitmix64_mix(state_);
    state_ += 0x9E3779B97F4A7C15ULL;
    return out;
  }

 private:
  std::uint64_t state_;
};

/// FNV-1a 64-bit, used to turn item identifiers into seed material.
constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char ch : text) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// seed' = mix(mix(mix(base) ^ item_hash) ^ group_tag)
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t item_hash,
                                    std::uint64_t group_tag) {
  return splitmix64_mix(splitmix64_mix(splitmix64_mix(base) ^ item_hash) ^ group_tag);
}

/// xoshiro256++ seeded with four consecutive SplitMix64 outputs.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed);

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Top 53 bits scaled into [0, 1).
  double uniform01();
  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Unbiased integer in [0, bound) by rejection of the low remainder zone.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// Standard normal via Box-Muller (cosine branch); consumes two uniforms.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  /// Poisson count: multiplication method below 10, PTRS above.
  std::int64_t poisson(double lambda);

 private:
  std::uint64_t s_[4];
};

}  // namespace specband

#endif  // SPECBAND_RNG_HPP
