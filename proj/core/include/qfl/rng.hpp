// Copyright 2026 The qfl authors
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

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qfl {

/**
 * Deterministic random source used throughout the library.
 *
 * xoshiro256++ seeded via splitmix64. Every stochastic operation takes an
 * Rng (or pre-drawn coins) explicitly; there is no global generator. The
 * exact bit stream is part of the reproducibility contract: experiment
 * reruns with the same seed must produce identical draws, and independent
 * scripts can replay the stream from the reference algorithms.
 *
 * Substreams: Rng(seed, tag) gives independent streams for one master seed.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t tag = 0) {
    std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (tag + 1));
    for (auto &word : state_) word = splitmix64(z);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [0, 2pi).
  double uniform_angle() { return uniform() * 2.0 * std::numbers::pi; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n) {
    // Lemire multiply-shift with rejection; unbiased.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0ULL - n) % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bit() { return (next_u64() >> 63) != 0; }

  /// Standard normal draw, Box-Muller (cosine branch, two uniforms per draw,
  /// no cached spare so the stream layout stays position-independent).
  double normal() {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Laplace(0, scale) via inverse CDF.
  double laplace(double scale) {
    const double u = uniform() - 0.5;
    const double s = (u < 0.0) ? -1.0 : 1.0;
    double m = 1.0 - 2.0 * std::abs(u);
    if (m <= 0.0) m = 0x1.0p-53;
    return -scale * s * std::log(m);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t &z) {
    z += 0x9E3779B97F4A7C15ULL;
    std::uint64_t x = z;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Fixed substream tags for experiment runs. One master seed fans out to
// independent streams; a single-client run and a federated run with N=1
// share the client-0 batch stream so the reduction between them is exact.
namespace rng_tag {
inline constexpr std::uint64_t kParamInit = 1;
inline constexpr std::uint64_t kSchedule = 2;
inline constexpr std::uint64_t kDataSplit = 3;
inline constexpr std::uint64_t kInputNoise = 4;
inline constexpr std::uint64_t kGradientNoise = 5;
inline constexpr std::uint64_t kProtocol = 6;
inline constexpr std::uint64_t kAttack = 7;
inline constexpr std::uint64_t kClientBase = 100;  // client i -> kClientBase+i
}  // namespace rng_tag

}  // namespace qfl
