// Copyright 2026 The infucb Authors.
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

#ifndef INFUCB_RANDOM_HPP
#define INFUCB_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace infucb {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a path of
/// indices (stream kind, trial number, ...). Pure function of its inputs, so
/// the mapping is the same on every machine and for every worker count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(a + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(b + 0x85157af5ULL));
  return h;
}

/// Seeded random stream. The distributions are implemented here rather than
/// through <random> adaptors so that draw sequences do not depend on the
/// standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., bound - 1} (Lemire's nearly divisionless method).
  std::uint64_t uniform_index(std::uint64_t bound) {
    if (bound <= 1) {
      return 0;
    }
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<u128>(engine_()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via the Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  /// Draws `count` distinct values from {0, ..., population - 1} uniformly
  /// at random (partial Fisher-Yates). `scratch` is reused between calls.
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t population, std::uint32_t count,
                                                        std::vector<std::uint32_t>& scratch) {
    if (scratch.size() != population) {
      scratch.resize(population);
    }
    for (std::uint32_t i = 0; i < population; ++i) {
      scratch[i] = i;
    }
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<std::uint32_t>(uniform_index(population - i));
      std::swap(scratch[i], scratch[j]);
    }
    return {scratch.begin(), scratch.begin() + count};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace infucb

#endif  // INFUCB_RANDOM_HPP
