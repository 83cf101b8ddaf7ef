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

#ifndef INFUCB_CONFIDENCE_HPP
#define INFUCB_CONFIDENCE_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace infucb {

/// Smallest confidence level ever passed to a logarithm.
inline constexpr double kMinDelta = 1e-300;

namespace detail {
inline std::atomic<std::uint64_t>& delta_clamp_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}
}  // namespace detail

/// Number of times a confidence level below kMinDelta was clamped since
/// process start (or since the last reset).
inline std::uint64_t delta_clamp_count() {
  return detail::delta_clamp_counter().load(std::memory_order_relaxed);
}

inline void reset_delta_clamp_count() {
  detail::delta_clamp_counter().store(0, std::memory_order_relaxed);
}

/// Regularized logarithm max(ln x, 1). Every "log" in the hardness formulas
/// and confidence radii goes through this.
inline double reg_log(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("reg_log: argument must be positive");
  }
  return std::max(std::log(x), 1.0);
}

/// Clamps a confidence level into [kMinDelta, 1). Throws on negative, NaN or
/// values >= 1.
inline double clamp_delta(double delta) {
  if (!(delta >= 0.0) || delta >= 1.0) {
    throw std::domain_error("confidence level must lie in (0, 1)");
  }
  if (delta < kMinDelta) {
    detail::delta_clamp_counter().fetch_add(1, std::memory_order_relaxed);
    return kMinDelta;
  }
  return delta;
}

/// Anytime confidence radius
///   U(t, delta) = sqrt(scale_c * variance_proxy * reg_log(log2(2t) / delta) / t)
/// for variance_proxy-sub-Gaussian rewards.
struct ConfidenceSchedule {
  double scale_c = 4.0;
  double variance_proxy = 1.0;

  void validate() const {
    if (!(scale_c > 0.0) || !std::isfinite(scale_c)) {
      throw std::invalid_argument("ConfidenceSchedule: scale_c must be positive");
    }
    if (!(variance_proxy > 0.0) || !std::isfinite(variance_proxy)) {
      throw std::invalid_argument("ConfidenceSchedule: variance_proxy must be positive");
    }
  }

  friend bool operator==(const ConfidenceSchedule&, const ConfidenceSchedule&) = default;
};

inline double u_bound(const ConfidenceSchedule& schedule, std::uint64_t t, double delta) {
  if (t == 0) {
    throw std::domain_error("u_bound: pull count must be at least 1");
  }
  delta = clamp_delta(delta);
  const double td = static_cast<double>(t);
  const double inner = std::log2(2.0 * td) / delta;
  return std::sqrt(schedule.scale_c * schedule.variance_proxy * reg_log(inner) / td);
}

/// Smallest t >= 1 with u_bound(t, delta) <= gamma. Exponential search for a
/// bracketing power of two, then bisection; the radius is decreasing in t.
inline std::uint64_t u_inverse(const ConfidenceSchedule& schedule, double gamma, double delta) {
  if (!(gamma > 0.0)) {
    throw std::domain_error("u_inverse: gamma must be positive");
  }
  if (u_bound(schedule, 1, delta) <= gamma) {
    return 1;
  }
  std::uint64_t hi = 2;
  while (u_bound(schedule, hi, delta) > gamma) {
    if (hi >= (std::uint64_t{1} << 62)) {
      throw std::overflow_error("u_inverse: gamma too small to invert");
    }
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;  // u_bound(lo) > gamma
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (u_bound(schedule, mid, delta) <= gamma) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Lower and upper confidence bounds around an empirical mean.
inline double lower_bound(const ConfidenceSchedule& s, double mean, std::uint64_t t, double delta) {
  return mean - u_bound(s, t, delta);
}

inline double upper_bound(const ConfidenceSchedule& s, double mean, std::uint64_t t, double delta) {
  return mean + u_bound(s, t, delta);
}

}  // namespace infucb

#endif  // INFUCB_CONFIDENCE_HPP
