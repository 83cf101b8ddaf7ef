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

#include <cmath>
#include <cstdint>

#include <gtest/gtest.h>

#include "infucb/confidence.hpp"
#include "infucb/random.hpp"

namespace infucb {
namespace {

// Straight-line oracle: first t with u_bound(t) <= gamma.
std::uint64_t u_inverse_scan(const ConfidenceSchedule& s, double gamma, double delta) {
  for (std::uint64_t t = 1;; ++t) {
    if (u_bound(s, t, delta) <= gamma) {
      return t;
    }
  }
}

TEST(RegLog, FloorAndValues) {
  EXPECT_DOUBLE_EQ(reg_log(std::exp(1.0)), 1.0);
  EXPECT_DOUBLE_EQ(reg_log(1.0), 1.0);
  EXPECT_DOUBLE_EQ(reg_log(0.5), 1.0);
  EXPECT_NEAR(reg_log(720.0), 6.579251212, 1e-9);
  EXPECT_THROW(reg_log(0.0), std::domain_error);
  EXPECT_THROW(reg_log(-1.0), std::domain_error);
}

TEST(UBound, DefaultAtOne) {
  const ConfidenceSchedule s;
  EXPECT_NEAR(u_bound(s, 1, 0.05), std::sqrt(4.0 * std::log(20.0)), 1e-12);
  EXPECT_NEAR(u_bound(s, 1, 0.05), 3.4616, 1e-4);
}

TEST(UBound, RejectsZeroPulls) {
  EXPECT_THROW(u_bound(ConfidenceSchedule{}, 0, 0.05), std::domain_error);
}

TEST(UBound, Positive) {
  const ConfidenceSchedule s;
  for (std::uint64_t t : {1ULL, 2ULL, 100ULL, 1000000ULL}) {
    for (double d : {0.5, 0.05, 1e-10}) {
      EXPECT_GT(u_bound(s, t, d), 0.0);
    }
  }
}

TEST(UBound, QuarteringSamples) {
  const ConfidenceSchedule s;
  for (std::uint64_t t : {1ULL, 10ULL, 100ULL}) {
    EXPECT_LT(u_bound(s, 4 * t, 0.1), u_bound(s, t, 0.1));
  }
}

TEST(UBound, MonotoneGrid) {
  const ConfidenceSchedule s;
  const double deltas[] = {0.5, 0.2, 0.1, 0.05, 1e-3, 1e-6, 1e-12};
  for (std::uint64_t t = 1; t < 3000; ++t) {
    for (std::size_t i = 0; i + 1 < std::size(deltas); ++i) {
      EXPECT_LT(u_bound(s, t, deltas[i]), u_bound(s, t, deltas[i + 1]));
    }
    EXPECT_GT(u_bound(s, t, 0.05), u_bound(s, t + 1, 0.05));
  }
}

TEST(UBound, ScalesWithSchedule) {
  const ConfidenceSchedule a{4.0, 1.0};
  const ConfidenceSchedule b{1.0, 0.25};
  EXPECT_NEAR(u_bound(a, 17, 0.1), 4.0 * u_bound(b, 17, 0.1), 1e-12);
}

TEST(UBound, ClampCounted) {
  reset_delta_clamp_count();
  const ConfidenceSchedule s;
  const double at_floor = u_bound(s, 5, kMinDelta);
  EXPECT_EQ(delta_clamp_count(), 0u);
  EXPECT_DOUBLE_EQ(u_bound(s, 5, 1e-320), at_floor);
  EXPECT_DOUBLE_EQ(u_bound(s, 5, 0.0), at_floor);
  EXPECT_EQ(delta_clamp_count(), 2u);
  EXPECT_THROW(u_bound(s, 5, 1.0), std::domain_error);
  EXPECT_THROW(u_bound(s, 5, -0.1), std::domain_error);
  EXPECT_THROW(u_bound(s, 5, std::nan("")), std::domain_error);
}

TEST(Schedule, Validate) {
  EXPECT_NO_THROW((ConfidenceSchedule{4.0, 1.0}.validate()));
  EXPECT_THROW((ConfidenceSchedule{0.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ConfidenceSchedule{1.0, -1.0}.validate()), std::invalid_argument);
}

TEST(UInverse, MatchesLinearScan) {
  const ConfidenceSchedule s;
  EXPECT_EQ(u_inverse(s, 1.0, 0.05), u_inverse_scan(s, 1.0, 0.05));
  // Frozen from the scan oracle.
  EXPECT_EQ(u_inverse(s, 1.0, 0.05), 19u);
  for (double g : {3.0, 2.0, 1.5, 0.7, 0.3, 0.1}) {
    for (double d : {0.2, 0.05, 1e-4}) {
      EXPECT_EQ(u_inverse(s, g, d), u_inverse_scan(s, g, d)) << g << " " << d;
    }
  }
}

TEST(UInverse, LargeGammaIsOne) {
  const ConfidenceSchedule s;
  EXPECT_EQ(u_inverse(s, u_bound(s, 1, 0.05), 0.05), 1u);
  EXPECT_EQ(u_inverse(s, 100.0, 0.05), 1u);
}

TEST(UInverse, Consistency) {
  const ConfidenceSchedule s;
  for (std::uint64_t t0 : {1ULL, 2ULL, 7ULL, 50ULL, 999ULL, 123456ULL}) {
    EXPECT_LE(u_inverse(s, u_bound(s, t0, 0.05), 0.05), t0);
  }
  for (double g = 0.05; g < 4.0; g *= 1.37) {
    for (double d : {0.3, 0.05, 1e-8}) {
      const auto t = u_inverse(s, g, d);
      EXPECT_LE(u_bound(s, t, d), g);
      EXPECT_TRUE(t == 1 || u_bound(s, t - 1, d) > g);
    }
  }
}

TEST(UInverse, Monotone) {
  const ConfidenceSchedule s;
  std::uint64_t prev = u_inverse(s, 0.05, 0.05);
  for (double g = 0.06; g < 4.0; g += 0.01) {
    const auto cur = u_inverse(s, g, 0.05);
    EXPECT_LE(cur, prev);
    prev = cur;
  }
  for (double g : {0.1, 0.5, 1.0}) {
    EXPECT_LE(u_inverse(s, g, 0.1), u_inverse(s, g, 0.01));
  }
}

TEST(UInverse, GrowthBound) {
  // t <= C gamma^-2 reg_log(reg_log(gamma^-2) / delta) with a fixed C.
  const ConfidenceSchedule s;
  for (double g = 0.01; g < 3.0; g *= 1.5) {
    for (double d : {0.1, 1e-3, 1e-9}) {
      const double bound = 16.0 / (g * g) * reg_log(reg_log(1.0 / (g * g)) / d) + 1.0;
      EXPECT_LE(static_cast<double>(u_inverse(s, g, d)), bound);
    }
  }
}

TEST(UInverse, RejectsBadGamma) {
  EXPECT_THROW(u_inverse(ConfidenceSchedule{}, 0.0, 0.05), std::domain_error);
}

TEST(Coverage, SmallMonteCarlo) {
  // Fast version of the acceptance-level check.
  const ConfidenceSchedule s;
  const int trials = 400;
  const int horizon = 2000;
  int violations = 0;
  Rng rng(99);
  for (int i = 0; i < trials; ++i) {
    double sum = 0.0;
    for (int t = 1; t <= horizon; ++t) {
      sum += rng.normal();
      if (std::abs(sum / t) > u_bound(s, static_cast<std::uint64_t>(t), 0.1)) {
        ++violations;
        break;
      }
    }
  }
  const double rate = static_cast<double>(violations) / trials;
  EXPECT_LE(rate, 0.1 + 3.0 * std::sqrt(0.1 * 0.9 / trials));
}

}  // namespace
}  // namespace infucb
