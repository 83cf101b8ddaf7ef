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

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "infucb/argmax_tree.hpp"
#include "infucb/random.hpp"

namespace infucb {
namespace {

TEST(Rng, Deterministic) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_EQ(a.normal(), b.normal());
  }
}

TEST(Rng, DeriveSeedIsPureAndSpreads) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a) {
    for (std::uint64_t b = 0; b < 50; ++b) {
      seen.insert(derive_seed(7, a, b));
    }
  }
  EXPECT_EQ(seen.size(), 2500u);
}

TEST(Rng, UniformMoments) {
  Rng r(3);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Rng, NormalMoments) {
  Rng r(4);
  const int n = 400000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(Rng, UniformIndexCoversRange) {
  Rng r(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = r.uniform_index(7);
    ASSERT_LT(k, 7u);
    ++hits[k];
  }
  for (int h : hits) {
    EXPECT_NEAR(h, 10000, 500);
  }
  EXPECT_EQ(r.uniform_index(1), 0u);
  EXPECT_EQ(r.uniform_index(0), 0u);
}

TEST(Rng, SampleWithoutReplacement) {
  Rng r(6);
  std::vector<std::uint32_t> scratch;
  for (std::uint32_t pop : {1u, 5u, 64u}) {
    for (std::uint32_t count = 0; count <= pop; ++count) {
      auto s = r.sample_without_replacement(pop, count, scratch);
      ASSERT_EQ(s.size(), count);
      std::set<std::uint32_t> uniq(s.begin(), s.end());
      EXPECT_EQ(uniq.size(), count);
      for (auto v : s) {
        EXPECT_LT(v, pop);
      }
    }
  }
  // Each element of {0..9} lands in a 3-sample with probability 3/10.
  std::vector<int> hits(10, 0);
  const int reps = 30000;
  for (int i = 0; i < reps; ++i) {
    for (auto v : r.sample_without_replacement(10, 3, scratch)) {
      ++hits[v];
    }
  }
  for (int h : hits) {
    EXPECT_NEAR(h, reps * 0.3, 5.0 * std::sqrt(reps * 0.3 * 0.7));
  }
}

TEST(ArgmaxTree, TiesGoLow) {
  ArgmaxTree t(5, 1.0);
  EXPECT_EQ(t.argmax(), 0u);
  t.set(3, 2.0);
  t.set(1, 2.0);
  EXPECT_EQ(t.argmax(), 1u);
  EXPECT_EQ(t.argmax(2, 5), 3u);
  EXPECT_DOUBLE_EQ(t.max_key(), 2.0);
}

TEST(ArgmaxTree, Empty) {
  ArgmaxTree t(0);
  EXPECT_EQ(t.argmax(), ArgmaxTree::npos);
  EXPECT_EQ(t.max_key(), ArgmaxTree::kMinusInf);
  ArgmaxTree u(4);
  EXPECT_EQ(u.argmax(2, 2), ArgmaxTree::npos);
}

TEST(ArgmaxTree, MatchesScan) {
  Rng r(8);
  for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 33u}) {
    ArgmaxTree t(n);
    std::vector<double> keys(n, ArgmaxTree::kMinusInf);
    for (int step = 0; step < 500; ++step) {
      const auto slot = r.uniform_index(n);
      const double v = static_cast<double>(r.uniform_index(5));  // many ties
      t.set(slot, v);
      keys[slot] = v;
      const auto lo = r.uniform_index(n);
      const auto hi = lo + 1 + r.uniform_index(n - lo);
      const auto expect = static_cast<std::size_t>(std::max_element(keys.begin() + lo, keys.begin() + hi) - keys.begin());
      ASSERT_EQ(t.argmax(lo, hi), expect);
      const auto all = static_cast<std::size_t>(std::max_element(keys.begin(), keys.end()) - keys.begin());
      ASSERT_EQ(t.argmax(), all);
    }
  }
}

}  // namespace
}  // namespace infucb
