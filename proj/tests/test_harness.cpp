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
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "infucb/harness.hpp"

namespace infucb {
namespace {

RunTrace trace_with(std::vector<OutputChange> outs, std::uint64_t rounds) {
  RunTrace t;
  t.outputs = std::move(outs);
  t.rounds = rounds;
  return t;
}

TEST(Checkpoints, Geometric) {
  EXPECT_EQ(geometric_checkpoints(10), (std::vector<std::uint64_t>{1, 2, 4, 8, 10}));
  EXPECT_EQ(geometric_checkpoints(8), (std::vector<std::uint64_t>{1, 2, 4, 8}));
  EXPECT_EQ(geometric_checkpoints(1), (std::vector<std::uint64_t>{1}));
  RunConfig c;
  c.horizon = 100;
  c.checkpoints = {50, 0, 7, 200, 7};
  EXPECT_EQ(c.checkpoint_grid(), (std::vector<std::uint64_t>{7, 50}));
}

TEST(TauSimple, Examples) {
  const auto inst = gaussian_instance({1.0, 0.8, 0.0});
  EXPECT_EQ(tau_simple(trace_with({{1, 2}, {5, 0}}, 10), inst, 0.5), TauValue{5});
  EXPECT_EQ(tau_simple(trace_with({{1, 0}, {3, 2}, {4, 1}}, 10), inst, 0.5), TauValue{4});
  EXPECT_EQ(tau_simple(trace_with({{1, 0}}, 10), inst, 0.5), TauValue{0});
  EXPECT_EQ(tau_simple(trace_with({{1, 0}, {7, 2}}, 10), inst, 0.5), TauValue{});
  EXPECT_EQ(tau_simple(trace_with({{3, 0}}, 5), inst, 0.5), TauValue{3});  // no output yet is bad
  EXPECT_EQ(tau_simple(trace_with({{1, kNoArm}, {2, 1}}, 5), inst, 0.5), TauValue{2});
  // eps-good is strict: 0.8 is not above 1.0 - 0.2.
  EXPECT_EQ(tau_simple(trace_with({{1, 1}}, 5), inst, 0.2), TauValue{});
}

TEST(RunTrace, OutputAt) {
  const auto t = trace_with({{2, 4}, {5, 1}}, 9);
  EXPECT_EQ(t.output_at(1), kNoArm);
  EXPECT_EQ(t.output_at(2), 4u);
  EXPECT_EQ(t.output_at(4), 4u);
  EXPECT_EQ(t.output_at(5), 1u);
  EXPECT_EQ(t.output_at(9), 1u);
}

TEST(Discovery, FdpAndTauK) {
  const auto inst = gaussian_instance({1, 1, 1, 0, 0});
  RunTrace t;
  t.rounds = 10;
  t.events.push_back({2, EventKind::fdr_accept, {0, 1}, 1, 2});
  t.events.push_back({3, EventKind::output_ot, {4}, 1, {}});  // other kinds are ignored
  t.events.push_back({5, EventKind::fdr_accept, {2, 3}, 2, 2});
  const auto d = discovery_metrics(t, inst, 0.5, EventKind::fdr_accept, {1, 2, 4, 8}, {1, 2, 3, 4});
  ASSERT_EQ(d.series.size(), 4u);
  EXPECT_EQ(d.series[0].accepted, 0u);
  EXPECT_EQ(d.series[0].fdp(), 0.0);
  EXPECT_EQ(d.series[1].true_pos, 2u);
  EXPECT_EQ(d.series[2].accepted, 2u);
  EXPECT_EQ(d.series[3].accepted, 4u);
  EXPECT_DOUBLE_EQ(d.series[3].fdp(), 0.25);
  EXPECT_EQ(d.tau_k, (std::vector<TauValue>{2, 2, 5, std::nullopt}));
  EXPECT_EQ(d.final_true, 3u);
  EXPECT_EQ(d.final_false, 1u);
  EXPECT_EQ(d.first_false_round, std::optional<std::uint64_t>(5));
  EXPECT_THROW(accept_kind(Objective::best_arm), std::invalid_argument);
  EXPECT_EQ(accept_kind(Objective::fwer_fwpd), EventKind::fwpd_accept);
}

TEST(Aggregate, MeanSdInterval) {
  const auto a = aggregate(std::vector<double>{1, 2, 3});
  EXPECT_EQ(a.count, 3u);
  EXPECT_DOUBLE_EQ(a.mean, 2.0);
  EXPECT_DOUBLE_EQ(a.sd, 1.0);
  EXPECT_NEAR(a.ci_lo, 2.0 - 1.959963984540054 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(a.ci_hi, 2.0 + 1.959963984540054 / std::sqrt(3.0), 1e-12);
  const auto c = aggregate(std::vector<std::optional<double>>{4.0, std::nullopt, std::nullopt});
  EXPECT_EQ(c.count, 1u);
  EXPECT_EQ(c.censored, 2u);
  EXPECT_DOUBLE_EQ(c.sd, 0.0);
  EXPECT_FALSE(aggregate(std::vector<std::optional<double>>{std::nullopt}).defined());
}

TEST(Parallel, OrderAndWorkerIndependence) {
  auto fn = [](std::size_t i) { return trial_seed(42, 3, i) ^ (i * 7); };
  const auto one = parallel_trials(257, 1, fn);
  const auto many = parallel_trials(257, 8, fn);
  EXPECT_EQ(one, many);
  EXPECT_EQ(one[5], trial_seed(42, 3, 5) ^ 35u);
  EXPECT_NE(trial_seed(42, 3, 0), trial_seed(42, 4, 0));
  EXPECT_TRUE(parallel_trials(0, 4, fn).empty());
}

TEST(Parallel, RethrowsFirstError) {
  auto fn = [](std::size_t i) -> int {
    if (i == 13) throw std::runtime_error("boom");
    return static_cast<int>(i);
  };
  EXPECT_THROW(parallel_trials(100, 4, fn), std::runtime_error);
}

BanditInstance spike_instance() { return two_spike(128, 4, 0.0, 1.0, ArmKind::gaussian, 7); }

TEST(Run, InfiniteUcbDeterministic) {
  const auto inst = spike_instance();
  RunConfig c;
  c.seed = 11;
  c.horizon = 5000;
  c.epsilon = 0.5;
  const auto a = run(inst, c);
  const auto b = run(inst, c);
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_EQ(a.outputs, b.outputs);
  EXPECT_EQ(a.rounds, 5000u);
  EXPECT_EQ(a.total_pulls, 5000u);
  EXPECT_TRUE(a.pulls.empty());
  c.seed = 12;
  EXPECT_NE(run(inst, c).hash, a.hash);
  c.record_pulls = true;
  const auto rec = run(inst, c);
  EXPECT_EQ(rec.pulls.size(), 5000u);
  ASSERT_TRUE(rec.final_arm);
  EXPECT_EQ(rec.output_at(5000), *rec.final_arm);
}

TEST(Run, UniformBhIsOneBracket) {
  const auto inst = spike_instance();
  RunConfig c;
  c.algorithm = Algorithm::uniform_bh;
  c.engine.objective = Objective::fdr_tpr;
  c.engine.mu0 = 0.0;
  c.horizon = 3000;
  c.record_pulls = true;
  const auto t = run(inst, c);
  for (const auto& p : t.pulls) ASSERT_EQ(p.bracket_r, 1u);
  // The first 128 rounds initialize every arm in id order.
  for (std::size_t i = 0; i < 128; ++i) {
    ASSERT_EQ(t.pulls[i].arm_id, i);
    ASSERT_TRUE(t.pulls[i].was_forced_init);
  }
  EXPECT_EQ(baseline_uniform_bh(inst, c).hash, t.hash);
  c.engine.objective = Objective::best_arm;
  EXPECT_THROW(run(inst, c), std::invalid_argument);
}

TEST(Run, LucbStopsAndRecordsPulls) {
  const auto inst = spike_instance();
  RunConfig c;
  c.algorithm = Algorithm::lucb;
  c.horizon = 1000000;
  c.epsilon = 0.5;
  const auto t = run(inst, c);
  ASSERT_TRUE(t.stop_pulls);
  EXPECT_EQ(*t.stop_pulls, t.total_pulls);
  EXPECT_EQ(*t.stop_round, t.rounds);
  EXPECT_EQ(t.total_pulls, 2 * t.rounds);
  ASSERT_TRUE(t.final_arm);
  EXPECT_GT(mean_of(inst.arms[*t.final_arm]), 0.5);
  c.horizon = 10;
  const auto cut = run(inst, c);
  EXPECT_FALSE(cut.stop_pulls);
  EXPECT_EQ(cut.rounds, 10u);
}

TEST(Run, BobStreamsMatchStandaloneRuns) {
  const auto inst = spike_instance();
  RunConfig c;
  c.algorithm = Algorithm::bob;
  c.horizon = 2000000;
  c.epsilon = 0.5;
  c.record_pulls = true;
  const auto bob = run(inst, c);
  ASSERT_TRUE(bob.stop_round);
  EXPECT_EQ(bob.total_pulls, 3 * bob.rounds);

  RunConfig e = c;
  e.algorithm = Algorithm::infinite_ucb;
  e.horizon = bob.rounds;
  const auto eng = run(inst, e);
  RunConfig l = c;
  l.algorithm = Algorithm::lucb;
  const auto lucb = run(inst, l);
  ASSERT_EQ(lucb.rounds, bob.rounds);  // LUCB stops in the same round
  std::size_t ei = 0;
  std::size_t li = 0;
  for (const auto& p : bob.pulls) {
    if (p.source == PullSource::engine) {
      ASSERT_EQ(p, eng.pulls[ei++]);
    } else {
      ASSERT_EQ(p, lucb.pulls[li++]);
    }
  }
  for (std::uint64_t t = 1; t < bob.rounds; ++t) ASSERT_EQ(bob.output_at(t), eng.output_at(t));
}

TEST(Run, ConfigValidation) {
  const auto inst = spike_instance();
  RunConfig c;
  c.horizon = 0;
  EXPECT_THROW(run(inst, c), std::invalid_argument);
  c.horizon = 10;
  c.algorithm = Algorithm::bob;
  c.engine.objective = Objective::fwer_tpr;
  c.engine.mu0 = 0.0;
  EXPECT_THROW(run(inst, c), std::invalid_argument);
  c = RunConfig{};
  c.ks = {0};
  EXPECT_THROW(run(inst, c), std::invalid_argument);
  EXPECT_EQ(algorithm_from_string("bob"), Algorithm::bob);
  EXPECT_THROW(algorithm_from_string("ucb"), std::invalid_argument);
}

TEST(Run, LucbVarianceFollowsInstance) {
  const auto g = gaussian_instance({0, 1}, 2.0);
  RunConfig c;
  EXPECT_DOUBLE_EQ(detail::lucb_config_for(g, c).variance_proxy, 2.0);
  c.lucb_variance = 0.25;
  EXPECT_DOUBLE_EQ(detail::lucb_config_for(g, c).variance_proxy, 0.25);
}

}  // namespace
}  // namespace infucb
