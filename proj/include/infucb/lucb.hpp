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

#ifndef INFUCB_LUCB_HPP
#define INFUCB_LUCB_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "infucb/argmax_tree.hpp"
#include "infucb/engine.hpp"
#include "infucb/trace.hpp"

namespace infucb {

/// LUCB(eps) with radius
///   beta(u, delta) = sqrt(2 sigma^2 ln(k1 n u^alpha / delta) / u).
/// sigma^2 = 1/4 recovers the [0, 1]-bounded radius sqrt(ln(k1 n u^alpha / delta) / (2u)).
struct LucbConfig {
  double delta = 0.05;
  double epsilon = 0.1;
  double k1 = 1.25;
  double alpha = 4.0;
  double variance_proxy = 0.25;

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("lucb: delta must lie in (0, 1)");
    }
    if (!(epsilon >= 0.0)) {
      throw std::invalid_argument("lucb: epsilon must be non-negative");
    }
    if (!(k1 > 0.0) || !(alpha > 0.0) || !(variance_proxy > 0.0)) {
      throw std::invalid_argument("lucb: k1, alpha and variance_proxy must be positive");
    }
  }
};

inline double lucb_beta(const LucbConfig& c, std::size_t n, std::uint64_t u) {
  if (u == 0) {
    throw std::domain_error("lucb_beta: pull count must be at least 1");
  }
  const double ud = static_cast<double>(u);
  const double arg = c.k1 * static_cast<double>(n) * std::pow(ud, c.alpha) / c.delta;
  return std::sqrt(2.0 * c.variance_proxy * std::log(arg) / ud);
}

struct LucbState {
  LucbConfig config;
  std::size_t n = 0;
  std::vector<std::uint64_t> pull_count;
  std::vector<double> reward_sum;
  std::size_t unpulled = 0;
  ArgmaxTree mean_tree;  // empirical means, -inf while unpulled
  ArgmaxTree ucb_tree;   // mean + beta, +inf while unpulled
  bool stopped = false;
  std::optional<ArmId> certified_arm;
  std::uint64_t rounds = 0;
  std::uint64_t total_pulls = 0;

  LucbState(std::size_t n_arms, LucbConfig cfg) : config(cfg), n(n_arms) {
    config.validate();
    if (n == 0) {
      throw std::invalid_argument("lucb: need at least one arm");
    }
    pull_count.assign(n, 0);
    reward_sum.assign(n, 0.0);
    unpulled = n;
    mean_tree.reset(n, ArgmaxTree::kMinusInf);
    ucb_tree.reset(n, kInf);
  }

  [[nodiscard]] double mean(ArmId a) const {
    return reward_sum[a] / static_cast<double>(pull_count[a]);
  }
  [[nodiscard]] double beta(ArmId a) const { return lucb_beta(config, n, pull_count[a]); }

  /// Empirical best arm (lowest id on ties); kNoArm before any pull.
  [[nodiscard]] ArmId empirical_best() const {
    const std::size_t i = mean_tree.argmax();
    return mean_tree.key(i) == ArgmaxTree::kMinusInf ? kNoArm : static_cast<ArmId>(i);
  }

  /// Highest mean + beta among arms other than `h`.
  [[nodiscard]] ArmId challenger(ArmId h) const {
    const std::size_t left = mean_tree.size() == 0 ? ArgmaxTree::npos : ucb_tree.argmax(0, h);
    const std::size_t right = ucb_tree.argmax(h + 1, n);
    if (left == ArgmaxTree::npos && right == ArgmaxTree::npos) {
      return kNoArm;
    }
    if (left == ArgmaxTree::npos) {
      return static_cast<ArmId>(right);
    }
    if (right == ArgmaxTree::npos) {
      return static_cast<ArmId>(left);
    }
    return static_cast<ArmId>(ucb_tree.key(right) > ucb_tree.key(left) ? right : left);
  }

  void observe(ArmId a, double x) {
    if (pull_count[a] == 0) {
      --unpulled;
    }
    ++pull_count[a];
    reward_sum[a] += x;
    ++total_pulls;
    const double mu = mean(a);
    mean_tree.set(a, mu);
    ucb_tree.set(a, mu + beta(a));
  }
};

/// LUCB stopping rule: with h the empirical best and l the challenger, stop
/// once UCB(l) <= LCB(h) + eps. Certifies h.
inline std::optional<ArmId> lucb_stopped(LucbState& s) {
  if (s.stopped) {
    return s.certified_arm;
  }
  if (s.unpulled > 0) {
    return std::nullopt;
  }
  const ArmId h = s.empirical_best();
  const ArmId l = s.challenger(h);
  bool stop = (l == kNoArm);
  if (!stop) {
    const double lcb_h = s.mean(h) - s.beta(h);
    const double ucb_l = s.mean(l) + s.beta(l);
    stop = ucb_l <= lcb_h + s.config.epsilon;
  }
  if (stop) {
    s.stopped = true;
    s.certified_arm = h;
  }
  return s.certified_arm;
}

/// One LUCB round: two pulls. While some arm is unpulled, the two lowest
/// unpulled ids are taken; afterwards the empirical best and its challenger.
/// The stopping rule is evaluated at the end of the round.
template <class RewardFn>
std::vector<PullRecord> lucb_round(LucbState& s, RewardFn&& reward) {
  if (s.stopped) {
    throw std::logic_error("lucb_round: already stopped");
  }
  ++s.rounds;
  std::vector<PullRecord> out;
  auto pull = [&](ArmId a, bool forced) {
    const double x = reward(a);
    s.observe(a, x);
    PullRecord rec;
    rec.t = s.rounds;
    rec.arm_id = a;
    rec.reward = x;
    rec.was_forced_init = forced;
    rec.source = PullSource::lucb;
    out.push_back(rec);
  };
  for (int slot = 0; slot < 2; ++slot) {
    if (s.unpulled > 0) {
      ArmId next = 0;
      while (s.pull_count[next] != 0) {
        ++next;
      }
      pull(next, true);
      continue;
    }
    if (s.n == 1) {
      break;
    }
    if (slot == 0) {
      const ArmId h = s.empirical_best();
      const ArmId l = s.challenger(h);
      pull(h, false);
      pull(l, false);
      break;
    }
    // One init pull happened in slot 0 and it completed initialization.
    pull(s.challenger(s.empirical_best()), false);
  }
  lucb_stopped(s);
  return out;
}

// ---------------------------------------------------------------------------
// Best-of-both combiner

struct BobStep {
  ArmId output = kNoArm;
  bool terminated_now = false;
  std::vector<PullRecord> pulls;  // engine pull first, then LUCB pulls
  std::vector<RecommendationEvent> events;
};

/// Runs the best-arm engine and LUCB(eps) side by side without sharing
/// samples. Outputs the engine's O_t until LUCB stops, then keeps whichever
/// of O_t and LUCB's arm has the larger lower bound, and freezes.
class BestOfBoth {
 public:
  BestOfBoth(std::size_t n_arms, EngineConfig engine_config, std::uint64_t engine_seed,
             LucbConfig lucb_config)
      : engine_(n_arms, check(std::move(engine_config)), engine_seed), lucb_(n_arms, lucb_config) {}

  [[nodiscard]] const Engine& engine() const { return engine_; }
  [[nodiscard]] const LucbState& lucb() const { return lucb_; }
  [[nodiscard]] bool terminated() const { return terminated_; }
  [[nodiscard]] std::optional<ArmId> final_arm() const { return final_arm_; }
  [[nodiscard]] std::uint64_t rounds() const { return rounds_; }

  template <class EngineReward, class LucbReward>
  BobStep step(EngineReward&& engine_reward, LucbReward&& lucb_reward) {
    if (terminated_) {
      throw std::logic_error("BestOfBoth::step: already terminated");
    }
    ++rounds_;
    BobStep out;
    const RoundResult& res = engine_.step(engine_reward);
    out.pulls.push_back(res.pull);
    out.events = res.events;
    auto lp = lucb_round(lucb_, lucb_reward);
    for (auto& p : lp) {
      p.t = rounds_;
      out.pulls.push_back(p);
    }
    const ArmId o_t = res.output;
    if (!lucb_.stopped) {
      out.output = o_t;
      return out;
    }
    const ArmId j_hat = *lucb_.certified_arm;
    ArmId chosen = j_hat;
    if (o_t != kNoArm) {
      const auto r0 = best_lcb_of_arm(engine_.state(), o_t);
      const double lucb_lcb = lucb_.mean(j_hat) - lucb_.beta(j_hat);
      if (r0 && r0->lcb >= lucb_lcb) {
        chosen = o_t;
      }
    }
    terminated_ = true;
    final_arm_ = chosen;
    out.output = chosen;
    out.terminated_now = true;
    return out;
  }

 private:
  static EngineConfig check(EngineConfig c) {
    if (c.objective != Objective::best_arm) {
      throw std::invalid_argument("BestOfBoth: engine must use the best_arm objective");
    }
    return c;
  }

  Engine engine_;
  LucbState lucb_;
  bool terminated_ = false;
  std::optional<ArmId> final_arm_;
  std::uint64_t rounds_ = 0;
};

}  // namespace infucb

#endif  // INFUCB_LUCB_HPP
