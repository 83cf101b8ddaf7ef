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

#ifndef INFUCB_ENGINE_HPP
#define INFUCB_ENGINE_HPP

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "infucb/bracket_engine.hpp"
#include "infucb/recommenders.hpp"
#include "infucb/trace.hpp"

namespace infucb {

/// What one round produced.
struct RoundResult {
  PullRecord pull;
  ArmId output = kNoArm;  // O_t in best-arm mode
  std::optional<std::uint32_t> opened_bracket;
  std::vector<RecommendationEvent> events;
};

/// The infinite-UCB algorithm as a step-at-a-time state machine. It never
/// terminates on its own; callers decide how many rounds to run.
///
///   Engine engine(n, config, seed);
///   ArmSampler env(instance, reward_seed);
///   for (int i = 0; i < horizon; ++i) {
///     const RoundResult& res = engine.step(env);
///   }
class Engine {
 public:
  Engine(std::size_t n_arms, EngineConfig config, std::uint64_t seed)
      : state_(n_arms, std::move(config), seed) {}

  [[nodiscard]] const EngineState& state() const { return state_; }
  EngineState& mutable_state() { return state_; }
  [[nodiscard]] const EngineConfig& config() const { return state_.config; }
  [[nodiscard]] ArmId output() const { return output_; }

  template <class RewardFn>
  const RoundResult& step(RewardFn&& reward) {
    EngineState& s = state_;
    ++s.t;
    result_.events.clear();
    result_.opened_bracket = open_bracket_if_due(s);
    result_.pull = PullRecord{};
    result_.pull.t = s.t;

    const std::optional<std::uint32_t> r =
        s.config.cost_select ? heuristic_select(s) : select_bracket(s);
    if (r) {
      result_.pull.bracket_r = *r;
      run_bracket_round(*r, reward);
    }

    if (s.config.prune_brackets) {
      if (s.config.objective == Objective::fdr_tpr && s_changed_) {
        recompute_scores(s);
      }
      heuristic_prune(s);
    }
    s_changed_ = false;

    if (s.config.objective == Objective::best_arm) {
      const auto best = try_best_arm_output(s);
      const ArmId out = best ? best->arm : kNoArm;
      if (out != output_) {
        output_ = out;
        result_.events.push_back({s.t, EventKind::output_ot, {out}, best ? best->bracket_r : 0, {}});
      }
      result_.output = output_;
    }
    return result_;
  }

 private:
  template <class RewardFn>
  void run_bracket_round(std::uint32_t r, RewardFn& reward) {
    EngineState& s = state_;
    const Objective obj = s.config.objective;

    std::vector<std::uint32_t> members_before;
    if (obj == Objective::fwer_fwpd) {
      fwpd_prepare_sampling(s, r);
      members_before = s_members_before(s, s.brackets[r - 1]);
    }

    const ArmChoice choice = select_arm(s, r);
    if (choice.arm != kNoArm) {
      const double x = reward(choice.arm);
      result_.pull.arm_id = choice.arm;
      result_.pull.reward = x;
      result_.pull.was_forced_init = choice.forced_init;
      record_observation(s, r, choice.position, x);
    }

    switch (obj) {
      case Objective::best_arm:
        break;
      case Objective::fdr_tpr:
      case Objective::fwer_fwpd: {
        auto res = fdr_step(s, r);
        if (!res.accepted.empty()) {
          s_changed_ = true;
          result_.events.push_back({s.t, EventKind::fdr_accept, std::move(res.accepted), r, res.p_hat});
        }
        break;
      }
      case Objective::fwer_tpr: {
        auto acc = fwer_tpr_step(s, r);
        if (!acc.empty()) {
          result_.events.push_back({s.t, EventKind::fwer_accept, std::move(acc), r, {}});
        }
        break;
      }
    }

    if (obj == Objective::fwer_fwpd && !members_before.empty()) {
      const Bracket& b = s.brackets[r - 1];
      if (const auto j = fwpd_select_j(s, b, members_before)) {
        const ArmId arm = b.arm_ids[*j];
        const double x = reward(arm);
        result_.pull.secondary = SecondaryPull{arm, x};
        record_observation(s, r, *j, x);
      }
      auto acc = fwpd_accept(s, r, members_before);
      if (!acc.empty()) {
        std::sort(acc.begin(), acc.end());
        result_.events.push_back({s.t, EventKind::fwpd_accept, std::move(acc), r, {}});
      }
    }
  }

  EngineState state_;
  RoundResult result_;
  ArmId output_ = kNoArm;
  bool s_changed_ = false;
};

}  // namespace infucb

#endif  // INFUCB_ENGINE_HPP
