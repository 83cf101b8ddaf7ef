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

#ifndef INFUCB_BRACKET_ENGINE_HPP
#define INFUCB_BRACKET_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "infucb/argmax_tree.hpp"
#include "infucb/confidence.hpp"
#include "infucb/instance.hpp"
#include "infucb/random.hpp"

// Bracket bookkeeping for the infinite-UCB family: the doubling schedule that
// opens random arm subsets, the round-robin cursor, per-bracket statistics
// and the UCB pull rule. The acceptance rules that sit on top live in
// recommenders.hpp; engine.hpp strings one round together.

namespace infucb {

enum class Objective { best_arm, fdr_tpr, fwer_tpr, fwer_fwpd };
enum class Mode { theory, practice };

inline const char* to_string(Objective o) {
  switch (o) {
    case Objective::best_arm: return "best_arm";
    case Objective::fdr_tpr: return "fdr_tpr";
    case Objective::fwer_tpr: return "fwer_tpr";
    case Objective::fwer_fwpd: return "fwer_fwpd";
  }
  return "?";
}

inline Objective objective_from_string(const std::string& s) {
  if (s == "best_arm") return Objective::best_arm;
  if (s == "fdr_tpr") return Objective::fdr_tpr;
  if (s == "fwer_tpr") return Objective::fwer_tpr;
  if (s == "fwer_fwpd") return Objective::fwer_fwpd;
  throw std::invalid_argument("unknown objective '" + s + "'");
}

inline bool is_threshold_objective(Objective o) { return o != Objective::best_arm; }

struct EngineConfig {
  Objective objective = Objective::best_arm;
  double delta = 0.05;
  std::optional<double> mu0;
  ConfidenceSchedule schedule{};
  Mode mode = Mode::theory;
  bool share_samples = false;
  /// Bracket r has size min(n, 2^(r - 1 + first_bracket_log2)).
  unsigned first_bracket_log2 = 1;
  bool stop_after_full_bracket = false;
  /// Open exactly one bracket holding every arm (single-bracket baseline).
  bool single_bracket = false;
  /// Run the multiple-testing step at level delta_r instead of delta'_r.
  bool bh_at_delta = false;
  bool prune_brackets = false;
  bool cost_select = false;
  double cost_select_prob = 0.9;
  std::uint32_t cost_refresh_rounds = 32;

  /// Defaults used for experiments: start at 2^6 arms, stop opening once a
  /// full bracket exists, multiple-testing step at level delta_r.
  static EngineConfig practice(Objective objective, double delta, std::optional<double> mu0 = {}) {
    EngineConfig c;
    c.objective = objective;
    c.delta = delta;
    c.mu0 = mu0;
    c.mode = Mode::practice;
    c.first_bracket_log2 = 6;
    c.stop_after_full_bracket = true;
    c.bh_at_delta = true;
    return c;
  }

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("engine: delta must lie in (0, 1)");
    }
    schedule.validate();
    if (is_threshold_objective(objective) && !mu0) {
      throw std::invalid_argument(std::string("engine: objective ") + to_string(objective) +
                                  " requires mu0");
    }
    if (objective == Objective::fwer_fwpd && !(delta < 0.25)) {
      throw std::invalid_argument("engine: FWER-FWPD requires delta < 1/4");
    }
    if (first_bracket_log2 < 1 || first_bracket_log2 > 31) {
      throw std::invalid_argument("engine: first_bracket_log2 must be in [1, 31]");
    }
    if ((prune_brackets || cost_select) && mode != Mode::practice) {
      throw std::invalid_argument("engine: bracket heuristics are practice-mode only");
    }
    if (prune_brackets && objective != Objective::best_arm && objective != Objective::fdr_tpr) {
      throw std::invalid_argument("engine: pruning is defined for best_arm and fdr_tpr");
    }
    if (cost_select && objective != Objective::fdr_tpr) {
      throw std::invalid_argument("engine: cost-estimate selection is defined for fdr_tpr");
    }
    if (!(cost_select_prob >= 0.0 && cost_select_prob <= 1.0)) {
      throw std::invalid_argument("engine: cost_select_prob must be in [0, 1]");
    }
    if (cost_refresh_rounds == 0) {
      throw std::invalid_argument("engine: cost_refresh_rounds must be positive");
    }
  }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One random arm subset with its own statistics and confidence budgets.
struct Bracket {
  std::uint32_t r = 0;
  std::vector<ArmId> arm_ids;  // ascending
  std::vector<std::uint64_t> pull_count;
  std::vector<double> reward_sum;
  double delta_r = 0.0;
  double delta_prime_r = 0.0;
  bool active = true;

  ArgmaxTree ucb;  // sampling index; -inf for excluded arms, +inf for unpulled
  ArgmaxTree lcb;  // output bound at delta / (|A_r| r^2); -inf for unpulled
  double sampling_delta = 0.0;
  double xi = 0.0;  // FWPD sampling inflation currently baked into `ucb`

  std::uint32_t accepted_here = 0;  // |excluded-set ∩ A_r|
  // Positions whose arm joined S, with the round it joined (FWPD).
  std::vector<std::pair<std::uint32_t, std::uint64_t>> s_members;

  // Multiple-testing cache: bh_rank[pos] = min p with pos in s(p), size()+1
  // when no p qualifies. bh_hist[p] counts positions with that rank.
  std::vector<std::uint32_t> bh_rank;
  std::vector<std::uint32_t> bh_hist;
  std::vector<std::uint32_t> dirty;
  std::vector<std::uint8_t> is_dirty;

  std::uint32_t score = 0;
  double cost_estimate = kInf;

  [[nodiscard]] std::size_t size() const { return arm_ids.size(); }
  [[nodiscard]] std::uint32_t no_rank() const { return static_cast<std::uint32_t>(size()) + 1; }
};

struct Membership {
  std::uint32_t bracket = 0;   // 0-based index into EngineState::brackets
  std::uint32_t position = 0;  // index into Bracket::arm_ids
};

struct EngineState {
  EngineConfig config;
  std::size_t n = 0;
  std::uint64_t t = 0;
  std::uint32_t ell = 0;
  std::uint32_t cursor = 0;  // previous R_t, 1-based; 0 before round 1
  std::vector<Bracket> brackets;
  std::vector<std::vector<Membership>> memberships;  // per arm

  std::vector<std::uint8_t> in_s;  // S_t
  std::vector<std::uint8_t> in_q;  // Q_t
  std::vector<std::uint8_t> in_d;  // D_t
  std::vector<std::uint64_t> s_round;
  std::vector<ArmId> s_list;
  std::vector<ArmId> q_list;
  std::vector<ArmId> d_list;

  std::vector<std::uint64_t> pooled_count;
  std::vector<double> pooled_sum;

  bool full_bracket_open = false;
  std::uint64_t total_pulls = 0;
  std::uint64_t last_cost_refresh = 0;
  bool costs_valid = false;
  Rng rng;
  std::vector<std::uint32_t> scratch;

  EngineState(std::size_t n_arms, EngineConfig cfg, std::uint64_t seed)
      : config(std::move(cfg)), n(n_arms), rng(seed) {
    config.validate();
    if (n == 0 || n >= kNoArm) {
      throw std::invalid_argument("engine: number of arms must be in [1, 2^32 - 1)");
    }
    memberships.resize(n);
    in_s.assign(n, 0);
    in_q.assign(n, 0);
    in_d.assign(n, 0);
    s_round.assign(n, 0);
    if (config.share_samples) {
      pooled_count.assign(n, 0);
      pooled_sum.assign(n, 0.0);
    }
  }

  [[nodiscard]] std::uint64_t count(const Bracket& b, std::uint32_t pos) const {
    return config.share_samples ? pooled_count[b.arm_ids[pos]] : b.pull_count[pos];
  }

  [[nodiscard]] double mean(const Bracket& b, std::uint32_t pos) const {
    if (config.share_samples) {
      const ArmId a = b.arm_ids[pos];
      return pooled_sum[a] / static_cast<double>(pooled_count[a]);
    }
    return b.reward_sum[pos] / static_cast<double>(b.pull_count[pos]);
  }

  /// Arms barred from the I_t pull: S_t for FDR and FWPD, Q_t for FWER-TPR.
  [[nodiscard]] bool excluded(ArmId arm) const {
    switch (config.objective) {
      case Objective::fdr_tpr:
      case Objective::fwer_fwpd: return in_s[arm] != 0;
      case Objective::fwer_tpr: return in_q[arm] != 0;
      case Objective::best_arm: return false;
    }
    return false;
  }

  [[nodiscard]] bool tracks_dirty() const { return config.objective != Objective::best_arm; }

  [[nodiscard]] double output_delta(const Bracket& b) const {
    const double r = b.r;
    return config.delta / (static_cast<double>(b.size()) * r * r);
  }

  [[nodiscard]] double bh_level(const Bracket& b) const {
    return config.bh_at_delta ? b.delta_r : b.delta_prime_r;
  }
};

inline double bracket_delta(double delta, std::uint32_t r) {
  const double rd = r;
  return delta / (rd * rd);
}

inline double bracket_delta_prime(double delta_r) {
  return delta_r / (6.4 * reg_log(36.0 / delta_r));
}

// ---------------------------------------------------------------------------
// Index maintenance

inline double ucb_key(const EngineState& s, const Bracket& b, std::uint32_t pos) {
  if (s.excluded(b.arm_ids[pos])) {
    return ArgmaxTree::kMinusInf;
  }
  const std::uint64_t t = s.count(b, pos);
  if (t == 0) {
    return kInf;
  }
  return s.mean(b, pos) + u_bound(s.config.schedule, t, b.sampling_delta);
}

inline double lcb_key(const EngineState& s, const Bracket& b, std::uint32_t pos) {
  const std::uint64_t t = s.count(b, pos);
  if (t == 0) {
    return ArgmaxTree::kMinusInf;
  }
  return s.mean(b, pos) - u_bound(s.config.schedule, t, s.output_delta(b));
}

inline void mark_dirty(Bracket& b, std::uint32_t pos) {
  if (b.is_dirty[pos] == 0) {
    b.is_dirty[pos] = 1;
    b.dirty.push_back(pos);
  }
}

inline void refresh_position(EngineState& s, std::uint32_t bi, std::uint32_t pos) {
  Bracket& b = s.brackets[bi];
  b.ucb.set(pos, ucb_key(s, b, pos));
  if (s.config.objective == Objective::best_arm) {
    b.lcb.set(pos, lcb_key(s, b, pos));
  }
  if (s.tracks_dirty()) {
    mark_dirty(b, pos);
  }
}

inline void rebuild_ucb(EngineState& s, std::uint32_t bi) {
  Bracket& b = s.brackets[bi];
  for (std::uint32_t pos = 0; pos < b.size(); ++pos) {
    b.ucb.set(pos, ucb_key(s, b, pos));
  }
}

// ---------------------------------------------------------------------------
// Schedule

inline std::uint32_t bracket_size_for(const EngineState& s, std::uint32_t r) {
  if (s.config.single_bracket) {
    return static_cast<std::uint32_t>(s.n);
  }
  const unsigned exponent = r - 1 + s.config.first_bracket_log2;
  if (exponent >= 32) {
    return static_cast<std::uint32_t>(s.n);
  }
  return static_cast<std::uint32_t>(std::min<std::uint64_t>(s.n, std::uint64_t{1} << exponent));
}

/// True when round t must open bracket ell + 1 (t >= 2^ell * ell).
inline bool bracket_due(std::uint64_t t, std::uint32_t ell) {
  if (ell >= 58) {
    return false;
  }
  return t >= (std::uint64_t{1} << ell) * ell;
}

/// Appends a bracket with the given arms (ascending) and wires up indices.
inline std::uint32_t add_bracket(EngineState& s, std::vector<ArmId> arms) {
  Bracket b;
  b.r = s.ell + 1;
  b.arm_ids = std::move(arms);
  const std::size_t size = b.arm_ids.size();
  b.pull_count.assign(size, 0);
  b.reward_sum.assign(size, 0.0);
  b.delta_r = bracket_delta(s.config.delta, b.r);
  b.delta_prime_r = bracket_delta_prime(b.delta_r);
  b.sampling_delta = s.config.delta;
  b.ucb.reset(size);
  b.lcb.reset(size);
  b.bh_rank.assign(size, b.no_rank());
  b.bh_hist.assign(size + 2, 0);
  b.bh_hist[b.no_rank()] = static_cast<std::uint32_t>(size);
  b.is_dirty.assign(size, 0);
  const auto bi = static_cast<std::uint32_t>(s.brackets.size());
  s.brackets.push_back(std::move(b));
  Bracket& nb = s.brackets.back();
  for (std::uint32_t pos = 0; pos < size; ++pos) {
    const ArmId arm = nb.arm_ids[pos];
    s.memberships[arm].push_back({bi, pos});
    if (s.excluded(arm)) {
      ++nb.accepted_here;
    }
    if (s.in_s[arm] != 0) {
      nb.s_members.emplace_back(pos, s.s_round[arm]);
    }
    refresh_position(s, bi, pos);
  }
  ++s.ell;
  if (size == s.n) {
    s.full_bracket_open = true;
  }
  s.costs_valid = false;
  return nb.r;
}

/// Opens bracket ell + 1 when the doubling schedule says so. Returns its
/// 1-based index.
inline std::optional<std::uint32_t> open_bracket_if_due(EngineState& s) {
  if (s.config.single_bracket) {
    if (s.ell > 0) {
      return std::nullopt;
    }
  } else {
    if (s.config.stop_after_full_bracket && s.full_bracket_open) {
      return std::nullopt;
    }
    if (!bracket_due(s.t, s.ell)) {
      return std::nullopt;
    }
  }
  const std::uint32_t size = bracket_size_for(s, s.ell + 1);
  std::vector<ArmId> arms;
  if (size == s.n) {
    arms.resize(s.n);
    std::iota(arms.begin(), arms.end(), ArmId{0});
  } else {
    arms = s.rng.sample_without_replacement(static_cast<std::uint32_t>(s.n), size, s.scratch);
    std::sort(arms.begin(), arms.end());
  }
  return add_bracket(s, std::move(arms));
}

// ---------------------------------------------------------------------------
// Selection

inline bool has_j_candidates(const EngineState& s, const Bracket& b) {
  for (const auto& [pos, joined] : b.s_members) {
    if (joined < s.t && s.in_d[b.arm_ids[pos]] == 0) {
      return true;
    }
  }
  return false;
}

/// A bracket can be worked on this round: not pruned and something to pull.
inline bool bracket_usable(const EngineState& s, const Bracket& b) {
  if (!b.active) {
    return false;
  }
  if (b.ucb.max_key() > ArgmaxTree::kMinusInf) {
    return true;
  }
  return s.config.objective == Objective::fwer_fwpd && has_j_candidates(s, b);
}

/// Round-robin cursor R_t = 1 + R_{t-1} 1{R_{t-1} < ell}, skipping pruned or
/// exhausted brackets. nullopt when no bracket is usable this round.
inline std::optional<std::uint32_t> select_bracket(EngineState& s) {
  if (s.ell == 0) {
    throw std::logic_error("select_bracket: no open bracket");
  }
  std::uint32_t c = s.cursor;
  for (std::uint32_t step = 0; step < s.ell; ++step) {
    c = 1 + (c < s.ell ? c : 0);
    if (bracket_usable(s, s.brackets[c - 1])) {
      s.cursor = c;
      return c;
    }
  }
  s.cursor = 1 + (s.cursor < s.ell ? s.cursor : 0);
  return std::nullopt;
}

struct ArmChoice {
  ArmId arm = kNoArm;
  std::uint32_t position = 0;
  bool forced_init = false;
};

/// I_t: an unpulled candidate (lowest id) if any, else the UCB argmax with
/// ties to the lowest id. arm == kNoArm when the candidate set is empty.
inline ArmChoice select_arm(const EngineState& s, std::uint32_t r) {
  const Bracket& b = s.brackets.at(r - 1);
  const std::size_t pos = b.ucb.argmax();
  if (pos == ArgmaxTree::npos || b.ucb.key(pos) == ArgmaxTree::kMinusInf) {
    return {};
  }
  const auto p = static_cast<std::uint32_t>(pos);
  return {b.arm_ids[p], p, s.count(b, p) == 0};
}

/// Folds one reward into the statistics of (bracket r, position) and every
/// index that depends on it.
inline void record_observation(EngineState& s, std::uint32_t r, std::uint32_t pos, double reward) {
  const std::uint32_t bi = r - 1;
  Bracket& b = s.brackets[bi];
  ++b.pull_count[pos];
  b.reward_sum[pos] += reward;
  ++s.total_pulls;
  if (s.config.share_samples) {
    const ArmId arm = b.arm_ids[pos];
    ++s.pooled_count[arm];
    s.pooled_sum[arm] += reward;
    for (const Membership& mb : s.memberships[arm]) {
      refresh_position(s, mb.bracket, mb.position);
    }
  } else {
    refresh_position(s, bi, pos);
  }
}

// ---------------------------------------------------------------------------
// Practice heuristics

/// Deactivates brackets dominated by a strictly larger active bracket: by
/// maximum output LCB (best-arm) or by accepted-arm score (FDR).
inline std::vector<std::uint32_t> heuristic_prune(EngineState& s) {
  std::vector<std::uint32_t> pruned;
  const bool by_lcb = s.config.objective == Objective::best_arm;
  auto value = [&](const Bracket& b) {
    return by_lcb ? b.lcb.max_key() : static_cast<double>(b.score);
  };
  for (auto& b : s.brackets) {
    if (!b.active) {
      continue;
    }
    const double mine = value(b);
    for (const auto& other : s.brackets) {
      if (&other == &b || !other.active || other.size() <= b.size()) {
        continue;
      }
      if (mine < value(other)) {
        b.active = false;
        pruned.push_back(b.r);
        break;
      }
    }
  }
  return pruned;
}

/// Gives a point to the bracket that pulled each accepted arm strictly more
/// often than any other bracket.
inline void recompute_scores(EngineState& s) {
  for (auto& b : s.brackets) {
    b.score = 0;
  }
  for (const ArmId arm : s.s_list) {
    std::uint64_t best = 0;
    std::uint32_t winner = 0;
    bool unique = false;
    for (const Membership& mb : s.memberships[arm]) {
      const std::uint64_t c = s.brackets[mb.bracket].pull_count[mb.position];
      if (c > best) {
        best = c;
        winner = mb.bracket;
        unique = true;
      } else if (c == best) {
        unique = false;
      }
    }
    if (unique && best > 0) {
      ++s.brackets[winner].score;
    }
  }
}

/// Number of brackets the practice schedule opens in total (until a full
/// bracket); the open count in theory mode.
inline std::uint32_t planned_bracket_count(const EngineState& s) {
  if (!s.config.stop_after_full_bracket || s.config.single_bracket) {
    return std::max<std::uint32_t>(1, s.ell);
  }
  std::uint32_t r = 1;
  while (bracket_size_for(s, r) < s.n) {
    ++r;
  }
  return r;
}

/// Estimated pulls for bracket `b` to accept five more arms.
inline double bracket_cost_estimate(const EngineState& s, const Bracket& b) {
  constexpr std::size_t kTop = 5;
  const double mu0 = *s.config.mu0;
  const double total_brackets = planned_bracket_count(s);
  std::vector<std::pair<double, std::uint32_t>> pulled;
  double unpulled = 0.0;
  for (std::uint32_t pos = 0; pos < b.size(); ++pos) {
    if (s.excluded(b.arm_ids[pos])) {
      continue;
    }
    if (s.count(b, pos) == 0) {
      unpulled += 1.0;
    } else {
      pulled.emplace_back(s.mean(b, pos), pos);
    }
  }
  if (pulled.empty()) {
    return unpulled > 0.0 ? unpulled : kInf;
  }
  const std::size_t top = std::min(kTop, pulled.size());
  std::partial_sort(pulled.begin(), pulled.begin() + static_cast<std::ptrdiff_t>(top), pulled.end(),
                    [](const auto& x, const auto& y) {
                      return x.first > y.first || (x.first == y.first && x.second < y.second);
                    });
  const double top_log = reg_log(static_cast<double>(b.size()) * total_brackets / s.config.delta);
  const double rest_log = reg_log(total_brackets / s.config.delta);
  double cost = unpulled;
  for (std::size_t i = 0; i < top; ++i) {
    const double gap = pulled[i].first - mu0;
    if (!(gap > 0.0)) {
      return kInf;
    }
    const double need = top_log / (gap * gap) - static_cast<double>(s.count(b, pulled[i].second));
    cost += std::max(need, 0.0);
  }
  const double lambda = mu0 + 2.0 * (pulled[top - 1].first - mu0);
  for (std::size_t i = top; i < pulled.size(); ++i) {
    const double gap = lambda - pulled[i].first;
    if (!(gap > 0.0)) {
      continue;
    }
    const double need = rest_log / (gap * gap) - static_cast<double>(s.count(b, pulled[i].second));
    cost += std::max(need, 0.0);
  }
  return cost;
}

/// With probability cost_select_prob picks the usable bracket with the lowest
/// cost estimate, otherwise continues the round-robin cycle.
inline std::optional<std::uint32_t> heuristic_select(EngineState& s) {
  std::vector<std::uint32_t> usable;
  for (const auto& b : s.brackets) {
    if (bracket_usable(s, b)) {
      usable.push_back(b.r);
    }
  }
  if (usable.empty()) {
    return select_bracket(s);
  }
  if (usable.size() == 1) {
    s.cursor = usable.front();
    return usable.front();
  }
  if (!s.costs_valid || s.t - s.last_cost_refresh >= s.config.cost_refresh_rounds) {
    for (auto& b : s.brackets) {
      b.cost_estimate = b.active ? bracket_cost_estimate(s, b) : kInf;
    }
    s.last_cost_refresh = s.t;
    s.costs_valid = true;
  }
  if (s.rng.uniform01() < s.config.cost_select_prob) {
    std::uint32_t best = 0;
    double best_cost = kInf;
    for (const std::uint32_t r : usable) {
      if (s.brackets[r - 1].cost_estimate < best_cost) {
        best_cost = s.brackets[r - 1].cost_estimate;
        best = r;
      }
    }
    if (best != 0) {
      return best;
    }
  }
  return select_bracket(s);
}

}  // namespace infucb

#endif  // INFUCB_BRACKET_ENGINE_HPP
