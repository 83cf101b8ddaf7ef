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

#ifndef INFUCB_RECOMMENDERS_HPP
#define INFUCB_RECOMMENDERS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "infucb/bracket_engine.hpp"
#include "infucb/trace.hpp"

// Output rules layered on the bracket engine. Arms with no pulls never enter
// an LCB-based output or acceptance.

namespace infucb {

struct LcbCandidate {
  ArmId arm = kNoArm;
  std::uint32_t bracket_r = 0;
  double lcb = ArgmaxTree::kMinusInf;
};

namespace detail {
inline bool lcb_better(const LcbCandidate& a, const LcbCandidate& b) {
  if (a.lcb != b.lcb) {
    return a.lcb > b.lcb;
  }
  if (a.arm != b.arm) {
    return a.arm < b.arm;
  }
  return a.bracket_r < b.bracket_r;
}
}  // namespace detail

/// O_t: maximizer of mean - U(T, delta / (|A_r| r^2)) over every pulled
/// (arm, bracket) pair in the active brackets. Ties go to the lowest arm id,
/// then the lowest bracket.
inline std::optional<LcbCandidate> try_best_arm_output(const EngineState& s) {
  std::optional<LcbCandidate> best;
  for (const Bracket& b : s.brackets) {
    if (!b.active) {
      continue;
    }
    LcbCandidate c;
    if (s.config.objective == Objective::best_arm) {
      const std::size_t pos = b.lcb.argmax();
      if (pos == ArgmaxTree::npos || b.lcb.key(pos) == ArgmaxTree::kMinusInf) {
        continue;
      }
      c = {b.arm_ids[pos], b.r, b.lcb.key(pos)};
    } else {
      for (std::uint32_t pos = 0; pos < b.size(); ++pos) {
        const double v = lcb_key(s, b, pos);
        if (v == ArgmaxTree::kMinusInf) {
          continue;
        }
        const LcbCandidate x{b.arm_ids[pos], b.r, v};
        if (c.arm == kNoArm || detail::lcb_better(x, c)) {
          c = x;
        }
      }
      if (c.arm == kNoArm) {
        continue;
      }
    }
    if (!best || detail::lcb_better(c, *best)) {
      best = c;
    }
  }
  return best;
}

inline ArmId best_arm_output(const EngineState& s) {
  const auto c = try_best_arm_output(s);
  if (!c) {
    throw std::logic_error("best_arm_output: no arm has been pulled");
  }
  return c->arm;
}

/// Largest output LCB of one arm across the brackets holding it (r_0 of the
/// best-of-both combiner).
inline std::optional<LcbCandidate> best_lcb_of_arm(const EngineState& s, ArmId arm) {
  std::optional<LcbCandidate> best;
  for (const Membership& mb : s.memberships.at(arm)) {
    const Bracket& b = s.brackets[mb.bracket];
    const double v = lcb_key(s, b, mb.position);
    if (v == ArgmaxTree::kMinusInf) {
      continue;
    }
    const LcbCandidate c{arm, b.r, v};
    if (!best || detail::lcb_better(c, *best)) {
      best = c;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Acceptance bookkeeping

inline void accept_into_s(EngineState& s, ArmId arm) {
  s.in_s[arm] = 1;
  s.s_round[arm] = s.t;
  s.s_list.push_back(arm);
  const bool excl = s.excluded(arm);
  for (const Membership& mb : s.memberships[arm]) {
    Bracket& b = s.brackets[mb.bracket];
    b.s_members.emplace_back(mb.position, s.t);
    if (excl) {
      ++b.accepted_here;
      b.ucb.set(mb.position, ArgmaxTree::kMinusInf);
    }
  }
}

inline void accept_into_q(EngineState& s, ArmId arm) {
  s.in_q[arm] = 1;
  s.q_list.push_back(arm);
  for (const Membership& mb : s.memberships[arm]) {
    Bracket& b = s.brackets[mb.bracket];
    ++b.accepted_here;
    b.ucb.set(mb.position, ArgmaxTree::kMinusInf);
  }
}

inline void accept_into_d(EngineState& s, ArmId arm) {
  s.in_d[arm] = 1;
  s.d_list.push_back(arm);
}

/// Smallest p in [1, |A_r|] such that mean - U(T, (p / |A_r|) level) >= mu0,
/// or |A_r| + 1 when none qualifies. The radius shrinks as p grows, so the
/// membership of an arm in s(p) is monotone in p and bisection applies.
inline std::uint32_t bh_rank_of(const EngineState& s, const Bracket& b, std::uint32_t pos) {
  const std::uint64_t t = s.count(b, pos);
  if (t == 0) {
    return b.no_rank();
  }
  const double mu = s.mean(b, pos);
  const double mu0 = *s.config.mu0;
  const double size = static_cast<double>(b.size());
  const double level = s.bh_level(b);
  auto passes = [&](std::uint32_t p) {
    return mu - u_bound(s.config.schedule, t, static_cast<double>(p) / size * level) >= mu0;
  };
  auto hi = static_cast<std::uint32_t>(b.size());
  if (!passes(hi)) {
    return b.no_rank();
  }
  std::uint32_t lo = 0;  // passes(lo) false by convention
  while (hi - lo > 1) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// p_hat = max{p : |s(p)| >= p} from the rank histogram; 0 when no p works.
inline std::uint32_t bh_p_hat(const Bracket& b) {
  std::uint64_t at_most = 0;  // |s(size)|
  for (std::uint32_t p = 1; p <= b.size(); ++p) {
    at_most += b.bh_hist[p];
  }
  for (auto p = static_cast<std::uint32_t>(b.size()); p >= 1; --p) {
    if (at_most >= p) {
      return p;
    }
    at_most -= b.bh_hist[p];
  }
  return 0;
}

/// |s(p)| for a given p, evaluated directly (test oracle and diagnostics).
inline std::size_t bh_set_size(const EngineState& s, const Bracket& b, std::uint32_t p) {
  std::size_t count = 0;
  const double level = static_cast<double>(p) / static_cast<double>(b.size()) * s.bh_level(b);
  for (std::uint32_t pos = 0; pos < b.size(); ++pos) {
    const std::uint64_t t = s.count(b, pos);
    if (t > 0 && s.mean(b, pos) - u_bound(s.config.schedule, t, level) >= *s.config.mu0) {
      ++count;
    }
  }
  return count;
}

struct FdrStepResult {
  std::uint32_t p_hat = 0;
  std::vector<ArmId> accepted;  // newly added to S, ascending
};

/// Multiple-testing step on bracket r: S_{t+1} = S_t ∪ s(p_hat). Only
/// positions whose statistics changed since the last visit are re-ranked.
inline FdrStepResult fdr_step(EngineState& s, std::uint32_t r) {
  Bracket& b = s.brackets.at(r - 1);
  bool in_range_change = false;
  for (const std::uint32_t pos : b.dirty) {
    b.is_dirty[pos] = 0;
    const std::uint32_t old_rank = b.bh_rank[pos];
    const std::uint32_t new_rank = bh_rank_of(s, b, pos);
    if (old_rank != new_rank) {
      --b.bh_hist[old_rank];
      ++b.bh_hist[new_rank];
      b.bh_rank[pos] = new_rank;
      in_range_change = true;
    }
  }
  b.dirty.clear();
  FdrStepResult out;
  if (!in_range_change) {
    return out;
  }
  out.p_hat = bh_p_hat(b);
  if (out.p_hat == 0) {
    return out;
  }
  for (std::uint32_t pos = 0; pos < b.size(); ++pos) {
    const ArmId arm = b.arm_ids[pos];
    if (b.bh_rank[pos] <= out.p_hat && s.in_s[arm] == 0) {
      accept_into_s(s, arm);
      out.accepted.push_back(arm);
    }
  }
  return out;
}

/// FWER-TPR acceptance: Q_{t+1} = Q_t ∪ {i in A_r : LCB at delta/(|A_r| r^2) >= mu0}.
inline std::vector<ArmId> fwer_tpr_step(EngineState& s, std::uint32_t r) {
  Bracket& b = s.brackets.at(r - 1);
  std::vector<ArmId> accepted;
  const double budget = s.output_delta(b);
  std::sort(b.dirty.begin(), b.dirty.end());
  for (const std::uint32_t pos : b.dirty) {
    b.is_dirty[pos] = 0;
    const ArmId arm = b.arm_ids[pos];
    const std::uint64_t t = s.count(b, pos);
    if (s.in_q[arm] != 0 || t == 0) {
      continue;
    }
    if (s.mean(b, pos) - u_bound(s.config.schedule, t, budget) >= *s.config.mu0) {
      accept_into_q(s, arm);
      accepted.push_back(arm);
    }
  }
  b.dirty.clear();
  return accepted;
}

// ---------------------------------------------------------------------------
// FWER-FWPD pieces

/// xi_{t,r} = max{2 |S_t ∩ A_r|, 5 / (3 (1 - 4 delta_r)) log(1/delta_r) r^2}.
inline double fwpd_xi(const Bracket& b, std::size_t s_in_bracket) {
  const double rd = b.r;
  const double floor_term =
      5.0 / (3.0 * (1.0 - 4.0 * b.delta_r)) * reg_log(1.0 / b.delta_r) * rd * rd;
  return std::max(2.0 * static_cast<double>(s_in_bracket), floor_term);
}

/// chi_{t,r} = |A_r| - (1 - 2 d'(1 + 4 d')) |S_t ∩ A_r|
///             + (4 (1 + 4 d') / 3) log(5 log2(|A_r| / d') / d'), d' = delta'_r.
/// The inner log2 is the binary logarithm; the outer one is reg_log.
inline double fwpd_chi(const Bracket& b, std::size_t s_in_bracket) {
  const double dp = b.delta_prime_r;
  const double size = static_cast<double>(b.size());
  return size - (1.0 - 2.0 * dp * (1.0 + 4.0 * dp)) * static_cast<double>(s_in_bracket) +
         4.0 * (1.0 + 4.0 * dp) / 3.0 * reg_log(5.0 * std::log2(size / dp) / dp);
}

/// Bakes delta / xi into bracket r's sampling index; rebuilds only when xi
/// moved.
inline double fwpd_prepare_sampling(EngineState& s, std::uint32_t r) {
  Bracket& b = s.brackets.at(r - 1);
  const double xi = fwpd_xi(b, b.accepted_here);
  if (xi != b.xi) {
    b.xi = xi;
    b.sampling_delta = s.config.delta / xi;
    rebuild_ucb(s, r - 1);
  }
  return xi;
}

/// Positions of S_t ∩ A_r, i.e. arms that joined S before round t.
inline std::vector<std::uint32_t> s_members_before(const EngineState& s, const Bracket& b) {
  std::vector<std::uint32_t> out;
  for (const auto& [pos, joined] : b.s_members) {
    if (joined < s.t) {
      out.push_back(pos);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// J_t = argmax over (S_t ∩ A_r) \ D_t of mean + U(T, delta_r / nu); unpulled
/// first, ties to the lowest id. kNoArm position when the set is empty.
inline std::optional<std::uint32_t> fwpd_select_j(const EngineState& s, const Bracket& b,
                                                  const std::vector<std::uint32_t>& members) {
  const double nu = std::max<double>(static_cast<double>(members.size()), 1.0);
  const double budget = b.delta_r / nu;
  std::optional<std::uint32_t> best;
  double best_key = ArgmaxTree::kMinusInf;
  for (const std::uint32_t pos : members) {
    if (s.in_d[b.arm_ids[pos]] != 0) {
      continue;
    }
    const std::uint64_t t = s.count(b, pos);
    const double key = t == 0 ? kInf : s.mean(b, pos) + u_bound(s.config.schedule, t, budget);
    if (!best || key > best_key) {
      best = pos;
      best_key = key;
    }
  }
  return best;
}

/// D_{t+1} = D_t ∪ {i in S_t ∩ A_r : mean - U(T, delta / chi) >= mu0}.
inline std::vector<ArmId> fwpd_accept(EngineState& s, std::uint32_t r,
                                      const std::vector<std::uint32_t>& members) {
  const Bracket& b = s.brackets.at(r - 1);
  const double chi = fwpd_chi(b, members.size());
  const double budget = s.config.delta / chi;
  std::vector<ArmId> accepted;
  for (const std::uint32_t pos : members) {
    const ArmId arm = b.arm_ids[pos];
    const std::uint64_t t = s.count(b, pos);
    if (s.in_d[arm] != 0 || t == 0) {
      continue;
    }
    if (s.mean(b, pos) - u_bound(s.config.schedule, t, budget) >= *s.config.mu0) {
      accepted.push_back(arm);
    }
  }
  for (const ArmId arm : accepted) {
    accept_into_d(s, arm);
  }
  return accepted;
}

}  // namespace infucb

#endif  // INFUCB_RECOMMENDERS_HPP
