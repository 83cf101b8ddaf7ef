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

#ifndef INFUCB_VERIFY_HPP
#define INFUCB_VERIFY_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "infucb/confidence.hpp"
#include "infucb/hardness.hpp"
#include "infucb/instance.hpp"

namespace infucb {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr unsigned kLemmaMaxM = 14;

/// Thrown when an exhaustive enumeration would exceed its size budget.
class BudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) {
    return 0;
  }
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

/// All subsets of {0..m-1} of size k as bitmasks, in increasing order.
inline std::vector<std::uint32_t> subsets_of_size(unsigned m, unsigned k) {
  std::vector<std::uint32_t> out;
  const std::uint32_t limit = std::uint32_t{1} << m;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (static_cast<unsigned>(std::popcount(mask)) == k) {
      out.push_back(mask);
    }
  }
  return out;
}

/// A distribution over k-subsets of [m]: (bitmask, probability) pairs.
struct SubsetDistribution {
  unsigned m = 0;
  unsigned k = 0;
  std::vector<std::pair<std::uint32_t, Rational>> atoms;
};

inline SubsetDistribution uniform_subsets(unsigned m, unsigned k) {
  if (m > kLemmaMaxM) {
    throw BudgetExceeded("subset enumeration limited to m <= " + std::to_string(kLemmaMaxM));
  }
  SubsetDistribution d{m, k, {}};
  const auto sets = subsets_of_size(m, k);
  const Rational p(1, static_cast<long long>(sets.size()));
  for (const auto s : sets) {
    d.atoms.emplace_back(s, p);
  }
  return d;
}

struct LemmaCheck {
  unsigned m = 0;
  unsigned k = 0;
  unsigned ell = 0;
  Rational exact_best;     // max over |sigma| = ell of P(sigma meets S)
  std::uint32_t best_sigma = 0;
  Rational formula_bound;  // 1 - C(m-k, ell) / C(m, ell)
  double exp_bound = 0.0;  // 1 - exp(-ell k / m)

  [[nodiscard]] bool first_inequality_holds() const { return exact_best >= formula_bound; }
  [[nodiscard]] bool second_inequality_holds(double tol = 1e-12) const {
    return static_cast<double>(formula_bound) >= exp_bound - tol;
  }
};

/// Exhaustive check over every sigma of size ell, with exact rationals.
inline LemmaCheck lemma_min_prob(unsigned m, unsigned k, unsigned ell, const SubsetDistribution& dist) {
  if (m > kLemmaMaxM) {
    throw BudgetExceeded("subset enumeration limited to m <= " + std::to_string(kLemmaMaxM));
  }
  if (k > m || ell > m) {
    throw std::invalid_argument("lemma: need k <= m and ell <= m");
  }
  if (dist.m != m || dist.k != k) {
    throw std::invalid_argument("lemma: distribution does not match (m, k)");
  }
  Rational total = 0;
  for (const auto& [mask, p] : dist.atoms) {
    if (static_cast<unsigned>(std::popcount(mask)) != k || (mask >> m) != 0) {
      throw std::invalid_argument("lemma: atom is not a k-subset of [m]");
    }
    if (p < 0) {
      throw std::invalid_argument("lemma: negative probability");
    }
    total += p;
  }
  if (total != 1) {
    throw std::invalid_argument("lemma: distribution must sum to 1");
  }

  // Integer fast path: scale by the common denominator when it fits in 64 bits.
  BigInt common = 1;
  for (const auto& [mask, p] : dist.atoms) {
    const BigInt d = boost::multiprecision::denominator(p);
    common = common / boost::multiprecision::gcd(common, d) * d;
  }
  const bool fast = common <= BigInt(std::numeric_limits<std::int64_t>::max() / 2);
  std::vector<std::int64_t> scaled;
  if (fast) {
    for (const auto& [mask, p] : dist.atoms) {
      const BigInt v = boost::multiprecision::numerator(p) * (common / boost::multiprecision::denominator(p));
      scaled.push_back(static_cast<std::int64_t>(v));
    }
  }

  LemmaCheck out;
  out.m = m;
  out.k = k;
  out.ell = ell;
  out.exact_best = -1;
  for (const auto sigma : subsets_of_size(m, ell)) {
    Rational p;
    if (fast) {
      std::int64_t hit = 0;
      for (std::size_t i = 0; i < dist.atoms.size(); ++i) {
        if ((dist.atoms[i].first & sigma) != 0) {
          hit += scaled[i];
        }
      }
      p = Rational(BigInt(hit), common);
    } else {
      p = 0;
      for (const auto& [mask, q] : dist.atoms) {
        if ((mask & sigma) != 0) {
          p += q;
        }
      }
    }
    if (p > out.exact_best) {
      out.exact_best = p;
      out.best_sigma = sigma;
    }
  }
  out.formula_bound = Rational(1) - Rational(binomial(m - k, ell), binomial(m, ell));
  out.exp_bound = m == 0 ? 0.0
                         : 1.0 - std::exp(-static_cast<double>(ell) * static_cast<double>(k) /
                                          static_cast<double>(m));
  return out;
}

struct LemmaGridRow {
  LemmaCheck check;
  bool exact_equals_formula = false;
  bool first_ok = false;
  bool second_ok = false;
  bool second_applicable = false;  // ell <= m - k
};

/// Uniform-distribution grid over m in [1, max_m], k in [1, m], ell in [1, m].
inline std::vector<LemmaGridRow> lemma_grid(unsigned max_m, double tol = 1e-12) {
  if (max_m > kLemmaMaxM) {
    throw BudgetExceeded("subset enumeration limited to m <= " + std::to_string(kLemmaMaxM));
  }
  std::vector<LemmaGridRow> out;
  for (unsigned m = 1; m <= max_m; ++m) {
    for (unsigned k = 1; k <= m; ++k) {
      const auto dist = uniform_subsets(m, k);
      for (unsigned ell = 1; ell <= m; ++ell) {
        LemmaGridRow row;
        row.check = lemma_min_prob(m, k, ell, dist);
        row.exact_equals_formula = row.check.exact_best == row.check.formula_bound;
        row.first_ok = row.check.first_inequality_holds();
        row.second_applicable = ell <= m - k;
        row.second_ok = row.check.second_inequality_holds(tol);
        out.push_back(std::move(row));
      }
    }
  }
  return out;
}

inline std::string to_string(const Rational& r) { return r.str(); }

// ---------------------------------------------------------------------------
// Upper versus lower hardness

struct BoundGapRow {
  std::string functional;
  std::size_t k = 0;
  std::size_t j = 0;
  bool j_is_argmin = false;
  double upper = 0.0;
  double h_low = 0.0;           // NaN when k exceeds the eps-good count
  std::optional<double> ratio;  // upper / h_low; empty when h_low <= 0
  double floor_ratio = 0.0;     // upper / max(h_low, eps^-2)
  double envelope = 0.0;
  bool within_envelope = false;
};

/// Log-factor envelope for the upper/lower ratio: 64 reg_log(n / delta)
/// reg_log(reg_log(eps^-2)). The 64 undoes the constant of the lower bound.
inline double bound_gap_envelope(std::size_t n, double eps, double delta) {
  return 64.0 * reg_log(static_cast<double>(n) / delta) * reg_log(reg_log(1.0 / (eps * eps)));
}

inline std::vector<BoundGapRow> bound_gap_report(const BanditInstance& instance, double eps, double mu0,
                                                 const std::vector<std::size_t>& ks, double delta) {
  instance.validate();
  if (!(eps > 0.0)) {
    throw std::invalid_argument("bound_gap_report: eps must be positive");
  }
  const auto s = summarize(instance, eps, mu0);
  const double env = bound_gap_envelope(s.n(), eps, delta);
  const double floor = 1.0 / (eps * eps);
  std::vector<BoundGapRow> out;

  auto add = [&](const std::string& name, std::size_t k, std::size_t j, bool is_min, double upper) {
    BoundGapRow row;
    row.functional = name;
    row.k = k;
    row.j = j;
    row.j_is_argmin = is_min;
    row.upper = upper;
    row.h_low = std::numeric_limits<double>::quiet_NaN();
    double lo = 0.0;
    if (k >= 1 && k <= s.m_eps) {
      const LowBound lb = hardness_low(s, k);
      row.h_low = lb.raw;
      lo = lb.vacuous ? 0.0 : lb.raw;
      if (!lb.vacuous && lb.raw > 0.0) {
        row.ratio = upper / lb.raw;
      }
    }
    row.floor_ratio = upper / std::max(lo, floor);
    row.envelope = env;
    row.within_envelope = std::isfinite(row.floor_ratio) && row.floor_ratio <= env;
    out.push_back(std::move(row));
  };
  auto add_series = [&](const std::string& name, std::size_t k, const JSeries& js, std::size_t j_last) {
    add(name, k, js.argmin, true, js.min);
    if (j_last != js.argmin) {
      add(name, k, j_last, false, js.values[j_last - js.j_first]);
    }
  };

  if (s.m_eps >= 1) {
    const auto best = minimize_over_j(1, s.m_eps, [&](std::size_t j) { return hardness_best(s, j, delta); });
    add_series("h_best", 1, best, s.m_eps);
  }
  for (const std::size_t k : ks) {
    if (k < 1 || k > s.m_thr) {
      continue;
    }
    const auto fdr = minimize_over_j(k, s.m_thr, [&](std::size_t j) { return hardness_fdr(s, k, j, delta).h_fdr; });
    const auto fdr_t = minimize_over_j(k, s.m_thr, [&](std::size_t j) {
      return hardness_fdr(s, k, j, delta).h_fdr_tilde;
    });
    const auto fwer = minimize_over_j(k, s.m_thr, [&](std::size_t j) { return hardness_fwer(s, k, j, delta); });
    add_series("h_fdr", k, fdr, s.m_thr);
    add_series("h_fdr_tilde", k, fdr_t, s.m_thr);
    add_series("h_fwer", k, fwer, s.m_thr);
  }
  return out;
}

}  // namespace infucb

#endif  // INFUCB_VERIFY_HPP
