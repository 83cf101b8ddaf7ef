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

#ifndef INFUCB_HARDNESS_HPP
#define INFUCB_HARDNESS_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "infucb/confidence.hpp"
#include "infucb/instance.hpp"

// Sample-complexity functionals of an instance. All are functions of the
// sorted means only; every logarithm is reg_log. Ranks i, j are 1-based.

namespace infucb {

namespace detail {
inline double inv_sq(double gap) {
  return gap == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (gap * gap);
}

inline std::size_t require_m_eps(const InstanceSummary& s) {
  if (!s.eps) {
    throw std::invalid_argument("hardness: summary was built without eps");
  }
  return s.m_eps;
}

inline std::size_t require_m_thr(const InstanceSummary& s) {
  if (!s.mu0) {
    throw std::invalid_argument("hardness: summary was built without mu0");
  }
  return s.m_thr;
}

inline void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("hardness: delta must lie in (0, 1)");
  }
}
}  // namespace detail

/// Lower-bound functional for identifying any k of the m epsilon-good arms.
struct LowBound {
  double raw = 0.0;
  double clamped = 0.0;
  bool vacuous = false;  // m == n: no arm outside the top group
};

inline LowBound hardness_low(const InstanceSummary& s, std::size_t k) {
  const std::size_t m = detail::require_m_eps(s);
  const std::size_t n = s.n();
  if (k < 1 || k > m) {
    throw std::invalid_argument("hardness_low: need 1 <= k <= m");
  }
  if (m == n) {
    return {0.0, 0.0, true};
  }
  double tail = 0.0;
  for (std::size_t i = m + 1; i <= n; ++i) {
    tail += detail::inv_sq(s.gap(1, i));
  }
  const double raw = (-detail::inv_sq(s.gap(1, m + 1)) +
                      static_cast<double>(k) / static_cast<double>(m) * tail) /
                     64.0;
  return {raw, std::max(raw, 0.0), false};
}

/// Upper-bound functional for epsilon-good identification when a bracket of
/// size about n/j is used. Returns 0 when every arm is epsilon-good.
inline double hardness_best(const InstanceSummary& s, std::size_t j, double delta) {
  const std::size_t m = detail::require_m_eps(s);
  const std::size_t n = s.n();
  detail::require_delta(delta);
  if (j < 1 || j > m) {
    throw std::invalid_argument("hardness_best: need 1 <= j <= m");
  }
  if (m == n) {
    return 0.0;
  }
  double top = 0.0;
  for (std::size_t i = 1; i <= j; ++i) {
    top += detail::inv_sq(s.gap(i, m + 1));
  }
  for (std::size_t i = j + 1; i <= m; ++i) {
    top += detail::inv_sq(std::max(s.gap(j, i), s.gap(i, m + 1)));
  }
  double bottom = 0.0;
  for (std::size_t i = m + 1; i <= n; ++i) {
    bottom += detail::inv_sq(s.gap(j, i));
  }
  const double jd = static_cast<double>(j);
  return (top * reg_log(static_cast<double>(n) / (jd * delta)) + bottom * reg_log(1.0 / delta)) /
         jd;
}

struct FdrHardness {
  double h_fdr = 0.0;
  double h_fdr_tilde = 0.0;
};

inline void check_fdr_indices(const InstanceSummary& s, std::size_t k, std::size_t j) {
  const std::size_t m = detail::require_m_thr(s);
  if (k < 1 || k > j || j > m) {
    throw std::invalid_argument("FDR/FWER hardness: need 1 <= k <= j <= |H_1|");
  }
}

inline FdrHardness hardness_fdr(const InstanceSummary& s, std::size_t k, std::size_t j, double delta) {
  check_fdr_indices(s, k, j);
  detail::require_delta(delta);
  const std::size_t m = s.m_thr;
  const std::size_t n = s.n();
  double top = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    top += detail::inv_sq(s.gap0(std::max(i, j)));
  }
  double bottom = 0.0;
  for (std::size_t i = m + 1; i <= n; ++i) {
    bottom += detail::inv_sq(s.gap(j, i));
  }
  const double kd = static_cast<double>(k);
  const double jd = static_cast<double>(j);
  const double nd = static_cast<double>(n);
  FdrHardness out;
  out.h_fdr = kd / jd *
              (top * reg_log(nd * kd / (jd * delta)) + bottom * reg_log(1.0 / delta));
  out.h_fdr_tilde = nd / jd * kd * detail::inv_sq(s.gap0(j)) * reg_log(1.0 / delta);
  return out;
}

/// FDR functional with the doubly-logarithmic factors kept.
inline double hardness_fwer(const InstanceSummary& s, std::size_t k, std::size_t j, double delta) {
  check_fdr_indices(s, k, j);
  detail::require_delta(delta);
  const std::size_t m = s.m_thr;
  const std::size_t n = s.n();
  const double kd = static_cast<double>(k);
  const double jd = static_cast<double>(j);
  const double base = static_cast<double>(n) * kd / (jd * delta);
  double top = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    const double w = detail::inv_sq(s.gap0(std::max(i, j)));
    top += w * reg_log(base * reg_log(w));
  }
  double bottom = 0.0;
  for (std::size_t i = m + 1; i <= n; ++i) {
    const double w = detail::inv_sq(s.gap(j, i));
    bottom += w * reg_log(reg_log(w) / delta);
  }
  return kd / jd * (top + bottom);
}

/// Lower bounds on the verifiable (PAC) sample complexity for k = 1 and k = m.
struct PacBounds {
  double k1 = 0.0;
  double km = 0.0;
  bool km_vacuous = false;  // m == n
};

inline PacBounds hardness_pac(const InstanceSummary& s, double delta) {
  const std::size_t m = detail::require_m_eps(s);
  const std::size_t n = s.n();
  if (!(delta > 0.0 && delta < 1.0 / 2.4)) {
    throw std::invalid_argument("hardness_pac: need 0 < delta < 1/2.4");
  }
  const double eps = *s.eps;
  const double lg = reg_log(1.0 / (2.4 * delta));
  PacBounds out;
  double tail = 0.0;
  for (std::size_t i = m + 1; i <= n; ++i) {
    tail += detail::inv_sq(s.gap(1, i));
  }
  out.k1 = 0.5 * lg * (static_cast<double>(m - 1) / (eps * eps) + tail);
  if (m == n) {
    out.km_vacuous = true;
    return out;
  }
  double a = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    a += detail::inv_sq(s.gap(i, m + 1));
  }
  double b = 0.0;
  for (std::size_t i = m + 1; i <= n; ++i) {
    b += detail::inv_sq(s.gap(m, i));
  }
  out.km = 2.0 * lg * (a + b);
  return out;
}

/// Gap-independent functional for the FWER-FWPD variant, with
/// Delta = min over H_1 of mu_i - mu0.
inline double hardness_v_tilde(const InstanceSummary& s, std::size_t k, double delta) {
  const std::size_t m = detail::require_m_thr(s);
  detail::require_delta(delta);
  if (k < 1 || k > m) {
    throw std::invalid_argument("hardness_v_tilde: need 1 <= k <= |H_1|");
  }
  const double kd = static_cast<double>(k);
  const double size = static_cast<double>(s.n()) / static_cast<double>(m) * kd;
  const double w = detail::inv_sq(s.gap0(m));
  const double loglog = reg_log(reg_log(size / delta));
  const double common = reg_log(w) * reg_log(size) / delta;
  const double first = (size - kd) * w * reg_log(std::max(kd, loglog) * common);
  const double rest = size - (1.0 - 2.0 * delta * (1.0 + 4.0 * delta)) * kd;
  const double second = kd * reg_log(std::max(rest, loglog) * common);
  return first + second;
}

/// A functional evaluated over its admissible j range, with the minimizer.
struct JSeries {
  std::size_t j_first = 1;
  std::vector<double> values;  // values[j - j_first]
  std::size_t argmin = 0;
  double min = 0.0;
};

template <class F>
JSeries minimize_over_j(std::size_t j_first, std::size_t j_last, F&& value) {
  JSeries out;
  out.j_first = j_first;
  out.min = std::numeric_limits<double>::infinity();
  for (std::size_t j = j_first; j <= j_last; ++j) {
    const double v = value(j);
    out.values.push_back(v);
    if (v < out.min) {
      out.min = v;
      out.argmin = j;
    }
  }
  return out;
}

struct HardnessParams {
  double eps = 0.5;
  std::optional<double> mu0;
  std::vector<std::size_t> ks{1};
  double delta = 0.05;
};

struct FdrFamily {
  std::size_t k = 1;
  JSeries h_fdr;
  JSeries h_fdr_tilde;
  JSeries h_fwer;
  double v_tilde = 0.0;
};

/// Every functional of the calculator evaluated on one instance.
struct HardnessReport {
  HardnessParams params;
  std::size_t n = 0;
  std::size_t m_eps = 0;
  std::size_t m_thr = 0;
  std::vector<LowBound> h_low;  // h_low[k - 1], k = 1..m_eps
  JSeries h_best;               // j = 1..m_eps
  PacBounds pac;
  bool pac_defined = false;
  std::vector<FdrFamily> fdr;   // one per requested k <= |H_1|
  std::vector<std::string> delta_warnings;
};

inline std::vector<std::string> delta_range_warnings(double delta) {
  std::vector<std::string> out;
  if (!(delta < 1.0 / 16.0)) {
    out.emplace_back("lower bound for k-of-m identification stated for delta < 1/16");
  }
  if (!(delta <= 0.025)) {
    out.emplace_back("upper bounds for epsilon-good / FDR / FWER stated for delta <= 0.025");
  }
  if (!(delta < 1.0 / 40.0)) {
    out.emplace_back("best-of-both guarantee stated for delta < 1/40");
  }
  if (!(delta < 1.0 / 600.0)) {
    out.emplace_back("FWER-FWPD guarantee stated for delta < 1/600");
  }
  if (!(delta < 1.0 / 2.4)) {
    out.emplace_back("PAC lower bounds stated for delta < 1/2.4");
  }
  return out;
}

inline HardnessReport hardness_report(const BanditInstance& instance, const HardnessParams& params) {
  instance.validate();
  detail::require_delta(params.delta);
  HardnessReport rep;
  rep.params = params;
  const auto s = summarize(instance, params.eps, params.mu0);
  rep.n = s.n();
  rep.m_eps = s.m_eps;
  rep.m_thr = s.m_thr;
  for (std::size_t k = 1; k <= s.m_eps; ++k) {
    rep.h_low.push_back(hardness_low(s, k));
  }
  rep.h_best = minimize_over_j(1, s.m_eps, [&](std::size_t j) { return hardness_best(s, j, params.delta); });
  if (params.delta < 1.0 / 2.4) {
    rep.pac = hardness_pac(s, params.delta);
    rep.pac_defined = true;
  }
  if (params.mu0 && s.m_thr > 0) {
    for (const std::size_t k : params.ks) {
      if (k < 1 || k > s.m_thr) {
        continue;
      }
      FdrFamily fam;
      fam.k = k;
      fam.h_fdr = minimize_over_j(k, s.m_thr, [&](std::size_t j) {
        return hardness_fdr(s, k, j, params.delta).h_fdr;
      });
      fam.h_fdr_tilde = minimize_over_j(k, s.m_thr, [&](std::size_t j) {
        return hardness_fdr(s, k, j, params.delta).h_fdr_tilde;
      });
      fam.h_fwer = minimize_over_j(k, s.m_thr, [&](std::size_t j) {
        return hardness_fwer(s, k, j, params.delta);
      });
      fam.v_tilde = hardness_v_tilde(s, k, params.delta);
      rep.fdr.push_back(std::move(fam));
    }
  }
  rep.delta_warnings = delta_range_warnings(params.delta);
  return rep;
}

}  // namespace infucb

#endif  // INFUCB_HARDNESS_HPP
