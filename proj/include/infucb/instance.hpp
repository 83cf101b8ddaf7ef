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

#ifndef INFUCB_INSTANCE_HPP
#define INFUCB_INSTANCE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "infucb/random.hpp"

namespace infucb {

using ArmId = std::uint32_t;
inline constexpr ArmId kNoArm = static_cast<ArmId>(-1);

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

struct Bernoulli {
  double p = 0.5;
  friend bool operator==(const Bernoulli&, const Bernoulli&) = default;
};

using ArmDistribution = std::variant<Gaussian, Bernoulli>;

inline double mean_of(const ArmDistribution& arm) {
  return std::visit(
      [](const auto& d) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, Gaussian>) {
          return d.mean;
        } else {
          return d.p;
        }
      },
      arm);
}

/// Sub-Gaussian variance proxy of an arm: its variance for Gaussians, 1/4 for
/// Bernoulli (Hoeffding).
inline double sub_gaussian_proxy(const ArmDistribution& arm) {
  if (const auto* g = std::get_if<Gaussian>(&arm)) {
    return g->variance;
  }
  return 0.25;
}

enum class ArmKind { gaussian, bernoulli };

/// Ground truth for one bandit problem.
struct BanditInstance {
  std::vector<ArmDistribution> arms;
  std::optional<double> threshold_mu0;
  std::optional<double> epsilon;
  std::string label;

  [[nodiscard]] std::size_t size() const { return arms.size(); }

  [[nodiscard]] std::vector<double> means() const {
    std::vector<double> out;
    out.reserve(arms.size());
    for (const auto& a : arms) {
      out.push_back(mean_of(a));
    }
    return out;
  }

  [[nodiscard]] double best_mean() const {
    const auto m = means();
    return *std::max_element(m.begin(), m.end());
  }

  [[nodiscard]] double max_sub_gaussian_proxy() const {
    double v = 0.0;
    for (const auto& a : arms) {
      v = std::max(v, sub_gaussian_proxy(a));
    }
    return v;
  }

  void validate() const {
    if (arms.empty()) {
      throw std::invalid_argument("instance must have at least one arm");
    }
    if (arms.size() >= kNoArm) {
      throw std::invalid_argument("instance has too many arms");
    }
    for (const auto& a : arms) {
      if (const auto* g = std::get_if<Gaussian>(&a)) {
        if (!std::isfinite(g->mean) || !(g->variance > 0.0) || !std::isfinite(g->variance)) {
          throw std::invalid_argument("Gaussian arm needs a finite mean and positive variance");
        }
      } else {
        const double p = std::get<Bernoulli>(a).p;
        if (!(p >= 0.0 && p <= 1.0)) {
          throw std::invalid_argument("Bernoulli arm needs p in [0, 1]");
        }
      }
    }
    if (epsilon && !(*epsilon > 0.0)) {
      throw std::invalid_argument("epsilon must be positive");
    }
    if (threshold_mu0 && !std::isfinite(*threshold_mu0)) {
      throw std::invalid_argument("mu0 must be finite");
    }
  }

  friend bool operator==(const BanditInstance&, const BanditInstance&) = default;
};

/// One draw from arm `arm`.
inline double sample_arm(const BanditInstance& instance, std::size_t arm, Rng& rng) {
  if (arm >= instance.size()) {
    throw std::out_of_range("sample_arm: arm index out of range");
  }
  const auto& d = instance.arms[arm];
  if (const auto* g = std::get_if<Gaussian>(&d)) {
    return g->mean + std::sqrt(g->variance) * rng.normal();
  }
  return rng.bernoulli(std::get<Bernoulli>(d).p) ? 1.0 : 0.0;
}

/// Flattened reward source used in simulation loops: one Rng, arm parameters
/// unpacked into contiguous arrays.
class ArmSampler {
 public:
  ArmSampler(const BanditInstance& instance, std::uint64_t seed) : rng_(seed) {
    instance.validate();
    const std::size_t n = instance.size();
    loc_.resize(n);
    scale_.resize(n);
    bernoulli_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& d = instance.arms[i];
      if (const auto* g = std::get_if<Gaussian>(&d)) {
        loc_[i] = g->mean;
        scale_[i] = std::sqrt(g->variance);
        bernoulli_[i] = 0;
      } else {
        loc_[i] = std::get<Bernoulli>(d).p;
        bernoulli_[i] = 1;
      }
    }
  }

  double operator()(ArmId arm) {
    if (bernoulli_[arm] != 0) {
      return rng_.uniform01() < loc_[arm] ? 1.0 : 0.0;
    }
    return loc_[arm] + scale_[arm] * rng_.normal();
  }

 private:
  Rng rng_;
  std::vector<double> loc_;
  std::vector<double> scale_;
  std::vector<std::uint8_t> bernoulli_;
};

/// m arms at mu0 + eps and n - m arms at mu0, the good arms placed at random
/// positions drawn from `seed`. Gaussian arms have unit variance.
inline BanditInstance two_spike(std::size_t n, std::size_t m, double mu0, double eps, ArmKind kind,
                                std::uint64_t seed = 0) {
  if (m < 1 || m > n) {
    throw std::invalid_argument("two_spike: need 1 <= m <= n");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("two_spike: eps must be positive");
  }
  if (kind == ArmKind::bernoulli && (mu0 < 0.0 || mu0 + eps > 1.0)) {
    throw std::invalid_argument("two_spike: Bernoulli means must stay in [0, 1]");
  }
  Rng rng(seed);
  std::vector<std::uint32_t> scratch;
  const auto good = rng.sample_without_replacement(static_cast<std::uint32_t>(n),
                                                   static_cast<std::uint32_t>(m), scratch);
  std::vector<double> means(n, mu0);
  for (const auto i : good) {
    means[i] = mu0 + eps;
  }
  BanditInstance inst;
  inst.arms.reserve(n);
  for (const double mu : means) {
    if (kind == ArmKind::gaussian) {
      inst.arms.emplace_back(Gaussian{mu, 1.0});
    } else {
      inst.arms.emplace_back(Bernoulli{mu});
    }
  }
  inst.threshold_mu0 = mu0;
  inst.epsilon = eps;
  inst.label = "two_spike(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")";
  return inst;
}

inline BanditInstance gaussian_instance(const std::vector<double>& means, double variance = 1.0) {
  BanditInstance inst;
  for (const double mu : means) {
    inst.arms.emplace_back(Gaussian{mu, variance});
  }
  return inst;
}

/// Sorted view of an instance plus the counts m (epsilon-good arms) and
/// |H_1| (arms strictly above mu0). Ranks are 1-based as in the formulas.
struct InstanceSummary {
  std::vector<double> sorted_means;            // non-increasing
  std::vector<std::size_t> sort_permutation;   // original index -> rank - 1
  std::vector<std::size_t> rank_to_arm;        // rank - 1 -> original index
  std::optional<double> eps;
  std::optional<double> mu0;
  std::size_t m_eps = 0;
  std::size_t m_thr = 0;

  [[nodiscard]] std::size_t n() const { return sorted_means.size(); }
  [[nodiscard]] double mu(std::size_t rank) const { return sorted_means.at(rank - 1); }
  /// Delta_{i,j} = mu_i - mu_j.
  [[nodiscard]] double gap(std::size_t i, std::size_t j) const { return mu(i) - mu(j); }
  /// Delta_{j,0} = mu_j - mu0.
  [[nodiscard]] double gap0(std::size_t j) const {
    if (!mu0) {
      throw std::logic_error("InstanceSummary: mu0 not set");
    }
    return mu(j) - *mu0;
  }
};

inline InstanceSummary summarize(const BanditInstance& instance, std::optional<double> eps,
                                 std::optional<double> mu0) {
  if (!eps && !mu0) {
    throw std::invalid_argument("summarize: provide eps and/or mu0");
  }
  if (eps && !(*eps > 0.0)) {
    throw std::invalid_argument("summarize: eps must be positive");
  }
  const auto means = instance.means();
  InstanceSummary s;
  s.eps = eps;
  s.mu0 = mu0;
  s.rank_to_arm.resize(means.size());
  std::iota(s.rank_to_arm.begin(), s.rank_to_arm.end(), std::size_t{0});
  std::stable_sort(s.rank_to_arm.begin(), s.rank_to_arm.end(),
                   [&](std::size_t a, std::size_t b) { return means[a] > means[b]; });
  s.sort_permutation.resize(means.size());
  s.sorted_means.reserve(means.size());
  for (std::size_t r = 0; r < s.rank_to_arm.size(); ++r) {
    s.sort_permutation[s.rank_to_arm[r]] = r;
    s.sorted_means.push_back(means[s.rank_to_arm[r]]);
  }
  if (eps) {
    const double cut = s.sorted_means.front() - *eps;
    s.m_eps = static_cast<std::size_t>(
        std::count_if(means.begin(), means.end(), [&](double mu) { return mu > cut; }));
  }
  if (mu0) {
    s.m_thr = static_cast<std::size_t>(
        std::count_if(means.begin(), means.end(), [&](double mu) { return mu > *mu0; }));
  }
  return s;
}

}  // namespace infucb

#endif  // INFUCB_INSTANCE_HPP
