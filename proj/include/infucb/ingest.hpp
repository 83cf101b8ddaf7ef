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

#ifndef INFUCB_INGEST_HPP
#define INFUCB_INGEST_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "infucb/instance.hpp"
#include "infucb/random.hpp"

namespace infucb {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Splits on ',' or '\t' (whichever appears first in the line).
inline std::vector<std::string> split_fields(const std::string& line) {
  const char sep = line.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) {
    out.push_back(trim(field));
  }
  if (!line.empty() && line.back() == sep) {
    out.emplace_back();
  }
  return out;
}

inline double parse_real(const std::string& s, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

inline std::uint64_t parse_count(const std::string& s, std::size_t line_no) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad count '" + s + "'");
  }
  return std::stoull(s);
}

/// Calls row(fields, line_no) for every data line. Blank lines and lines
/// starting with '#' are skipped, as is a first line whose first field
/// equals `header_first`.
inline void for_each_row(std::istream& in, const std::string& header_first, std::size_t want_fields,
                         const std::function<void(const std::vector<std::string>&, std::size_t)>& row) {
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') {
      continue;
    }
    auto fields = split_fields(t);
    if (first) {
      first = false;
      if (!fields.empty() && fields[0] == header_first) {
        continue;
      }
    }
    if (fields.size() != want_fields) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(want_fields) + " fields, got " +
                               std::to_string(fields.size()));
    }
    row(fields, line_no);
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  return in;
}

}  // namespace detail

/// Caption votes: rows `id,positive,total` (comma or tab separated,
/// optional header `id,...`). Arm i is Bernoulli(positive / total).
inline BanditInstance load_caption_contest(std::istream& in, std::vector<std::string>* ids = nullptr) {
  BanditInstance inst;
  detail::for_each_row(in, "id", 3, [&](const std::vector<std::string>& f, std::size_t ln) {
    const std::uint64_t pos = detail::parse_count(f[1], ln);
    const std::uint64_t total = detail::parse_count(f[2], ln);
    if (total == 0) {
      throw std::runtime_error("line " + std::to_string(ln) + ": total votes must be at least 1");
    }
    if (pos > total) {
      throw std::runtime_error("line " + std::to_string(ln) + ": positive votes exceed total");
    }
    inst.arms.emplace_back(Bernoulli{static_cast<double>(pos) / static_cast<double>(total)});
    if (ids) {
      ids->push_back(f[0]);
    }
  });
  if (inst.arms.empty()) {
    throw std::runtime_error("caption file has no rows");
  }
  inst.label = "captions";
  return inst;
}

inline BanditInstance load_caption_contest(const std::string& path, std::vector<std::string>* ids = nullptr) {
  auto in = detail::open_input(path);
  return load_caption_contest(in, ids);
}

/// Screen replicates: rows `gene_id,z1,z2`. Returns the averaged scores
/// (z1 + z2) / 2, one per row.
inline std::vector<double> load_screen_scores(std::istream& in) {
  std::vector<double> out;
  detail::for_each_row(in, "gene_id", 3, [&](const std::vector<std::string>& f, std::size_t ln) {
    out.push_back(0.5 * (detail::parse_real(f[1], ln) + detail::parse_real(f[2], ln)));
  });
  if (out.empty()) {
    throw std::runtime_error("screen file has no rows");
  }
  return out;
}

inline std::vector<double> load_screen_scores(const std::string& path) {
  auto in = detail::open_input(path);
  return load_screen_scores(in);
}

// ---------------------------------------------------------------------------
// Mixing distribution fit

struct MixingDistribution {
  std::vector<double> grid;
  std::vector<double> weights;
  double lambda = 0.0;
  double nll = std::numeric_limits<double>::quiet_NaN();        // -(1/N) sum_i ln p(z_i)
  double objective = std::numeric_limits<double>::quiet_NaN();  // -nll + lambda * H(w)
  std::uint64_t iterations = 0;

  void validate() const {
    if (grid.empty() || grid.size() != weights.size()) {
      throw std::invalid_argument("mixture: grid and weights must be non-empty and aligned");
    }
    double sum = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (!std::isfinite(grid[g]) || (g > 0 && !(grid[g] > grid[g - 1]))) {
        throw std::invalid_argument("mixture: grid must be finite and strictly increasing");
      }
      if (!(weights[g] >= 0.0)) {
        throw std::invalid_argument("mixture: weights must be non-negative");
      }
      sum += weights[g];
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("mixture: weights must sum to 1");
    }
  }

  [[nodiscard]] double entropy() const {
    double h = 0.0;
    for (const double w : weights) {
      if (w > 0.0) {
        h -= w * std::log(w);
      }
    }
    return h;
  }
};

struct FitOptions {
  double grid_lo = -4.0;
  double grid_hi = 4.0;
  double grid_step = 0.01;
  double observation_variance = 0.5;
  double lambda = 1e-4;
  std::uint64_t iterations = 2000;
};

/// Points lo, lo + step, ..., hi. `step` must divide hi - lo.
inline std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("grid: need lo < hi and step > 0");
  }
  const double cells = (hi - lo) / step;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw std::invalid_argument("grid: step must divide the span");
  }
  const auto count = static_cast<std::size_t>(rounded) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = lo + static_cast<double>(i) * step;
  }
  return g;
}

namespace detail {

/// Solves e^y + y = c for y (Newton from the right, monotone).
inline double solve_exp_plus_id(double c) {
  double y = c >= 1.0 ? std::log(c) : c;
  for (int it = 0; it < 100; ++it) {
    const double ey = std::exp(y);
    const double step = (ey + y - c) / (ey + 1.0);
    y -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(y))) {
      break;
    }
  }
  return y;
}

/// w maximizing sum_g a_g ln w_g - lam sum_g w_g ln w_g over the simplex.
/// Stationarity gives a_g / w_g - lam (ln w_g + 1) = nu, solved per g for a
/// given nu; nu is then found so the weights sum to one (safeguarded Newton,
/// warm-started from the previous value of `nu`).
inline void entropic_m_step(const std::vector<double>& a, double lam, std::vector<double>& w, double& nu) {
  const std::size_t G = a.size();
  if (lam == 0.0) {
    w = a;
    return;
  }
  double slope = 0.0;
  auto excess_at = [&](double v) {
    double sum = 0.0;
    slope = 0.0;
    const double base = 1.0 + v / lam;
    for (std::size_t g = 0; g < G; ++g) {
      if (a[g] <= 0.0) {
        w[g] = std::exp(-base);
      } else {
        // w = a / (lam x) with x + ln x = ln(a / lam) + 1 + nu / lam.
        const double y = solve_exp_plus_id(std::log(a[g] / lam) + base);
        w[g] = a[g] / lam * std::exp(-y);
      }
      sum += w[g];
      slope -= w[g] * w[g] / (a[g] + lam * w[g]);
    }
    return sum - 1.0;
  };
  // The excess decreases in nu. Bracket the root around the warm start.
  double lo = nu - lam;
  double hi = nu + lam;
  for (double span = lam; excess_at(lo) < 0.0; span *= 2.0) {
    hi = lo;
    lo -= span;
  }
  for (double span = lam; excess_at(hi) > 0.0; span *= 2.0) {
    lo = hi;
    hi += span;
  }
  double v = std::clamp(nu, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double f = excess_at(v);
    if (std::abs(f) <= 1e-15) {
      break;
    }
    (f > 0.0 ? lo : hi) = v;
    double next = v - f / slope;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    if (next == v || hi - lo <= 1e-15 * std::max(1.0, std::abs(v))) {
      break;
    }
    v = next;
  }
  const double sum = excess_at(v) + 1.0;
  nu = v;
  for (auto& x : w) {
    x /= sum;
  }
}

}  // namespace detail

/// Grid maximum likelihood for the mixing law of z ~ N(mu, v), mu ~ w, with
/// entropy bonus lambda * H(w). Each iteration is an EM step whose M-step is
/// solved exactly for the penalized objective. `trace`, when given, receives
/// the objective after every iteration.
inline MixingDistribution fit_mixing_distribution(const std::vector<double>& z, const FitOptions& opt,
                                                  std::vector<double>* trace = nullptr) {
  if (z.empty()) {
    throw std::invalid_argument("fit: no scores");
  }
  for (const double v : z) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("fit: scores must be finite");
    }
  }
  if (!(opt.lambda >= 0.0) || !std::isfinite(opt.lambda)) {
    throw std::invalid_argument("fit: lambda must be finite and non-negative");
  }
  if (!(opt.observation_variance > 0.0)) {
    throw std::invalid_argument("fit: observation variance must be positive");
  }
  MixingDistribution mix;
  mix.grid = make_grid(opt.grid_lo, opt.grid_hi, opt.grid_step);
  mix.lambda = opt.lambda;
  const std::size_t G = mix.grid.size();
  const std::size_t N = z.size();

  // kernel[i*G + g] = phi(z_i; x_g, v) / max_g phi(z_i; x_g, v); row_log[i] holds the log of the max.
  const double inv2v = 1.0 / (2.0 * opt.observation_variance);
  const double log_norm = -0.5 * std::log(2.0 * 3.14159265358979323846 * opt.observation_variance);
  std::vector<double> kernel(N * G);
  std::vector<double> row_log(N);
  for (std::size_t i = 0; i < N; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < G; ++g) {
      const double d = z[i] - mix.grid[g];
      best = std::max(best, -d * d * inv2v);
    }
    row_log[i] = best + log_norm;
    for (std::size_t g = 0; g < G; ++g) {
      const double d = z[i] - mix.grid[g];
      kernel[i * G + g] = std::exp(-d * d * inv2v - best);
    }
  }

  std::vector<double> w(G, 1.0 / static_cast<double>(G));
  std::vector<double> a(G);
  std::vector<double> denom(N);
  auto mean_loglik = [&](const std::vector<double>& wt) {
    double ll = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      const double* k = &kernel[i * G];
      for (std::size_t g = 0; g < G; ++g) {
        s += wt[g] * k[g];
      }
      denom[i] = s;
      ll += std::log(s) + row_log[i];
    }
    return ll / static_cast<double>(N);
  };
  auto entropy = [](const std::vector<double>& wt) {
    double h = 0.0;
    for (const double x : wt) {
      if (x > 0.0) {
        h -= x * std::log(x);
      }
    }
    return h;
  };

  double ll = mean_loglik(w);
  double nu = 0.0;
  for (std::uint64_t it = 0; it < opt.iterations; ++it) {
    std::fill(a.begin(), a.end(), 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      const double inv = 1.0 / denom[i];
      const double* k = &kernel[i * G];
      for (std::size_t g = 0; g < G; ++g) {
        a[g] += k[g] * inv;
      }
    }
    for (std::size_t g = 0; g < G; ++g) {
      a[g] *= w[g] / static_cast<double>(N);
    }
    detail::entropic_m_step(a, opt.lambda, w, nu);
    ll = mean_loglik(w);
    if (trace) {
      trace->push_back(ll + opt.lambda * entropy(w));
    }
  }
  mix.weights = std::move(w);
  mix.nll = -ll;
  mix.objective = ll + opt.lambda * mix.entropy();
  mix.iterations = opt.iterations;
  return mix;
}

/// n arms Gaussian(mu_i, 1) with mu_i drawn i.i.d. from the mixture.
inline BanditInstance synth_from_mixture(const MixingDistribution& mix, std::size_t n, Rng& rng) {
  mix.validate();
  std::vector<double> cdf(mix.weights.size());
  double acc = 0.0;
  for (std::size_t g = 0; g < cdf.size(); ++g) {
    acc += mix.weights[g];
    cdf[g] = acc;
  }
  BanditInstance inst;
  inst.arms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform01() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t g = static_cast<std::size_t>(it - cdf.begin());
    g = std::min(g, cdf.size() - 1);
    while (mix.weights[g] == 0.0) {
      --g;  // only reachable at the top clamp; some earlier weight is positive
    }
    inst.arms.emplace_back(Gaussian{mix.grid[g], 1.0});
  }
  inst.label = "mixture(n=" + std::to_string(n) + ")";
  return inst;
}

}  // namespace infucb

#endif  // INFUCB_INGEST_HPP
