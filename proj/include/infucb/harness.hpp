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

#ifndef INFUCB_HARNESS_HPP
#define INFUCB_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "infucb/engine.hpp"
#include "infucb/instance.hpp"
#include "infucb/lucb.hpp"
#include "infucb/random.hpp"
#include "infucb/trace.hpp"

namespace infucb {

enum class Algorithm : std::uint8_t { infinite_ucb, uniform_bh, lucb, bob };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::infinite_ucb: return "infinite_ucb";
    case Algorithm::uniform_bh: return "uniform_bh";
    case Algorithm::lucb: return "lucb";
    case Algorithm::bob: return "bob";
  }
  return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "infinite_ucb") return Algorithm::infinite_ucb;
  if (s == "uniform_bh") return Algorithm::uniform_bh;
  if (s == "lucb") return Algorithm::lucb;
  if (s == "bob") return Algorithm::bob;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

/// Geometric checkpoint grid {1, 2, 4, ...} capped by and including `horizon`.
inline std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t horizon) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t c = 1; c < horizon; c *= 2) {
    out.push_back(c);
  }
  if (horizon > 0) {
    out.push_back(horizon);
  }
  return out;
}

struct RunConfig {
  Algorithm algorithm = Algorithm::infinite_ucb;
  std::uint64_t seed = 0;
  std::uint64_t horizon = 1000;  // rounds
  EngineConfig engine;
  /// Epsilon for tau_simple and for the LUCB / best-of-both stoppers.
  double epsilon = 0.5;
  std::vector<std::uint32_t> ks{1};
  std::vector<std::uint64_t> checkpoints;  // empty = geometric grid
  bool record_pulls = false;
  /// LUCB radius variance; empty = taken from the instance.
  std::optional<double> lucb_variance;

  void validate() const {
    if (horizon == 0) {
      throw std::invalid_argument("run: horizon must be at least 1");
    }
    if (!(epsilon >= 0.0)) {
      throw std::invalid_argument("run: epsilon must be non-negative");
    }
    engine.validate();
    if ((algorithm == Algorithm::bob || algorithm == Algorithm::lucb) &&
        engine.objective != Objective::best_arm) {
      throw std::invalid_argument("run: lucb and bob need the best_arm objective");
    }
    if (algorithm == Algorithm::uniform_bh && !is_threshold_objective(engine.objective)) {
      throw std::invalid_argument("run: uniform_bh needs a threshold objective");
    }
    for (const auto k : ks) {
      if (k == 0) {
        throw std::invalid_argument("run: k must be at least 1");
      }
    }
  }

  [[nodiscard]] std::vector<std::uint64_t> checkpoint_grid() const {
    if (checkpoints.empty()) {
      return geometric_checkpoints(horizon);
    }
    std::vector<std::uint64_t> c = checkpoints;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    c.erase(std::remove_if(c.begin(), c.end(), [&](auto x) { return x == 0 || x > horizon; }), c.end());
    return c;
  }
};

/// Seeds of the independent random streams of one trial.
struct StreamSeeds {
  std::uint64_t engine;         // bracket subsampling
  std::uint64_t engine_reward;  // rewards fed to the engine
  std::uint64_t lucb_reward;    // rewards fed to LUCB

  static StreamSeeds from(std::uint64_t seed) {
    return {derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3)};
  }
};

struct OutputChange {
  std::uint64_t t = 0;
  ArmId arm = kNoArm;
  friend bool operator==(const OutputChange&, const OutputChange&) = default;
};

struct RunTrace {
  Algorithm algorithm = Algorithm::infinite_ucb;
  std::uint64_t rounds = 0;
  std::uint64_t total_pulls = 0;
  std::vector<PullRecord> pulls;  // filled only with record_pulls
  /// Run-length encoding of the per-round output: O_t equals the arm of the
  /// last change with change.t <= t.
  std::vector<OutputChange> outputs;
  std::vector<RecommendationEvent> events;
  /// LUCB: pulls until its certificate (tau_PAC). BoB: round of termination.
  std::optional<std::uint64_t> stop_pulls;
  std::optional<std::uint64_t> stop_round;
  std::optional<ArmId> final_arm;
  std::uint64_t hash = 0;

  [[nodiscard]] ArmId output_at(std::uint64_t t) const {
    auto it = std::upper_bound(outputs.begin(), outputs.end(), t,
                               [](std::uint64_t v, const OutputChange& c) { return v < c.t; });
    return it == outputs.begin() ? kNoArm : std::prev(it)->arm;
  }
};

namespace detail {

struct TraceBuilder {
  RunTrace& trace;
  bool record;
  TraceHasher hasher;
  ArmId last_output = kNoArm;
  bool any_output = false;

  void pull(const PullRecord& p) {
    hasher.add(p);
    if (!p.idle()) {
      ++trace.total_pulls;
    }
    if (p.secondary) {
      ++trace.total_pulls;
    }
    if (record) {
      trace.pulls.push_back(p);
    }
  }
  void event(const RecommendationEvent& e) {
    hasher.add(e);
    trace.events.push_back(e);
  }
  void output(std::uint64_t t, ArmId a) {
    if (!any_output || a != last_output) {
      any_output = true;
      last_output = a;
      hasher.add_output(t, a);
      trace.outputs.push_back({t, a});
    }
  }
};

inline LucbConfig lucb_config_for(const BanditInstance& inst, const RunConfig& cfg) {
  LucbConfig c;
  c.delta = cfg.engine.delta;
  c.epsilon = cfg.epsilon;
  c.variance_proxy = cfg.lucb_variance.value_or(inst.max_sub_gaussian_proxy());
  return c;
}

}  // namespace detail

/// Drives one algorithm on one instance for `horizon` rounds (LUCB and the
/// best-of-both combiner stop earlier once they certify an arm).
inline RunTrace run(const BanditInstance& instance, const RunConfig& config) {
  config.validate();
  instance.validate();
  const std::size_t n = instance.size();
  const StreamSeeds seeds = StreamSeeds::from(config.seed);
  RunTrace trace;
  trace.algorithm = config.algorithm;
  detail::TraceBuilder tb{trace, config.record_pulls, {}, kNoArm, false};

  switch (config.algorithm) {
    case Algorithm::infinite_ucb:
    case Algorithm::uniform_bh: {
      EngineConfig ec = config.engine;
      if (config.algorithm == Algorithm::uniform_bh) {
        ec.single_bracket = true;
        ec.prune_brackets = false;
        ec.cost_select = false;
      }
      Engine engine(n, ec, seeds.engine);
      ArmSampler env(instance, seeds.engine_reward);
      const bool best = ec.objective == Objective::best_arm;
      for (std::uint64_t t = 1; t <= config.horizon; ++t) {
        const RoundResult& res = engine.step(env);
        tb.pull(res.pull);
        for (const auto& e : res.events) {
          tb.event(e);
        }
        if (best) {
          tb.output(t, res.output);
        }
        trace.rounds = t;
      }
      if (best) {
        trace.final_arm = engine.output();
      }
      break;
    }
    case Algorithm::lucb: {
      LucbState lucb(n, detail::lucb_config_for(instance, config));
      ArmSampler env(instance, seeds.lucb_reward);
      for (std::uint64_t t = 1; t <= config.horizon; ++t) {
        for (const auto& p : lucb_round(lucb, env)) {
          tb.pull(p);
        }
        tb.output(t, lucb.stopped ? *lucb.certified_arm : lucb.empirical_best());
        trace.rounds = t;
        if (lucb.stopped) {
          trace.stop_pulls = lucb.total_pulls;
          trace.stop_round = t;
          trace.final_arm = lucb.certified_arm;
          break;
        }
      }
      if (!trace.final_arm) {
        trace.final_arm = lucb.empirical_best();
      }
      break;
    }
    case Algorithm::bob: {
      BestOfBoth bob(n, config.engine, seeds.engine, detail::lucb_config_for(instance, config));
      ArmSampler engine_env(instance, seeds.engine_reward);
      ArmSampler lucb_env(instance, seeds.lucb_reward);
      for (std::uint64_t t = 1; t <= config.horizon; ++t) {
        const BobStep st = bob.step(engine_env, lucb_env);
        for (const auto& p : st.pulls) {
          tb.pull(p);
        }
        for (const auto& e : st.events) {
          tb.event(e);
        }
        tb.output(t, st.output);
        trace.rounds = t;
        if (st.terminated_now) {
          trace.stop_round = t;
          trace.stop_pulls = trace.total_pulls;
          trace.final_arm = st.output;
          break;
        }
      }
      if (!trace.final_arm) {
        trace.final_arm = bob.engine().output();
      }
      break;
    }
  }
  tb.hasher.add_u64(trace.rounds);
  trace.hash = tb.hasher.value();
  return trace;
}

/// Single-bracket baseline: the engine pinned to one bracket of all n arms.
inline RunTrace baseline_uniform_bh(const BanditInstance& instance, RunConfig config) {
  config.algorithm = Algorithm::uniform_bh;
  return run(instance, config);
}

// ---------------------------------------------------------------------------
// Metrics

/// Round index, or nullopt when right-censored at the horizon.
using TauValue = std::optional<std::uint64_t>;

/// 1 + the last round whose output is not eps-good, 0 if there is none;
/// nullopt when the final output is not eps-good. An output is eps-good when
/// its mean exceeds mu_1 - eps; kNoArm counts as not eps-good.
inline TauValue tau_simple(const RunTrace& trace, const BanditInstance& instance, double eps) {
  const double cut = instance.best_mean() - eps;
  auto good = [&](ArmId a) { return a != kNoArm && mean_of(instance.arms[a]) > cut; };
  if (trace.outputs.empty()) {
    return trace.rounds == 0 ? TauValue{0} : TauValue{};
  }
  if (!good(trace.outputs.back().arm)) {
    return std::nullopt;
  }
  // Rounds before the first change output nothing, which counts as bad.
  std::uint64_t last_bad = trace.outputs.front().t - 1;
  for (std::size_t i = 0; i + 1 < trace.outputs.size(); ++i) {
    if (!good(trace.outputs[i].arm)) {
      last_bad = trace.outputs[i + 1].t - 1;
    }
  }
  return last_bad == 0 ? 0 : last_bad + 1;
}

/// The event kind whose accumulated arms form the accepted set of an objective.
inline EventKind accept_kind(Objective obj) {
  switch (obj) {
    case Objective::fdr_tpr: return EventKind::fdr_accept;
    case Objective::fwer_tpr: return EventKind::fwer_accept;
    case Objective::fwer_fwpd: return EventKind::fwpd_accept;
    case Objective::best_arm: break;
  }
  throw std::invalid_argument("accept_kind: best_arm has no accepted set");
}

struct CheckpointMetrics {
  std::uint64_t t = 0;
  std::uint64_t accepted = 0;
  std::uint64_t true_pos = 0;
  std::uint64_t false_pos = 0;
  [[nodiscard]] double fdp() const {
    return static_cast<double>(false_pos) / static_cast<double>(std::max<std::uint64_t>(accepted, 1));
  }
};

struct DiscoveryMetrics {
  std::vector<CheckpointMetrics> series;
  std::vector<std::uint32_t> ks;
  std::vector<TauValue> tau_k;  // parallel to ks
  std::uint64_t final_true = 0;
  std::uint64_t final_false = 0;
  std::optional<std::uint64_t> first_false_round;
};

/// FDP and true-positive counts of the accepted set at each checkpoint, and
/// tau_k = first round after which k arms of H_1 = {i : mu_i > mu0} are held.
inline DiscoveryMetrics discovery_metrics(const RunTrace& trace, const BanditInstance& instance,
                                          double mu0, EventKind kind,
                                          const std::vector<std::uint64_t>& checkpoints,
                                          const std::vector<std::uint32_t>& ks) {
  DiscoveryMetrics out;
  out.ks = ks;
  out.tau_k.assign(ks.size(), std::nullopt);
  std::vector<std::uint64_t> cps = checkpoints;
  std::sort(cps.begin(), cps.end());
  std::vector<char> held(instance.size(), 0);
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::size_t ci = 0;
  auto flush_until = [&](std::uint64_t t_exclusive) {
    while (ci < cps.size() && cps[ci] < t_exclusive) {
      out.series.push_back({cps[ci], tp + fp, tp, fp});
      ++ci;
    }
  };
  for (const auto& e : trace.events) {
    if (e.kind != kind) {
      continue;
    }
    flush_until(e.t);
    for (const ArmId a : e.arm_ids) {
      if (held[a]) {
        continue;
      }
      held[a] = 1;
      if (mean_of(instance.arms[a]) > mu0) {
        ++tp;
      } else {
        ++fp;
        if (!out.first_false_round) {
          out.first_false_round = e.t;
        }
      }
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (!out.tau_k[i] && tp >= ks[i]) {
        out.tau_k[i] = e.t;
      }
    }
  }
  flush_until(std::numeric_limits<std::uint64_t>::max());
  out.final_true = tp;
  out.final_false = fp;
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

struct Aggregate {
  std::size_t count = 0;     // uncensored values
  std::size_t censored = 0;  // right-censored values
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
  [[nodiscard]] bool defined() const { return count > 0; }
  [[nodiscard]] double se() const {
    return count > 1 ? sd / std::sqrt(static_cast<double>(count)) : 0.0;
  }
};

/// Mean, sample sd and normal-approximation 95% interval of the uncensored
/// values; censored entries are only counted.
inline Aggregate aggregate(const std::vector<std::optional<double>>& values) {
  Aggregate a;
  double sum = 0.0;
  for (const auto& v : values) {
    if (v) {
      ++a.count;
      sum += *v;
    } else {
      ++a.censored;
    }
  }
  if (a.count == 0) {
    return a;
  }
  a.mean = sum / static_cast<double>(a.count);
  double ss = 0.0;
  for (const auto& v : values) {
    if (v) {
      ss += (*v - a.mean) * (*v - a.mean);
    }
  }
  a.sd = a.count > 1 ? std::sqrt(ss / static_cast<double>(a.count - 1)) : 0.0;
  const double half = 1.959963984540054 * a.se();
  a.ci_lo = a.mean - half;
  a.ci_hi = a.mean + half;
  return a;
}

inline Aggregate aggregate(const std::vector<double>& values) {
  std::vector<std::optional<double>> v(values.begin(), values.end());
  return aggregate(v);
}

// ---------------------------------------------------------------------------
// Parallel trials

inline unsigned default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

/// Seed of trial `index` under `master`; independent of the worker count.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t index) {
  return derive_seed(derive_seed(master, cell), index + 1);
}

/// Evaluates fn(i) for i in [0, count) on `workers` threads. Results are
/// returned in index order; the first exception is rethrown.
template <class Fn>
auto parallel_trials(std::size_t count, unsigned workers, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
  std::vector<std::optional<T>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) {
          error = std::current_exception();
        }
        next.store(count);
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) {
    out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace infucb

#endif  // INFUCB_HARNESS_HPP
