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

#ifndef INFUCB_CAMPAIGN_HPP
#define INFUCB_CAMPAIGN_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "infucb/harness.hpp"
#include "infucb/instance_io.hpp"
#include "infucb/trace.hpp"

namespace infucb {

inline constexpr const char* kCampaignFormat = "infucb-campaign";
inline constexpr int kCampaignVersion = 1;

/// One (algorithm, configuration) cell of a campaign.
struct CampaignRun {
  std::string name;
  RunConfig config;  // config.seed is replaced per trial
  bool record_traces = false;
};

struct InstanceSource {
  std::optional<std::string> file;
  nlohmann::json generator;  // {"kind": "two_spike", ...} when no file
};

struct CampaignSpec {
  InstanceSource instance;
  std::vector<CampaignRun> runs;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (trials < 1) {
      throw std::invalid_argument("campaign: trials must be at least 1");
    }
    if (runs.empty()) {
      throw std::invalid_argument("campaign: no runs");
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].name.empty()) {
        throw std::invalid_argument("campaign: run " + std::to_string(i) + " has no name");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (runs[j].name == runs[i].name) {
          throw std::invalid_argument("campaign: duplicate run name '" + runs[i].name + "'");
        }
      }
      try {
        runs[i].config.validate();
      } catch (const std::exception& e) {
        throw std::invalid_argument("campaign: run '" + runs[i].name + "': " + e.what());
      }
    }
  }
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) {
      ok = ok || it.key() == k;
    }
    if (!ok) {
      throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
    }
  }
}

}  // namespace detail

inline nlohmann::json run_to_json(const CampaignRun& r) {
  const RunConfig& c = r.config;
  const EngineConfig& e = c.engine;
  nlohmann::json j;
  j["name"] = r.name;
  j["algorithm"] = to_string(c.algorithm);
  j["objective"] = to_string(e.objective);
  j["delta"] = e.delta;
  if (e.mu0) {
    j["mu0"] = *e.mu0;
  }
  j["epsilon"] = c.epsilon;
  j["horizon"] = c.horizon;
  j["mode"] = e.mode == Mode::practice ? "practice" : "theory";
  j["share_samples"] = e.share_samples;
  j["first_bracket_log2"] = e.first_bracket_log2;
  j["stop_after_full_bracket"] = e.stop_after_full_bracket;
  j["bh_at_delta"] = e.bh_at_delta;
  j["prune_brackets"] = e.prune_brackets;
  j["cost_select"] = e.cost_select;
  j["scale_c"] = e.schedule.scale_c;
  j["variance_proxy"] = e.schedule.variance_proxy;
  j["ks"] = c.ks;
  j["checkpoints"] = c.checkpoints;
  if (c.lucb_variance) {
    j["lucb_variance"] = *c.lucb_variance;
  }
  j["record_traces"] = r.record_traces;
  return j;
}

inline CampaignRun run_from_json(const nlohmann::json& j) {
  detail::reject_unknown(j,
                         {"name", "algorithm", "objective", "delta", "mu0", "epsilon", "horizon", "mode",
                          "share_samples", "first_bracket_log2", "stop_after_full_bracket", "bh_at_delta",
                          "prune_brackets", "cost_select", "scale_c", "variance_proxy", "ks", "checkpoints",
                          "lucb_variance", "record_traces"},
                         "run");
  CampaignRun r;
  r.name = j.at("name").get<std::string>();
  RunConfig& c = r.config;
  c.algorithm = algorithm_from_string(detail::get_or<std::string>(j, "algorithm", "infinite_ucb"));
  const auto objective = objective_from_string(detail::get_or<std::string>(j, "objective", "best_arm"));
  const auto delta = detail::get_or<double>(j, "delta", 0.05);
  std::optional<double> mu0;
  if (j.contains("mu0")) {
    mu0 = j.at("mu0").get<double>();
  }
  const std::string mode = detail::get_or<std::string>(j, "mode", "theory");
  if (mode == "practice") {
    c.engine = EngineConfig::practice(objective, delta, mu0);
  } else if (mode == "theory") {
    c.engine.objective = objective;
    c.engine.delta = delta;
    c.engine.mu0 = mu0;
  } else {
    throw std::invalid_argument("run: mode must be theory or practice");
  }
  EngineConfig& e = c.engine;
  e.share_samples = detail::get_or<bool>(j, "share_samples", e.share_samples);
  e.first_bracket_log2 = detail::get_or<unsigned>(j, "first_bracket_log2", e.first_bracket_log2);
  e.stop_after_full_bracket = detail::get_or<bool>(j, "stop_after_full_bracket", e.stop_after_full_bracket);
  e.bh_at_delta = detail::get_or<bool>(j, "bh_at_delta", e.bh_at_delta);
  e.prune_brackets = detail::get_or<bool>(j, "prune_brackets", e.prune_brackets);
  e.cost_select = detail::get_or<bool>(j, "cost_select", e.cost_select);
  e.schedule.scale_c = detail::get_or<double>(j, "scale_c", e.schedule.scale_c);
  e.schedule.variance_proxy = detail::get_or<double>(j, "variance_proxy", e.schedule.variance_proxy);
  c.epsilon = detail::get_or<double>(j, "epsilon", c.epsilon);
  c.horizon = detail::get_or<std::uint64_t>(j, "horizon", c.horizon);
  c.ks = detail::get_or<std::vector<std::uint32_t>>(j, "ks", c.ks);
  c.checkpoints = detail::get_or<std::vector<std::uint64_t>>(j, "checkpoints", {});
  if (j.contains("lucb_variance")) {
    c.lucb_variance = j.at("lucb_variance").get<double>();
  }
  r.record_traces = detail::get_or<bool>(j, "record_traces", false);
  return r;
}

inline nlohmann::json campaign_to_json(const CampaignSpec& s) {
  nlohmann::json j;
  j["format"] = kCampaignFormat;
  j["version"] = kCampaignVersion;
  if (s.instance.file) {
    j["instance"] = {{"file", *s.instance.file}};
  } else {
    j["instance"] = s.instance.generator;
  }
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["runs"] = nlohmann::json::array();
  for (const auto& r : s.runs) {
    j["runs"].push_back(run_to_json(r));
  }
  return j;
}

inline CampaignSpec campaign_from_json(const nlohmann::json& j) {
  if (detail::get_or<std::string>(j, "format", kCampaignFormat) != kCampaignFormat) {
    throw std::invalid_argument("campaign: wrong format tag");
  }
  if (detail::get_or<int>(j, "version", kCampaignVersion) != kCampaignVersion) {
    throw std::invalid_argument("campaign: unsupported version");
  }
  detail::reject_unknown(j, {"format", "version", "instance", "trials", "seed", "runs"}, "campaign");
  CampaignSpec s;
  const auto& inst = j.at("instance");
  if (inst.contains("file")) {
    s.instance.file = inst.at("file").get<std::string>();
  } else {
    s.instance.generator = inst;
  }
  s.trials = detail::get_or<std::uint64_t>(j, "trials", 1);
  s.seed = detail::get_or<std::uint64_t>(j, "seed", 0);
  for (const auto& r : j.at("runs")) {
    s.runs.push_back(run_from_json(r));
  }
  return s;
}

/// Generator specs: {"kind": "two_spike", "n", "m", "mu0", "eps", "arms": "gaussian"|"bernoulli", "seed"}
/// or {"kind": "means", "means": [...], "variance"}.
inline BanditInstance generate_instance(const nlohmann::json& g) {
  const std::string kind = g.at("kind").get<std::string>();
  if (kind == "two_spike") {
    detail::reject_unknown(g, {"kind", "n", "m", "mu0", "eps", "arms", "seed"}, "two_spike");
    const std::string arms = detail::get_or<std::string>(g, "arms", "gaussian");
    if (arms != "gaussian" && arms != "bernoulli") {
      throw std::invalid_argument("two_spike: arms must be gaussian or bernoulli");
    }
    return two_spike(g.at("n").get<std::size_t>(), g.at("m").get<std::size_t>(),
                     detail::get_or<double>(g, "mu0", 0.0), detail::get_or<double>(g, "eps", 0.5),
                     arms == "gaussian" ? ArmKind::gaussian : ArmKind::bernoulli,
                     detail::get_or<std::uint64_t>(g, "seed", 0));
  }
  if (kind == "means") {
    detail::reject_unknown(g, {"kind", "means", "variance"}, "means");
    return gaussian_instance(g.at("means").get<std::vector<double>>(), detail::get_or<double>(g, "variance", 1.0));
  }
  throw std::invalid_argument("unknown instance generator '" + kind + "'");
}

inline BanditInstance resolve_instance(const InstanceSource& src, const std::filesystem::path& base = {}) {
  if (src.file) {
    std::filesystem::path p(*src.file);
    if (p.is_relative() && !base.empty()) {
      p = base / p;
    }
    return read_instance(p.string());
  }
  if (src.generator.is_null()) {
    throw std::invalid_argument("campaign: no instance source");
  }
  return generate_instance(src.generator);
}

// ---------------------------------------------------------------------------
// Execution

struct TrialMetrics {
  std::size_t run_index = 0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t rounds = 0;
  std::uint64_t total_pulls = 0;
  std::optional<ArmId> final_arm;
  std::optional<bool> final_eps_good;
  TauValue tau_simple;
  std::optional<std::uint64_t> stop_pulls;
  std::optional<std::uint64_t> stop_round;
  std::optional<DiscoveryMetrics> discovery;
  std::uint64_t trace_hash = 0;
};

struct SeriesPoint {
  std::uint64_t checkpoint = 0;
  Aggregate fdp;
  Aggregate true_pos;
};

struct RunSummary {
  std::string name;
  Aggregate tau_simple;
  Aggregate stop_pulls;
  Aggregate total_pulls;
  Aggregate final_eps_good;
  std::vector<std::pair<std::uint32_t, Aggregate>> tau_k;
  Aggregate any_false;  // indicator that the accepted set holds a null arm
  std::vector<SeriesPoint> series;
};

struct CampaignResult {
  BanditInstance instance;
  CampaignSpec spec;
  std::vector<TrialMetrics> rows;  // run-major, trial-minor
  std::vector<RunSummary> summaries;
  double wall_seconds = 0.0;
};

inline TrialMetrics measure_trial(const BanditInstance& inst, const CampaignRun& run, std::size_t run_index,
                                  std::uint64_t trial, std::uint64_t seed, const RunTrace& tr) {
  const RunConfig& c = run.config;
  TrialMetrics m;
  m.run_index = run_index;
  m.trial = trial;
  m.seed = seed;
  m.rounds = tr.rounds;
  m.total_pulls = tr.total_pulls;
  m.final_arm = tr.final_arm;
  m.stop_pulls = tr.stop_pulls;
  m.stop_round = tr.stop_round;
  m.trace_hash = tr.hash;
  if (c.engine.objective == Objective::best_arm) {
    m.tau_simple = tau_simple(tr, inst, c.epsilon);
    if (tr.final_arm && *tr.final_arm != kNoArm) {
      m.final_eps_good = mean_of(inst.arms[*tr.final_arm]) > inst.best_mean() - c.epsilon;
    }
  } else {
    m.discovery = discovery_metrics(tr, inst, *c.engine.mu0, accept_kind(c.engine.objective), c.checkpoint_grid(),
                                    c.ks);
  }
  return m;
}

inline void write_trace_file(const std::filesystem::path& path, const RunTrace& tr) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << "# infucb-trace v1\n";
  std::size_t ei = 0;
  std::size_t oi = 0;
  // O and E lines of round t follow every P line of round t.
  auto flush_before = [&](std::uint64_t t) {
    while (oi < tr.outputs.size() && tr.outputs[oi].t < t) {
      out << "O\t" << tr.outputs[oi].t << '\t';
      if (tr.outputs[oi].arm == kNoArm) {
        out << '-';
      } else {
        out << tr.outputs[oi].arm;
      }
      out << '\n';
      ++oi;
    }
    while (ei < tr.events.size() && tr.events[ei].t < t) {
      write_event(out, tr.events[ei++]);
    }
  };
  for (const auto& p : tr.pulls) {
    flush_before(p.t);
    write_pull(out, p);
  }
  flush_before(std::numeric_limits<std::uint64_t>::max());
  out << "# hash " << hex64(tr.hash) << '\n';
}

inline std::string trace_file_name(const std::string& run, std::uint64_t trial) {
  return run + "_" + std::to_string(trial) + ".trace.tsv";
}

inline RunSummary summarize_run(const CampaignRun& run, const std::vector<const TrialMetrics*>& rows) {
  RunSummary s;
  s.name = run.name;
  std::vector<std::optional<double>> tau;
  std::vector<std::optional<double>> stop;
  std::vector<double> pulls;
  std::vector<std::optional<double>> good;
  std::vector<std::optional<double>> any_false;
  for (const auto* r : rows) {
    pulls.push_back(static_cast<double>(r->total_pulls));
    if (run.config.engine.objective == Objective::best_arm) {
      tau.push_back(r->tau_simple ? std::optional<double>(static_cast<double>(*r->tau_simple)) : std::nullopt);
      good.push_back(r->final_eps_good ? std::optional<double>(*r->final_eps_good ? 1.0 : 0.0) : std::nullopt);
    }
    if (run.config.algorithm == Algorithm::lucb || run.config.algorithm == Algorithm::bob) {
      stop.push_back(r->stop_pulls ? std::optional<double>(static_cast<double>(*r->stop_pulls)) : std::nullopt);
    }
    if (r->discovery) {
      any_false.push_back(r->discovery->final_false > 0 ? 1.0 : 0.0);
    }
  }
  s.tau_simple = aggregate(tau);
  s.stop_pulls = aggregate(stop);
  s.total_pulls = aggregate(pulls);
  s.final_eps_good = aggregate(good);
  s.any_false = aggregate(any_false);
  if (!rows.empty() && rows.front()->discovery) {
    const auto& ks = rows.front()->discovery->ks;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      std::vector<std::optional<double>> v;
      for (const auto* r : rows) {
        const auto& t = r->discovery->tau_k[i];
        v.push_back(t ? std::optional<double>(static_cast<double>(*t)) : std::nullopt);
      }
      s.tau_k.emplace_back(ks[i], aggregate(v));
    }
    const std::size_t points = rows.front()->discovery->series.size();
    for (std::size_t p = 0; p < points; ++p) {
      std::vector<double> fdp;
      std::vector<double> tp;
      for (const auto* r : rows) {
        fdp.push_back(r->discovery->series[p].fdp());
        tp.push_back(static_cast<double>(r->discovery->series[p].true_pos));
      }
      s.series.push_back({rows.front()->discovery->series[p].t, aggregate(fdp), aggregate(tp)});
    }
  }
  return s;
}

/// Runs every (run, trial) cell. Trial i of run r uses trial_seed(seed, r, i),
/// so results do not depend on `workers`. Traces are written under
/// `trace_dir` for runs with record_traces.
inline CampaignResult run_campaign(const CampaignSpec& spec, const BanditInstance& instance, unsigned workers,
                                   const std::filesystem::path& trace_dir = {}) {
  spec.validate();
  instance.validate();
  for (const auto& r : spec.runs) {
    if (r.record_traces && trace_dir.empty()) {
      throw std::invalid_argument("campaign: run '" + r.name + "' records traces but no trace directory given");
    }
  }
  const auto start = std::chrono::steady_clock::now();
  CampaignResult res;
  res.instance = instance;
  res.spec = spec;
  const std::size_t cells = spec.runs.size() * spec.trials;
  res.rows = parallel_trials(cells, workers, [&](std::size_t cell) {
    const std::size_t ri = cell / spec.trials;
    const std::uint64_t trial = cell % spec.trials;
    const CampaignRun& run = spec.runs[ri];
    RunConfig cfg = run.config;
    cfg.seed = trial_seed(spec.seed, ri, trial);
    cfg.record_pulls = run.record_traces;
    const RunTrace tr = infucb::run(instance, cfg);
    if (run.record_traces) {
      write_trace_file(trace_dir / trace_file_name(run.name, trial), tr);
    }
    return measure_trial(instance, run, ri, trial, cfg.seed, tr);
  });
  for (std::size_t ri = 0; ri < spec.runs.size(); ++ri) {
    std::vector<const TrialMetrics*> rows;
    for (const auto& r : res.rows) {
      if (r.run_index == ri) {
        rows.push_back(&r);
      }
    }
    res.summaries.push_back(summarize_run(spec.runs[ri], rows));
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

// ---------------------------------------------------------------------------
// Result files

namespace detail {

inline std::string opt_u64(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : std::string("NA");
}

inline nlohmann::json agg_json(const Aggregate& a) {
  nlohmann::json j;
  j["count"] = a.count;
  j["censored"] = a.censored;
  if (a.defined()) {
    j["mean"] = a.mean;
    j["sd"] = a.sd;
    j["ci_lo"] = a.ci_lo;
    j["ci_hi"] = a.ci_hi;
  } else {
    j["mean"] = nullptr;
  }
  return j;
}

}  // namespace detail

inline const char* kMetricsHeader =
    "run\talgorithm\ttrial\tseed\trounds\ttotal_pulls\tfinal_arm\tfinal_eps_good\ttau_simple\tstop_pulls\t"
    "stop_round\ttrue_pos\tfalse_pos\tfdp\tfirst_false_round\ttau_k\ttrace_hash";

/// One row per (run, trial). Deterministic: no timing columns.
inline std::string metrics_table(const CampaignResult& res) {
  std::ostringstream out;
  out << kMetricsHeader << '\n';
  for (const auto& r : res.rows) {
    const CampaignRun& run = res.spec.runs[r.run_index];
    out << run.name << '\t' << to_string(run.config.algorithm) << '\t' << r.trial << '\t' << r.seed << '\t'
        << r.rounds << '\t' << r.total_pulls << '\t';
    out << (r.final_arm && *r.final_arm != kNoArm ? std::to_string(*r.final_arm) : "NA") << '\t';
    out << (r.final_eps_good ? (*r.final_eps_good ? "1" : "0") : "NA") << '\t';
    out << detail::opt_u64(r.tau_simple) << '\t' << detail::opt_u64(r.stop_pulls) << '\t'
        << detail::opt_u64(r.stop_round) << '\t';
    if (r.discovery) {
      const auto& d = *r.discovery;
      out << d.final_true << '\t' << d.final_false << '\t'
          << format_double(static_cast<double>(d.final_false) /
                           static_cast<double>(std::max<std::uint64_t>(d.final_true + d.final_false, 1)))
          << '\t' << detail::opt_u64(d.first_false_round) << '\t';
      for (std::size_t i = 0; i < d.ks.size(); ++i) {
        out << (i ? ";" : "") << d.ks[i] << ':' << detail::opt_u64(d.tau_k[i]);
      }
      out << '\t';
    } else {
      out << "NA\tNA\tNA\tNA\tNA\t";
    }
    out << hex64(r.trace_hash) << '\n';
  }
  return out.str();
}

inline nlohmann::json summary_json(const CampaignResult& res, const std::string& metrics_text) {
  nlohmann::json j;
  j["format"] = "infucb-summary";
  j["version"] = 1;
  j["instance"] = {{"n", res.instance.size()}, {"label", res.instance.label}, {"best_mean", res.instance.best_mean()}};
  j["trials"] = res.spec.trials;
  j["seed"] = res.spec.seed;
  TraceHasher h;
  for (const char c : metrics_text) {
    h.add_byte(static_cast<std::uint8_t>(c));
  }
  j["metrics_hash"] = hex64(h.value());
  j["runs"] = nlohmann::json::array();
  for (const auto& s : res.summaries) {
    nlohmann::json r;
    r["name"] = s.name;
    r["tau_simple"] = detail::agg_json(s.tau_simple);
    r["stop_pulls"] = detail::agg_json(s.stop_pulls);
    r["total_pulls"] = detail::agg_json(s.total_pulls);
    r["final_eps_good"] = detail::agg_json(s.final_eps_good);
    r["accepted_any_null"] = detail::agg_json(s.any_false);
    r["tau_k"] = nlohmann::json::array();
    for (const auto& [k, a] : s.tau_k) {
      auto e = detail::agg_json(a);
      e["k"] = k;
      r["tau_k"].push_back(e);
    }
    j["runs"].push_back(r);
  }
  return j;
}

/// checkpoint, fdp mean and 95% interval, true positives mean and interval.
inline std::string series_table(const RunSummary& s) {
  std::ostringstream out;
  out << "checkpoint\tfdp\tfdp_ci_lo\tfdp_ci_hi\ttrue_pos\ttrue_pos_ci_lo\ttrue_pos_ci_hi\n";
  for (const auto& p : s.series) {
    out << p.checkpoint << '\t' << format_double(p.fdp.mean) << '\t' << format_double(p.fdp.ci_lo) << '\t'
        << format_double(p.fdp.ci_hi) << '\t' << format_double(p.true_pos.mean) << '\t'
        << format_double(p.true_pos.ci_lo) << '\t' << format_double(p.true_pos.ci_hi) << '\n';
  }
  return out.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + p.string() + "'");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed for '" + p.string() + "'");
  }
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + p.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes manifest.json (spec with the instance inlined as instance.json),
/// metrics.tsv, summary.json, series_<run>.tsv and timing.json.
inline void write_campaign_outputs(const CampaignResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_instance(res.instance, (dir / "instance.json").string());
  CampaignSpec manifest = res.spec;
  manifest.instance.file = "instance.json";
  manifest.instance.generator = nullptr;
  write_text(dir / "manifest.json", campaign_to_json(manifest).dump(2) + "\n");
  const std::string metrics = metrics_table(res);
  write_text(dir / "metrics.tsv", metrics);
  write_text(dir / "summary.json", summary_json(res, metrics).dump(2) + "\n");
  for (const auto& s : res.summaries) {
    if (!s.series.empty()) {
      write_text(dir / ("series_" + s.name + ".tsv"), series_table(s));
    }
  }
  nlohmann::json timing;
  timing["wall_seconds"] = res.wall_seconds;
  write_text(dir / "timing.json", timing.dump(2) + "\n");
}

}  // namespace infucb

#endif  // INFUCB_CAMPAIGN_HPP
