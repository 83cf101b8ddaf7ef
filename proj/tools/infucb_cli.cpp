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


// Command-line front end. Exit codes: 0 success, 1 failure or violated
// check, 2 usage error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "infucb/infucb.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path default_output_dir() {
  if (const char* env = std::getenv("INFUCB_OUTPUT_DIR"); env && *env) {
    return env;
  }
  return "infucb_out";
}

json read_json_file(const fs::path& p) {
  try {
    return json::parse(infucb::read_text(p));
  } catch (const json::parse_error& e) {
    throw UsageError("'" + p.string() + "' is not valid JSON: " + e.what());
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(out_path);
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path());
  }
  infucb::write_text(p, text);
}

// Instance selection shared by hardness and verify.
struct InstanceFlags {
  std::string file;
  std::vector<std::size_t> two_spike;  // n m
  double spike_mu0 = 0.0;
  double spike_eps = 0.5;
  std::string arms = "gaussian";
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--instance", file, "Instance file (JSON)");
    app->add_option("--two-spike", two_spike, "Generate a two-spike instance: N M")->expected(2);
    app->add_option("--spike-mu0", spike_mu0, "Base mean of the two-spike instance")->capture_default_str();
    app->add_option("--spike-eps", spike_eps, "Spike height above the base")->capture_default_str();
    app->add_option("--arms", arms, "Arm family of generated instances")
        ->check(CLI::IsMember({"gaussian", "bernoulli"}))
        ->capture_default_str();
    app->add_option("--instance-seed", seed, "Seed placing the spikes")->capture_default_str();
  }

  [[nodiscard]] bool given() const { return !file.empty() || !two_spike.empty(); }

  [[nodiscard]] infucb::BanditInstance load() const {
    if (!file.empty() && !two_spike.empty()) {
      throw UsageError("--instance and --two-spike are mutually exclusive");
    }
    if (!file.empty()) {
      return infucb::read_instance(file);
    }
    if (two_spike.size() != 2) {
      throw UsageError("an instance is required: --instance FILE or --two-spike N M");
    }
    return infucb::two_spike(two_spike[0], two_spike[1], spike_mu0, spike_eps,
                             arms == "gaussian" ? infucb::ArmKind::gaussian : infucb::ArmKind::bernoulli, seed);
  }
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string spec;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> horizon;
  unsigned workers = 0;
  std::string out;
  bool traces = false;
};

int cmd_simulate(const SimulateArgs& a) {
  infucb::CampaignSpec spec = infucb::campaign_from_json(read_json_file(a.spec));
  if (a.trials) spec.trials = *a.trials;
  if (a.seed) spec.seed = *a.seed;
  for (auto& r : spec.runs) {
    if (a.horizon) r.config.horizon = *a.horizon;
    if (a.traces) r.record_traces = true;
  }
  spec.validate();
  const auto instance = infucb::resolve_instance(spec.instance, fs::path(a.spec).parent_path());
  const fs::path out = a.out.empty() ? default_output_dir() : fs::path(a.out);
  fs::create_directories(out);
  const bool any_traces = std::any_of(spec.runs.begin(), spec.runs.end(), [](const auto& r) { return r.record_traces; });
  const fs::path trace_dir = out / "traces";
  if (any_traces) {
    fs::create_directories(trace_dir);
  }
  const unsigned workers = a.workers == 0 ? infucb::default_workers() : a.workers;
  const auto res = infucb::run_campaign(spec, instance, workers, any_traces ? trace_dir : fs::path{});
  infucb::write_campaign_outputs(res, out);
  std::cout << "wrote " << res.rows.size() << " metric rows to " << (out / "metrics.tsv").string() << '\n';
  for (const auto& s : res.summaries) {
    std::cout << s.name << ": total_pulls mean " << s.total_pulls.mean;
    if (s.tau_simple.defined() || s.tau_simple.censored) {
      std::cout << ", tau_simple mean " << s.tau_simple.mean << " (" << s.tau_simple.censored << " censored)";
    }
    std::cout << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// hardness

json series_json(const infucb::JSeries& s) {
  return {{"j_first", s.j_first}, {"values", s.values}, {"argmin", s.argmin}, {"min", s.min}};
}

struct HardnessArgs {
  InstanceFlags inst;
  std::optional<double> eps;
  std::optional<double> mu0;
  std::vector<std::size_t> ks{1};
  double delta = 0.05;
  std::string out;
};

int cmd_hardness(const HardnessArgs& a) {
  const auto instance = a.inst.load();
  infucb::HardnessParams p;
  const auto eps = a.eps ? a.eps : (instance.epsilon ? instance.epsilon : std::optional<double>(a.inst.spike_eps));
  p.eps = *eps;
  p.mu0 = a.mu0 ? a.mu0 : (instance.threshold_mu0 ? instance.threshold_mu0 : std::nullopt);
  if (!p.mu0 && !a.inst.two_spike.empty()) {
    p.mu0 = a.inst.spike_mu0;
  }
  p.ks = a.ks;
  p.delta = a.delta;
  const auto rep = infucb::hardness_report(instance, p);

  json j;
  j["format"] = "infucb-hardness";
  j["version"] = 1;
  j["params"] = {{"eps", p.eps}, {"delta", p.delta}, {"ks", p.ks}};
  j["params"]["mu0"] = p.mu0 ? json(*p.mu0) : json(nullptr);
  j["n"] = rep.n;
  j["m_eps"] = rep.m_eps;
  j["m_thr"] = rep.m_thr;
  j["h_low"] = json::array();
  for (std::size_t k = 1; k <= rep.h_low.size(); ++k) {
    const auto& lb = rep.h_low[k - 1];
    j["h_low"].push_back({{"k", k}, {"raw", lb.raw}, {"clamped", lb.clamped}, {"vacuous", lb.vacuous}});
  }
  j["h_best"] = series_json(rep.h_best);
  j["pac"] = {{"defined", rep.pac_defined}};
  if (rep.pac_defined) {
    j["pac"]["k1"] = rep.pac.k1;
    j["pac"]["km"] = rep.pac.km;
    j["pac"]["km_vacuous"] = rep.pac.km_vacuous;
  }
  j["fdr"] = json::array();
  for (const auto& f : rep.fdr) {
    j["fdr"].push_back({{"k", f.k},
                        {"h_fdr", series_json(f.h_fdr)},
                        {"h_fdr_tilde", series_json(f.h_fdr_tilde)},
                        {"h_fwer", series_json(f.h_fwer)},
                        {"v_tilde", f.v_tilde}});
  }
  j["delta_warnings"] = rep.delta_warnings;
  emit(j.dump(2) + "\n", a.out);
  for (const auto& w : rep.delta_warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string input;
  std::string out;
  // screens only
  std::optional<std::size_t> n;
  std::uint64_t seed = 0;
  infucb::FitOptions fit;
  std::string mixture_out;
};

int cmd_ingest_captions(const IngestArgs& a) {
  auto inst = infucb::load_caption_contest(a.input);
  const fs::path out = a.out.empty() ? default_output_dir() / "captions_instance.json" : fs::path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  infucb::write_instance(inst, out.string());
  std::cout << "wrote " << inst.size() << " Bernoulli arms to " << out.string() << '\n';
  return kExitOk;
}

int cmd_ingest_screens(const IngestArgs& a) {
  const auto z = infucb::load_screen_scores(a.input);
  const auto mix = infucb::fit_mixing_distribution(z, a.fit);
  infucb::Rng rng(infucb::derive_seed(a.seed, 7));
  auto inst = infucb::synth_from_mixture(mix, a.n.value_or(z.size()), rng);
  inst.label = "screens";
  const fs::path out = a.out.empty() ? default_output_dir() / "screens_instance.json" : fs::path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  infucb::write_instance(inst, out.string());
  if (!a.mixture_out.empty()) {
    json m;
    m["format"] = "infucb-mixture";
    m["version"] = 1;
    m["grid"] = mix.grid;
    m["weights"] = mix.weights;
    m["lambda"] = mix.lambda;
    m["nll"] = mix.nll;
    m["objective"] = mix.objective;
    m["iterations"] = mix.iterations;
    m["observation_variance"] = a.fit.observation_variance;
    emit(m.dump(1) + "\n", a.mixture_out);
  }
  std::cout << "fit " << z.size() << " scores (nll " << mix.nll << ", entropy " << mix.entropy() << "); wrote "
            << inst.size() << " Gaussian arms to " << out.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  unsigned max_m = 12;
  double tol = 1e-12;
  std::string out;
  bool corrupt_bound = false;
  InstanceFlags inst;
  double eps = 0.5;
  double mu0 = 0.0;
  std::vector<std::size_t> ks{1};
  double delta = 0.05;
  std::string gap_out;
};

int cmd_verify(const VerifyArgs& a) {
  auto rows = infucb::lemma_grid(a.max_m, a.tol);
  if (a.corrupt_bound && !rows.empty()) {
    // Test hook: claim a bound one thousandth above the exact optimum.
    auto& r = rows.front();
    r.check.formula_bound = r.check.exact_best + infucb::Rational(1, 1000);
    r.exact_equals_formula = r.check.exact_best == r.check.formula_bound;
    r.first_ok = r.check.first_inequality_holds();
    r.second_ok = r.check.second_inequality_holds(a.tol);
  }
  std::ostringstream tsv;
  tsv << "m\tk\tell\texact_best\tformula_bound\texp_bound\texact_equals_formula\tfirst_ok\tsecond_applicable\tsecond_ok\n";
  std::size_t violations = 0;
  for (const auto& r : rows) {
    const bool bad = !r.exact_equals_formula || !r.first_ok || (r.second_applicable && !r.second_ok);
    violations += bad ? 1 : 0;
    tsv << r.check.m << '\t' << r.check.k << '\t' << r.check.ell << '\t' << infucb::to_string(r.check.exact_best)
        << '\t' << infucb::to_string(r.check.formula_bound) << '\t' << infucb::format_double(r.check.exp_bound)
        << '\t' << r.exact_equals_formula << '\t' << r.first_ok << '\t' << r.second_applicable << '\t'
        << r.second_ok << '\n';
  }
  emit(tsv.str(), a.out);

  if (a.inst.given()) {
    const auto instance = a.inst.load();
    const auto gap = infucb::bound_gap_report(instance, a.eps, a.mu0, a.ks, a.delta);
    std::ostringstream g;
    g << "functional\tk\tj\tj_is_argmin\tupper\th_low\tratio\tfloor_ratio\tenvelope\twithin_envelope\n";
    for (const auto& r : gap) {
      g << r.functional << '\t' << r.k << '\t' << r.j << '\t' << r.j_is_argmin << '\t'
        << infucb::format_double(r.upper) << '\t' << infucb::format_double(r.h_low) << '\t'
        << (r.ratio ? infucb::format_double(*r.ratio) : std::string("NA")) << '\t'
        << infucb::format_double(r.floor_ratio) << '\t' << infucb::format_double(r.envelope) << '\t'
        << r.within_envelope << '\n';
    }
    emit(g.str(), a.gap_out.empty() ? (a.out.empty() ? "-" : a.out + ".gap.tsv") : a.gap_out);
  }
  std::cerr << rows.size() << " lemma cases checked, " << violations << " violation(s)\n";
  return violations == 0 ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------------------
// replay

struct ReplayArgs {
  std::string dir;
  unsigned workers = 0;
};

int cmd_replay(const ReplayArgs& a) {
  const fs::path dir(a.dir);
  const auto spec = infucb::campaign_from_json(read_json_file(dir / "manifest.json"));
  const auto instance = infucb::resolve_instance(spec.instance, dir);
  const std::string stored = infucb::read_text(dir / "metrics.tsv");
  const unsigned workers = a.workers == 0 ? infucb::default_workers() : a.workers;
  auto replay_spec = spec;
  for (auto& r : replay_spec.runs) r.record_traces = false;
  const auto res = infucb::run_campaign(replay_spec, instance, workers);
  const std::string fresh = infucb::metrics_table(res);
  auto hash = [](const std::string& s) {
    infucb::TraceHasher h;
    for (const char c : s) h.add_byte(static_cast<std::uint8_t>(c));
    return infucb::hex64(h.value());
  };
  std::cout << "stored metrics hash " << hash(stored) << "\nreplay metrics hash " << hash(fresh) << '\n';
  if (fresh != stored) {
    std::cout << "MISMATCH\n";
    return kExitFail;
  }
  std::cout << "identical\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"infucb: pure-exploration bandit simulations, hardness and verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "infucb 0.1.0");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a campaign spec and write metrics");
  s->add_option("--spec", sim.spec, "Campaign spec file (JSON)")->required()->check(CLI::ExistingFile);
  s->add_option("--trials", sim.trials, "Override the trial count");
  s->add_option("--seed", sim.seed, "Override the master seed");
  s->add_option("--horizon", sim.horizon, "Override every run's horizon (rounds)");
  s->add_option("--workers", sim.workers, "Worker threads (0 = available cores)")->capture_default_str();
  s->add_option("--out", sim.out, "Output directory (default $INFUCB_OUTPUT_DIR or ./infucb_out)");
  s->add_flag("--traces", sim.traces, "Write per-trial trace files for every run");

  HardnessArgs hard;
  auto* h = app.add_subcommand("hardness", "Evaluate the hardness functionals of an instance");
  hard.inst.add(h);
  h->add_option("--eps", hard.eps, "Epsilon (default: instance value, else --spike-eps)");
  h->add_option("--mu0", hard.mu0, "Threshold (default: instance value, else --spike-mu0 for two-spike)");
  h->add_option("--k", hard.ks, "Discovery counts k for the FDR/FWER functionals")->capture_default_str();
  h->add_option("--delta", hard.delta, "Confidence level")->capture_default_str();
  h->add_option("--out", hard.out, "Report file (default stdout)");

  IngestArgs ing;
  auto* in = app.add_subcommand("ingest", "Build instance files from experiment data");
  in->require_subcommand(1);
  auto* cap = in->add_subcommand("captions", "Caption votes (id,positive,total) to Bernoulli arms");
  cap->add_option("--input", ing.input, "Caption vote file")->required()->check(CLI::ExistingFile);
  cap->add_option("--out", ing.out, "Instance file to write");
  auto* scr = in->add_subcommand("screens", "Replicate z-scores (gene_id,z1,z2) to a fitted Gaussian instance");
  scr->add_option("--input", ing.input, "Screen score file")->required()->check(CLI::ExistingFile);
  scr->add_option("--out", ing.out, "Instance file to write");
  scr->add_option("--n", ing.n, "Number of arms to draw (default: number of scores)");
  scr->add_option("--seed", ing.seed, "Seed for drawing arm means")->capture_default_str();
  scr->add_option("--lambda", ing.fit.lambda, "Entropy bonus")->capture_default_str();
  scr->add_option("--grid-step", ing.fit.grid_step, "Grid spacing on [-4, 4]")->capture_default_str();
  scr->add_option("--iterations", ing.fit.iterations, "EM iterations")->capture_default_str();
  scr->add_option("--mixture-out", ing.mixture_out, "Also write the fitted mixture (JSON)");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Exhaustive subset-hitting check and bound-gap table");
  v->add_option("--max-m", ver.max_m, "Largest ground-set size (at most 14)")->capture_default_str();
  v->add_option("--tol", ver.tol, "Tolerance for the exponential bound")->capture_default_str();
  v->add_option("--out", ver.out, "Lemma table (TSV, default stdout)");
  v->add_flag("--corrupt-bound", ver.corrupt_bound, "Testing hook: corrupt one bound to force a violation");
  ver.inst.add(v);
  v->add_option("--eps", ver.eps, "Epsilon for the bound-gap table")->capture_default_str();
  v->add_option("--mu0", ver.mu0, "Threshold for the bound-gap table")->capture_default_str();
  v->add_option("--k", ver.ks, "k values for the bound-gap table")->capture_default_str();
  v->add_option("--delta", ver.delta, "Confidence level for the bound-gap table")->capture_default_str();
  v->add_option("--gap-out", ver.gap_out, "Bound-gap table (TSV)");

  ReplayArgs rep;
  auto* r = app.add_subcommand("replay", "Re-run a campaign directory and compare metrics");
  r->add_option("--dir", rep.dir, "Directory written by simulate")->required()->check(CLI::ExistingDirectory);
  r->add_option("--workers", rep.workers, "Worker threads (0 = available cores)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim);
    if (h->parsed()) return cmd_hardness(hard);
    if (cap->parsed()) return cmd_ingest_captions(ing);
    if (scr->parsed()) return cmd_ingest_screens(ing);
    if (v->parsed()) return cmd_verify(ver);
    if (r->parsed()) return cmd_replay(rep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const infucb::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid spec: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}
