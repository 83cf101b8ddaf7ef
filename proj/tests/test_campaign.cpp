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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "infucb/campaign.hpp"

namespace infucb {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("infucb_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

CampaignSpec small_spec() {
  CampaignSpec s;
  s.instance.generator = {{"kind", "two_spike"}, {"n", 64}, {"m", 4}, {"mu0", 0.0}, {"eps", 1.0}, {"seed", 3}};
  s.trials = 3;
  s.seed = 2024;
  CampaignRun a;
  a.name = "ucb";
  a.config.horizon = 3000;
  a.config.epsilon = 0.5;
  CampaignRun b;
  b.name = "fdr";
  b.config.horizon = 3000;
  b.config.engine.objective = Objective::fdr_tpr;
  b.config.engine.mu0 = 0.0;
  b.config.ks = {1, 2, 4};
  s.runs = {a, b};
  return s;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(Spec, JsonRoundTrip) {
  auto s = small_spec();
  s.runs[0].config.engine = EngineConfig::practice(Objective::best_arm, 0.01);
  s.runs[0].config.engine.prune_brackets = true;
  s.runs[0].config.checkpoints = {10, 100};
  s.runs[0].config.lucb_variance = 0.25;
  s.runs[1].record_traces = true;
  const auto j = campaign_to_json(s);
  EXPECT_EQ(j.at("format"), "infucb-campaign");
  const auto back = campaign_from_json(j);
  EXPECT_EQ(campaign_to_json(back), j);
  EXPECT_EQ(back.runs[0].config.engine.first_bracket_log2, 6u);
  EXPECT_TRUE(back.runs[0].config.engine.bh_at_delta);
  EXPECT_EQ(back.runs[1].config.engine.mu0, std::optional<double>(0.0));
}

TEST(Spec, Rejections) {
  auto j = campaign_to_json(small_spec());
  auto bad = j;
  bad["extra"] = 1;
  EXPECT_THROW(campaign_from_json(bad), std::invalid_argument);
  bad = j;
  bad["format"] = "other";
  EXPECT_THROW(campaign_from_json(bad), std::invalid_argument);
  bad = j;
  bad["version"] = 9;
  EXPECT_THROW(campaign_from_json(bad), std::invalid_argument);
  bad = j;
  bad["runs"][0]["horizn"] = 5;
  EXPECT_THROW(campaign_from_json(bad), std::invalid_argument);
  bad = j;
  bad["runs"][1].erase("mu0");
  EXPECT_THROW(campaign_from_json(bad).validate(), std::invalid_argument);
  auto s = small_spec();
  s.trials = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = small_spec();
  s.runs[1].name = "ucb";
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Generators, Kinds) {
  const auto a = generate_instance({{"kind", "two_spike"}, {"n", 10}, {"m", 2}, {"arms", "bernoulli"}, {"mu0", 0.2}});
  EXPECT_EQ(a.size(), 10u);
  EXPECT_TRUE(std::holds_alternative<Bernoulli>(a.arms[0]));
  const auto b = generate_instance({{"kind", "means"}, {"means", {0.0, 1.0}}, {"variance", 2.0}});
  EXPECT_EQ(b.means(), (std::vector<double>{0.0, 1.0}));
  EXPECT_THROW(generate_instance({{"kind", "zipf"}}), std::invalid_argument);
  EXPECT_THROW(generate_instance({{"kind", "two_spike"}, {"n", 10}, {"m", 2}, {"arms", "poisson"}}),
               std::invalid_argument);
  EXPECT_THROW(resolve_instance(InstanceSource{}), std::invalid_argument);
}

TEST(Campaign, RowsAndWorkerIndependence) {
  const auto spec = small_spec();
  const auto inst = resolve_instance(spec.instance);
  const auto one = run_campaign(spec, inst, 1);
  const auto four = run_campaign(spec, inst, 4);
  ASSERT_EQ(one.rows.size(), 6u);
  const std::string m1 = metrics_table(one);
  EXPECT_EQ(m1, metrics_table(four));
  const auto ls = lines(m1);
  ASSERT_EQ(ls.size(), 7u);
  EXPECT_EQ(ls[0], kMetricsHeader);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    EXPECT_EQ(one.rows[i].seed, trial_seed(spec.seed, one.rows[i].run_index, one.rows[i].trial));
  }
  EXPECT_EQ(one.rows[0].run_index, 0u);
  EXPECT_EQ(one.rows[3].run_index, 1u);
  ASSERT_EQ(one.summaries.size(), 2u);
  EXPECT_EQ(one.summaries[0].tau_simple.count + one.summaries[0].tau_simple.censored, 3u);
  EXPECT_EQ(one.summaries[1].tau_k.size(), 3u);
  EXPECT_FALSE(one.summaries[1].series.empty());
  EXPECT_EQ(summary_json(one, m1).at("metrics_hash"), summary_json(four, metrics_table(four)).at("metrics_hash"));
  auto other = spec;
  other.seed = 2025;
  EXPECT_NE(metrics_table(run_campaign(other, inst, 2)), m1);
}

TEST(Campaign, OutputsAndReplay) {
  const auto dir = fresh_dir("outputs");
  const auto spec = small_spec();
  const auto res = run_campaign(spec, resolve_instance(spec.instance), 2);
  write_campaign_outputs(res, dir);
  for (const char* f : {"instance.json", "manifest.json", "metrics.tsv", "summary.json", "series_fdr.tsv",
                        "timing.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_FALSE(fs::exists(dir / "series_ucb.tsv"));
  const auto manifest = campaign_from_json(nlohmann::json::parse(read_text(dir / "manifest.json")));
  ASSERT_TRUE(manifest.instance.file);
  const auto inst = resolve_instance(manifest.instance, dir);
  EXPECT_EQ(inst.means(), res.instance.means());
  const auto again = run_campaign(manifest, inst, 3);
  EXPECT_EQ(metrics_table(again), read_text(dir / "metrics.tsv"));
  fs::remove_all(dir);
}

TEST(Campaign, TraceFiles) {
  const auto dir = fresh_dir("traces");
  auto spec = small_spec();
  spec.trials = 2;
  spec.runs[1].record_traces = true;
  spec.runs[1].config.horizon = 400;
  const auto inst = resolve_instance(spec.instance);
  EXPECT_THROW(run_campaign(spec, inst, 1), std::invalid_argument);
  const auto res = run_campaign(spec, inst, 2, dir);
  const auto ls = lines(read_text(dir / trace_file_name("fdr", 1)));
  ASSERT_GE(ls.size(), 402u);
  EXPECT_EQ(ls.front(), "# infucb-trace v1");
  EXPECT_EQ(ls.back(), "# hash " + hex64(res.rows[3].trace_hash));
  std::size_t p_lines = 0;
  std::uint64_t last_p = 0;
  for (const auto& l : ls) {
    if (l.rfind("P\t", 0) == 0) {
      ++p_lines;
      last_p = std::stoull(l.substr(2));
    } else if (l.rfind("E\t", 0) == 0) {
      // Events of round t come after the pull of round t.
      EXPECT_LE(std::stoull(l.substr(2)), last_p);
    }
  }
  EXPECT_EQ(p_lines, 400u);
  EXPECT_FALSE(fs::exists(dir / trace_file_name("ucb", 0)));
  fs::remove_all(dir);
}

TEST(Campaign, BadOutputDirectory) {
  const auto spec = small_spec();
  auto s1 = spec;
  s1.trials = 1;
  const auto res = run_campaign(s1, resolve_instance(s1.instance), 1);
  const auto file = fresh_dir("blocker") / "plain_file";
  std::ofstream(file) << "x";
  EXPECT_ANY_THROW(write_campaign_outputs(res, file / "sub"));
}

}  // namespace
}  // namespace infucb
