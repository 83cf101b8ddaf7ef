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


#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "infucb/ingest.hpp"

namespace infucb {
namespace {

std::string data_dir() {
  const char* d = std::getenv("INFUCB_TEST_DATA");
  return d ? d : "data";
}

TEST(Captions, ParsesRows) {
  std::istringstream in("id,positive,total\nc1,3,10\n# note\n\nc2\t0\t5\n");
  std::vector<std::string> ids;
  const auto inst = load_caption_contest(in, &ids);
  ASSERT_EQ(inst.size(), 2u);
  EXPECT_DOUBLE_EQ(std::get<Bernoulli>(inst.arms[0]).p, 0.3);
  EXPECT_DOUBLE_EQ(std::get<Bernoulli>(inst.arms[1]).p, 0.0);
  EXPECT_EQ(ids, (std::vector<std::string>{"c1", "c2"}));
}

TEST(Captions, HeaderIsOptional) {
  std::istringstream in("c1,10,10\n");
  EXPECT_DOUBLE_EQ(std::get<Bernoulli>(load_caption_contest(in).arms[0]).p, 1.0);
}

TEST(Captions, Rejections) {
  for (const char* bad : {"c1,1,0\n", "c1,6,5\n", "c1,1\n", "c1,a,5\n", "c1,-1,5\n", "c1,1.5,5\n",
                          "id,pos,total\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(load_caption_contest(in), std::runtime_error) << bad;
  }
  EXPECT_THROW(load_caption_contest("/nonexistent/captions.csv"), std::runtime_error);
}

TEST(Captions, Fixture) {
  const auto inst = load_caption_contest(data_dir() + "/captions_sample.csv");
  EXPECT_EQ(inst.size(), 60u);
  for (const auto& a : inst.arms) {
    const double p = std::get<Bernoulli>(a).p;
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(Screens, AveragesReplicates) {
  std::istringstream in("gene_id,z1,z2\ng1,1.0,2.0\ng2,-3,1\n");
  EXPECT_EQ(load_screen_scores(in), (std::vector<double>{1.5, -1.0}));
  std::istringstream bad("g1,1.0,x\n");
  EXPECT_THROW(load_screen_scores(bad), std::runtime_error);
  std::istringstream nan("g1,nan,1\n");
  EXPECT_THROW(load_screen_scores(nan), std::runtime_error);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(load_screen_scores(empty), std::runtime_error);
  EXPECT_EQ(load_screen_scores(data_dir() + "/screens_sample.tsv").size(), 300u);
}

TEST(Grid, Construction) {
  EXPECT_EQ(make_grid(-1, 1, 0.5), (std::vector<double>{-1, -0.5, 0, 0.5, 1}));
  EXPECT_EQ(make_grid(-4, 4, 0.01).size(), 801u);
  EXPECT_THROW(make_grid(-1, 1, 0.3), std::invalid_argument);
  EXPECT_THROW(make_grid(1, -1, 0.5), std::invalid_argument);
  EXPECT_THROW(make_grid(-1, 1, 0.0), std::invalid_argument);
}

TEST(MStep, SolverResidual) {
  for (double c : {-30.0, -1.0, 0.0, 1.0, 2.5, 40.0, 700.0}) {
    const double y = detail::solve_exp_plus_id(c);
    EXPECT_NEAR(std::exp(y) + y, c, 1e-12 * std::max(1.0, std::abs(c))) << c;
  }
}

TEST(MStep, StationarityAndSimplex) {
  const std::vector<double> a{0.5, 0.3, 0.15, 0.05, 0.0};
  for (double lam : {1e-4, 1e-2, 1.0, 100.0}) {
    std::vector<double> w(a.size());
    double nu = 0.0;
    detail::entropic_m_step(a, lam, w, nu);
    double sum = 0.0;
    for (std::size_t g = 0; g < w.size(); ++g) {
      EXPECT_GE(w[g], 0.0);
      if (a[g] > 0.0) {
        EXPECT_GT(w[g], 0.0);
      }
      sum += w[g];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    // a_g / w_g - lam (ln w_g + 1) is the same for every g with a_g > 0.
    const double ref = a[0] / w[0] - lam * (std::log(w[0]) + 1.0);
    for (std::size_t g = 1; g + 1 < a.size(); ++g) {
      EXPECT_NEAR(a[g] / w[g] - lam * (std::log(w[g]) + 1.0), ref, 1e-8 * std::max(1.0, std::abs(ref)))
          << "lam=" << lam << " g=" << g;
    }
    // Nearby points of the simplex do no better.
    auto f = [&](const std::vector<double>& v) {
      double s = 0.0;
      for (std::size_t g = 0; g < v.size(); ++g) {
        if (a[g] > 0.0) s += a[g] * std::log(v[g]);
        if (v[g] > 0.0) s -= lam * v[g] * std::log(v[g]);
      }
      return s;
    };
    for (std::size_t g = 0; g + 2 < w.size(); ++g) {
      auto v = w;
      const double d = 1e-4 * std::min(v[g], v[g + 1]);
      v[g] += d;
      v[g + 1] -= d;
      EXPECT_LE(f(v), f(w) + 1e-15);
    }
  }
  std::vector<double> w(a.size());
  double nu = 0.0;
  detail::entropic_m_step(a, 0.0, w, nu);
  EXPECT_EQ(w, a);
}

FitOptions coarse(double lambda, std::uint64_t iters) {
  FitOptions o;
  o.grid_step = 0.1;
  o.lambda = lambda;
  o.iterations = iters;
  return o;
}

TEST(Fit, PointDataConcentrates) {
  const std::vector<double> z(50, 0.0);
  const auto mix = fit_mixing_distribution(z, coarse(0.0, 2000));
  mix.validate();
  double near = 0.0;
  for (std::size_t g = 0; g < mix.grid.size(); ++g) {
    if (std::abs(mix.grid[g]) <= 0.1 + 1e-12) near += mix.weights[g];
  }
  EXPECT_GE(near, 0.99);
}

TEST(Fit, LargeLambdaIsNearlyUniform) {
  const auto z = load_screen_scores(data_dir() + "/screens_sample.tsv");
  FitOptions o = coarse(1e3, 50);
  const auto mix = fit_mixing_distribution(z, o);
  const double G = static_cast<double>(mix.grid.size());
  double kl = 0.0;
  for (double w : mix.weights) kl += w * std::log(w * G);
  EXPECT_LE(kl, 1e-3);
}

TEST(Fit, EmObjectiveNonDecreasing) {
  const auto z = load_screen_scores(data_dir() + "/screens_sample.tsv");
  std::vector<double> trace;
  fit_mixing_distribution(z, coarse(0.0, 400), &trace);
  ASSERT_EQ(trace.size(), 400u);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i], trace[i - 1] - 1e-12) << i;
  std::vector<double> trace2;
  fit_mixing_distribution(z, coarse(1e-2, 400), &trace2);
  for (std::size_t i = 1; i < trace2.size(); ++i) EXPECT_GE(trace2[i], trace2[i - 1] - 1e-12) << i;
}

TEST(Fit, PermutationAndReplicationInvariant) {
  auto z = load_screen_scores(data_dir() + "/screens_sample.tsv");
  const auto base = fit_mixing_distribution(z, coarse(1e-4, 200));
  std::reverse(z.begin(), z.end());
  const auto rev = fit_mixing_distribution(z, coarse(1e-4, 200));
  auto twice = z;
  twice.insert(twice.end(), z.begin(), z.end());
  const auto dup = fit_mixing_distribution(twice, coarse(1e-4, 200));
  for (std::size_t g = 0; g < base.weights.size(); ++g) {
    EXPECT_NEAR(rev.weights[g], base.weights[g], 1e-10);
    EXPECT_NEAR(dup.weights[g], base.weights[g], 1e-10);
  }
  EXPECT_NEAR(dup.nll, base.nll, 1e-10);
}

TEST(Fit, EntropyTradeOff) {
  const auto z = load_screen_scores(data_dir() + "/screens_sample.tsv");
  const std::vector<double> lambdas{0.0, 1e-3, 1e-2, 1e-1};
  std::vector<MixingDistribution> fits;
  for (double l : lambdas) fits.push_back(fit_mixing_distribution(z, coarse(l, 3000)));
  for (std::size_t i = 1; i < fits.size(); ++i) {
    EXPECT_LE(fits[i - 1].entropy(), fits[i].entropy() + 1e-6);
    EXPECT_LE(fits[i - 1].nll, fits[i].nll + 1e-6);
  }
}

TEST(Fit, Rejections) {
  EXPECT_THROW(fit_mixing_distribution({}, FitOptions{}), std::invalid_argument);
  EXPECT_THROW(fit_mixing_distribution({1.0, NAN}, FitOptions{}), std::invalid_argument);
  FitOptions o;
  o.lambda = -1.0;
  EXPECT_THROW(fit_mixing_distribution({1.0}, o), std::invalid_argument);
  o = FitOptions{};
  o.grid_step = 0.03;
  EXPECT_THROW(fit_mixing_distribution({1.0}, o), std::invalid_argument);
}

TEST(Synth, PointMass) {
  MixingDistribution mix;
  mix.grid = {-1.0, 0.0, 1.0};
  mix.weights = {0.0, 1.0, 0.0};
  Rng rng(1);
  const auto inst = synth_from_mixture(mix, 500, rng);
  for (double m : inst.means()) EXPECT_EQ(m, 0.0);
  EXPECT_DOUBLE_EQ(inst.max_sub_gaussian_proxy(), 1.0);
}

TEST(Synth, SpikeFrequencyAndDeterminism) {
  MixingDistribution mix;
  mix.grid = {0.0, 1.0};
  mix.weights = {0.97, 0.03};
  Rng rng(2);
  const auto inst = synth_from_mixture(mix, 10000, rng);
  const auto means = inst.means();
  const auto nonzero = std::count_if(means.begin(), means.end(), [](double m) { return m != 0.0; });
  // Binomial(10^4, 0.03): sd about 17.
  EXPECT_NEAR(static_cast<double>(nonzero), 300.0, 4.0 * std::sqrt(10000 * 0.03 * 0.97));
  Rng again(2);
  EXPECT_EQ(synth_from_mixture(mix, 10000, again).means(), means);
  mix.weights = {0.5, 0.6};
  EXPECT_THROW(synth_from_mixture(mix, 1, rng), std::invalid_argument);
}

}  // namespace
}  // namespace infucb
