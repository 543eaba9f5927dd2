// Copyright 2026 The flexload Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "flexload/distribution.hpp"
#include "flexload/price_model.hpp"

namespace flexload {
namespace {

using D = InnovationDistribution;

PriceModel single_stage(D energy, D reserve) {
  return PriceModel({StageInnovations{std::move(energy), std::move(reserve), {}}});
}

TEST(EffectivePrice, SubtractsPositiveReserveOnly) {
  EXPECT_EQ(effective_price({5, 1}), 4);
  EXPECT_EQ(effective_price({7, 0}), 7);
  EXPECT_EQ(effective_price({3, -2}), 3);
}

TEST(EffectivePrice, NeverAboveEnergyPrice) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int k = 0; k < 10000; ++k) {
    const PricePair p{u(rng), u(rng)};
    const double a = effective_price(p);
    EXPECT_LE(a, p.energy);
    EXPECT_EQ(a == p.energy, p.reserve <= 0);
  }
}

TEST(EffectiveCdf, PointMassIsRightContinuous) {
  const auto m = single_stage(D::point_mass(2), D::point_mass(0));
  EXPECT_EQ(effective_cdf(m, 0, 1), 0);
  EXPECT_EQ(effective_cdf(m, 0, 2), 1);
}

TEST(EffectiveCdf, EmpiricalCountsSamples) {
  const auto m = single_stage(D::empirical({{1, 1}, {3, 1}}), D::point_mass(0));
  EXPECT_EQ(effective_cdf(m, 0, 2), 0.5);
}

TEST(EffectiveCdf, EmpiricalMatchesWeightedFraction) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<JointSample> joint;
  for (int k = 0; k < 40; ++k) joint.push_back({u(rng), u(rng), 1.0 + k % 3});
  double total = 0;
  for (const auto& s : joint) total += s.weight;
  PriceModel m({StageInnovations{D::point_mass(0), D::point_mass(0), joint}});
  for (double x = -10; x <= 10; x += 0.37) {
    double below = 0;
    for (const auto& s : joint) {
      if (s.energy - std::max(s.reserve, 0.0) <= x) below += s.weight;
    }
    EXPECT_NEAR(effective_cdf(m, 0, x), below / total, 1e-15) << x;
  }
}

TEST(EffectiveCdf, RejectsSeasonalModels) {
  PriceModel m({StageInnovations{}}, std::vector<AffineSeasonality>{{0, 1, 0, 0}}, {3, 0});
  EXPECT_THROW(effective_cdf(m, 0, 1.0), ValidationError);
}

// Nondecreasing, 0 far left, 1 far right, on 100 points per stage for every
// distribution kind.
TEST(EffectiveCdf, IsADistributionFunction) {
  std::vector<StageInnovations> stages = {
      {D::gaussian(30, 10), D::point_mass(4), {}},
      {D::gaussian(30, 10), D::gaussian(2, 3), {}},
      {D::point_mass(12), D::gaussian(-1, 2), {}},
      {D::empirical({{10, 1}, {20, 2}, {35, 1}}), D::empirical({{-1, 1}, {3, 1}}), {}},
      {D::tabulated_cdf({0, 10, 40}, {0, 0.3, 1}), D::point_mass(1), {}},
  };
  PriceModel m(stages);
  for (int t = 0; t < m.horizon(); ++t) {
    double prev = 0;
    for (int k = 0; k < 100; ++k) {
      const double x = -100 + 3.0 * k;
      const double f = effective_cdf(m, t, x);
      EXPECT_GE(f, prev - 1e-12) << "t=" << t << " x=" << x;
      EXPECT_GE(f, 0);
      EXPECT_LE(f, 1);
      prev = f;
    }
    EXPECT_NEAR(effective_cdf(m, t, -1e6), 0, 1e-12);
    EXPECT_NEAR(effective_cdf(m, t, 1e6), 1, 1e-12);
  }
}

// Gaussian energy, point-mass reserve: just a shifted normal CDF.
TEST(EffectiveCdf, GaussianWithKnownReserveMatchesErfc) {
  const auto m = single_stage(D::gaussian(30, 10), D::point_mass(4));
  for (double x = -10; x <= 70; x += 2.5) {
    const double want = 0.5 * std::erfc(-((x + 4) - 30) / (10 * std::sqrt(2.0)));
    EXPECT_NEAR(effective_cdf(m, 0, x), want, 1e-12);
  }
}

TEST(SamplePath, DeterministicStagesReproduceThePath) {
  const auto m = PriceModel::deterministic({{5, 1}, {7, 0}});
  const auto path = m.sample_path(99);
  ASSERT_EQ(path.size(), 2u);
  EXPECT_EQ(path[0], (PricePair{5, 1}));
  EXPECT_EQ(path[1], (PricePair{7, 0}));
}

TEST(SamplePath, SameSeedSamePath) {
  PriceModel m({{D::gaussian(30, 10), D::gaussian(3, 1), {}},
                {D::empirical({{1, 1}, {2, 1}}), D::point_mass(0), {}}});
  EXPECT_EQ(m.sample_path(42), m.sample_path(42));
  EXPECT_NE(m.sample_path(42), m.sample_path(43));
}

TEST(SamplePath, GaussianMeansWithinThreeSigma) {
  const std::vector<double> means = {20, 35, 50};
  std::vector<StageInnovations> stages;
  for (double mu : means) stages.push_back({D::gaussian(mu, 10), D::point_mass(0), {}});
  PriceModel m(stages);
  constexpr int n = 100000;
  std::vector<double> sum(means.size(), 0.0);
  for (int k = 0; k < n; ++k) {
    const auto p = m.sample_path(static_cast<std::uint64_t>(k) * 7919 + 1);
    for (std::size_t t = 0; t < means.size(); ++t) sum[t] += p[t].energy;
  }
  for (std::size_t t = 0; t < means.size(); ++t) {
    EXPECT_NEAR(sum[t] / n, means[t], 3 * 10 / std::sqrt(double(n))) << t;
  }
}

TEST(SamplePath, SeasonalMeanFollowsPreviousPrice) {
  // Fully persistent prices: pi_t = pi_{t-1}.
  PriceModel m({StageInnovations{}, StageInnovations{}, StageInnovations{}},
               std::vector<AffineSeasonality>(3, {0, 1, 0, 0}), {17, 0});
  for (const auto& p : m.sample_path(3)) EXPECT_EQ(p.energy, 17);
}

TEST(PriceModel, RejectsDecreasingSeasonality) {
  EXPECT_THROW(PriceModel({StageInnovations{}},
                          std::vector<AffineSeasonality>{{0, -0.5, 0, 0}}, {}),
               ValidationError);
}

TEST(PriceModel, SliceKeepsStages) {
  const auto m = PriceModel::deterministic({{1, 0}, {2, 0}, {3, 0}, {4, 0}});
  const auto s = m.slice(1, 3);
  ASSERT_EQ(s.horizon(), 2);
  EXPECT_EQ(s.sample_path(0), (std::vector<PricePair>{{2, 0}, {3, 0}}));
  EXPECT_THROW(m.slice(2, 5), ValidationError);
}

TEST(PriceModel, WithoutReserveZeroesReservePrices) {
  const auto m = PriceModel::deterministic({{5, 1}, {7, 3}}).without_reserve();
  for (const auto& p : m.sample_path(1)) EXPECT_EQ(p.reserve, 0);
}

TEST(Distribution, TabulatedCdfInterpolates) {
  const auto d = D::tabulated_cdf({0, 10, 20}, {0, 0.5, 1});
  EXPECT_DOUBLE_EQ(d.cdf(5), 0.25);
  EXPECT_DOUBLE_EQ(d.cdf(15), 0.75);
  EXPECT_DOUBLE_EQ(d.mean(), 10);
  EXPECT_THROW(D::tabulated_cdf({0, 1}, {0, 0.5}), ValidationError);
}

TEST(Distribution, RejectsBadParameters) {
  EXPECT_THROW(D::gaussian(0, 0), ValidationError);
  EXPECT_THROW(D::empirical({}), ValidationError);
  EXPECT_THROW(D::point_mass(NAN), ValidationError);
}

}  // namespace
}  // namespace flexload
