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

#include "flexload/threshold_engine.hpp"
#include "flexload/worker_pool.hpp"
#include "support/oracles.hpp"

namespace flexload {
namespace {

using D = InnovationDistribution;
constexpr double kInf = std::numeric_limits<double>::infinity();

EffectivePriceDistribution point_at(double v) {
  return EffectivePriceDistribution(D::point_mass(v), D::point_mass(0));
}

// T = 2, capacity 1, penalty 10, effective prices 4 then 7.
PriceModel worked_model() { return PriceModel::deterministic({{5, 1}, {7, 0}}); }
LoadSpec worked_spec() { return {1.5, 1.0, 2, 10.0}; }

// Random independent model mixing every distribution kind.
PriceModel random_model(std::mt19937_64& rng, int T) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<StageInnovations> stages;
  for (int t = 0; t < T; ++t) {
    StageInnovations s;
    switch (rng() % 4) {
      case 0:
        s.energy = D::point_mass(std::round(40 * u(rng)));
        break;
      case 1:
        s.energy = D::gaussian(10 + 30 * u(rng), 1 + 9 * u(rng));
        break;
      case 2: {
        std::vector<WeightedValue> w;
        for (int k = 0; k < 4; ++k) w.push_back({50 * u(rng), 0.1 + u(rng)});
        s.energy = D::empirical(w);
        break;
      }
      default:
        s.energy = D::tabulated_cdf({0, 15, 25, 60}, {0, 0.2, 0.7, 1});
    }
    s.reserve = rng() % 2 ? D::point_mass(6 * u(rng) - 1) : D::gaussian(2, 2);
    stages.push_back(std::move(s));
  }
  return PriceModel(stages);
}

TEST(GIntegral, PointMassClosedForm) {
  EXPECT_EQ(g_integral(point_at(2), Threshold::at(1), 3), 1);
  EXPECT_EQ(g_integral(point_at(2), Threshold::at(2.5), 3), 0.5);
  EXPECT_EQ(g_integral(point_at(5), Threshold::at(1), 3), 0);
  EXPECT_EQ(g_integral(point_at(2), Threshold::below_all(), 3), 1);
}

TEST(GIntegral, EmptyIntervalIsZero) {
  EXPECT_EQ(g_integral(point_at(2), Threshold::at(3), 3), 0);
  EffectivePriceDistribution g(D::gaussian(0, 1), D::point_mass(0));
  EXPECT_EQ(g_integral(g, Threshold::at(0.3), 0.3), 0);
}

TEST(GIntegral, EmpiricalStepArea) {
  EffectivePriceDistribution d(D::empirical({{1, 1}, {3, 1}}), D::point_mass(0));
  EXPECT_DOUBLE_EQ(g_integral(d, Threshold::at(0), 4), 2);
  const double quad = testing::integrate_split([&](double x) { return d.cdf(x); }, 0, 4,
                                               {1, 3});
  EXPECT_NEAR(quad, 2, 1e-12);
}

TEST(GIntegral, RejectsReversedInterval) {
  EXPECT_THROW(g_integral(point_at(0), Threshold::at(2), 1), ValidationError);
}

TEST(GIntegral, StaysInsideItsBounds) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20, 80);
  auto model = random_model(rng, 24);
  for (int t = 0; t < model.horizon(); ++t) {
    const auto dist = model.effective_distribution(t);
    for (int k = 0; k < 50; ++k) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      const double g = g_integral(dist, Threshold::at(a), b);
      EXPECT_GE(g, 0);
      EXPECT_LE(g, b - a);
    }
  }
}

// Library G against an independent adaptive Simpson over the library CDF,
// cut at every place the CDF has a jump or kink.
TEST(GIntegral, MatchesQuadratureForEveryKind) {
  struct Case {
    StageInnovations stage;
    std::vector<double> cuts;
    double tol;
  };
  const std::vector<Case> cases = {
      {{D::gaussian(30, 10), D::point_mass(4), {}}, {}, 1e-10},
      {{D::gaussian(30, 10), D::gaussian(1, 2), {}}, {}, 1e-9},
      {{D::point_mass(25), D::gaussian(3, 4), {}}, {25}, 1e-9},
      {{D::empirical({{10, 1}, {22, 3}}), D::empirical({{-2, 1}, {2, 1}}), {}},
       {10, 20, 22, 12}, 1e-12},
      {{D::tabulated_cdf({0, 15, 25, 60}, {0, 0.2, 0.7, 1}), D::point_mass(2), {}},
       {-2, 13, 23, 58}, 1e-10},
      {{D::point_mass(0), D::point_mass(0), {{10, 2, 1}, {30, -1, 2}, {18, 5, 1}}},
       {8, 30, 13}, 1e-12},
  };
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const PriceModel m({cases[c].stage});
    const auto dist = m.effective_distribution(0);
    for (auto [z, zp] : std::vector<std::pair<double, double>>{
             {-5, 70}, {12, 24}, {0, 15}, {26, 31}, {21.5, 21.75}}) {
      const double quad = testing::integrate_split([&](double x) { return dist.cdf(x); },
                                                   z, zp, cases[c].cuts);
      EXPECT_NEAR(g_integral(dist, Threshold::at(z), zp), quad, cases[c].tol)
          << "case " << c << " [" << z << ", " << zp << "]";
    }
  }
}

TEST(CompileIndependent, WorkedInstance) {
  const auto table = compile_independent(worked_spec(), worked_model());
  EXPECT_TRUE(table.at(0, 0).is_below_all());
  EXPECT_EQ(table.value(1, 1), 7);
  EXPECT_EQ(table.value(1, 2), 10);
  EXPECT_EQ(table.value(0, 1), 4);
  EXPECT_EQ(table.value(0, 2), 7);
  EXPECT_EQ(table.value(2, 1), 10);
  EXPECT_EQ(table.value(2, 2), 10);
  EXPECT_EQ(value_function(table, worked_spec(), 1.5), 7.5);
}

TEST(CompileIndependent, TerminalRowIsThePenalty) {
  std::mt19937_64 rng(8);
  const auto table = compile_independent({0, 2, 9, 33.5}, random_model(rng, 9));
  for (double v : table.row(9)) EXPECT_EQ(v, 33.5);
}

TEST(CompileIndependent, PricesAbovePenaltyLeaveTableConstant) {
  std::vector<StageInnovations> stages(
      5, StageInnovations{D::gaussian(500, 5), D::point_mass(0), {}});
  const auto table = compile_independent({0, 1, 5, 20}, PriceModel(stages));
  for (int t = 0; t <= 5; ++t) {
    for (double v : table.row(t)) EXPECT_EQ(v, 20) << t;
  }
}

TEST(CompileIndependent, DeterministicEqualsHandRecursionExactly) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> price(-5, 60), len(1, 12);
  for (int rep = 0; rep < 200; ++rep) {
    const int T = len(rng);
    std::vector<PricePair> path;
    std::vector<double> eff;
    for (int t = 0; t < T; ++t) {
      path.push_back({0.5 * price(rng), 0.25 * price(rng) - 2});
      eff.push_back(effective_price(path.back()));
    }
    const double pen = 0.5 * price(rng) + 5;
    const auto table = compile_independent({0, 1, T, pen}, PriceModel::deterministic(path));
    const auto want = testing::deterministic_thresholds(eff, pen);
    for (int t = 0; t <= T; ++t) {
      for (int i = 1; i <= T; ++i) ASSERT_EQ(table.value(t, i), want[t][i]);
    }
  }
}

// With known prices the optimum buys the cheapest slots first.
TEST(ValueFunction, DeterministicMatchesGreedy) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 50);
  for (int rep = 0; rep < 200; ++rep) {
    const int T = 1 + static_cast<int>(rng() % 8);
    std::vector<PricePair> path;
    std::vector<double> eff;
    for (int t = 0; t < T; ++t) {
      path.push_back({u(rng), u(rng) / 5});
      eff.push_back(effective_price(path.back()));
    }
    const double cap = 0.5 + u(rng) / 25, pen = u(rng) + 5;
    const LoadSpec spec{0, cap, T, pen};
    const auto table = compile_independent(spec, PriceModel::deterministic(path));
    for (double d : {0.0, 0.3 * cap, cap, 2.7 * cap, T * cap, (T + 1.5) * cap}) {
      EXPECT_NEAR(value_function(table, spec, d),
                  testing::greedy_deterministic_cost(eff, d, cap, pen), 1e-10);
    }
  }
}

TEST(ValueFunction, Examples) {
  const auto table = compile_independent(worked_spec(), worked_model());
  EXPECT_EQ(value_function(table, worked_spec(), 0), 0);
  EXPECT_EQ(value_function(table, worked_spec(), 1.5), 7.5);

  std::vector<StageInnovations> dear(3, {D::point_mass(99), D::point_mass(0), {}});
  const LoadSpec spec{0, 1, 3, 10};
  const auto flat = compile_independent(spec, PriceModel(dear));
  EXPECT_EQ(value_function(flat, spec, 4), 40);
}

TEST(ThresholdTable, InvariantsOnRandomModels) {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 30; ++rep) {
    const int T = 1 + static_cast<int>(rng() % 30);
    const auto table = compile_independent({0, 1, T, 45}, random_model(rng, T));
    for (int t = 0; t < T; ++t) {
      for (int i = 1; i <= T; ++i) {
        const double m = table.value(t, i);
        if (i > 1) {
          EXPECT_LE(table.value(t, i - 1), m);
        }
        EXPECT_LE(m, table.value(t + 1, i));
        EXPECT_TRUE(table.at(t + 1, i - 1).at_or_below(m));
      }
    }
    EXPECT_TRUE(value_curve(table, 0).is_convex());
  }
}

TEST(ThresholdTable, ValueFunctionMidpointConvex) {
  std::mt19937_64 rng(12);
  const LoadSpec spec{0, 0.7, 10, 45};
  const auto table = compile_independent(spec, random_model(rng, 10));
  std::uniform_real_distribution<double> u(0, 8);
  for (int k = 0; k < 2000; ++k) {
    const double a = u(rng), b = u(rng);
    EXPECT_LE(value_function(table, spec, 0.5 * (a + b)),
              0.5 * (value_function(table, spec, a) + value_function(table, spec, b)) + 1e-9);
  }
}

TEST(AugmentHorizon, MatchesRecompute) {
  std::mt19937_64 rng(5);
  const auto model = random_model(rng, 12);
  for (int tail : {1, 2, 5, 11}) {
    const LoadSpec part{0, 1, tail, 40}, full{0, 1, 12, 40};
    const auto short_table = compile_independent(part, model.suffix(12 - tail));
    const auto extended = augment_horizon(short_table, full, model);
    EXPECT_EQ(extended, compile_independent(full, model)) << tail;
    // The copied rows are the old rows, shifted.
    for (int t = 0; t <= tail; ++t) {
      for (int i = 1; i <= tail; ++i) {
        EXPECT_EQ(extended.value(t + 12 - tail, i), short_table.value(t, i));
      }
    }
  }
}

TEST(AugmentHorizon, ZeroStagesIsIdentity) {
  const auto table = compile_independent(worked_spec(), worked_model());
  EXPECT_EQ(augment_horizon(table, worked_spec(), worked_model()), table);
}

TEST(AugmentHorizon, RejectsMismatchedCapacityOrPenalty) {
  const auto table = compile_independent(worked_spec(), worked_model());
  const auto longer = PriceModel::deterministic({{1, 0}, {5, 1}, {7, 0}});
  EXPECT_THROW(augment_horizon(table, {0, 2, 3, 10}, longer), ValidationError);
  EXPECT_THROW(augment_horizon(table, {0, 1, 3, 11}, longer), ValidationError);
  EXPECT_NO_THROW(augment_horizon(table, {0, 1, 3, 10}, longer));
}

TEST(CompileIndependent, SameTableForAnyWorkerCount) {
  std::mt19937_64 rng(77);
  const auto model = random_model(rng, 60);
  const LoadSpec spec{0, 1, 60, 50};
  const auto serial = compile_independent(spec, model);
  for (unsigned w : {1u, 2u, 4u}) {
    WorkerPool pool(w);
    EXPECT_EQ(compile_independent(spec, model, {&pool}).digest(), serial.digest()) << w;
  }
}

TEST(CompileIndependent, RejectsBadInputs) {
  PriceModel seasonal({StageInnovations{}}, std::vector<AffineSeasonality>{{0, 1, 0, 0}}, {});
  EXPECT_THROW(compile_independent({0, 1, 1, 10}, seasonal), ValidationError);
  EXPECT_THROW(compile_independent({0, 1, 2, kInf}, worked_model()), ValidationError);
  EXPECT_THROW(compile_independent({0, 1, 3, 10}, worked_model()), ValidationError);
  EXPECT_THROW(compile_independent({0, 0, 2, 10}, worked_model()), ValidationError);
}

TEST(ClassifyRegion, ThreeRegions) {
  EXPECT_EQ(classify_region(3, Threshold::at(4), Threshold::at(7)), ConsumptionRegion::consume);
  EXPECT_EQ(classify_region(4, Threshold::at(4), Threshold::at(7)), ConsumptionRegion::consume);
  EXPECT_EQ(classify_region(5, Threshold::at(4), Threshold::at(7)), ConsumptionRegion::partially_consume);
  EXPECT_EQ(classify_region(7, Threshold::at(4), Threshold::at(7)), ConsumptionRegion::partially_consume);
  EXPECT_EQ(classify_region(8, Threshold::at(4), Threshold::at(7)), ConsumptionRegion::do_not_consume);
  EXPECT_EQ(classify_region(-1e9, Threshold::below_all(), Threshold::at(7)),
            ConsumptionRegion::partially_consume);
}

}  // namespace
}  // namespace flexload
