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

#include "flexload/oracle.hpp"
#include "flexload/policy.hpp"
#include "flexload/threshold_engine.hpp"

namespace flexload {
namespace {

using D = InnovationDistribution;

const LoadSpec kWorked{1.5, 1.0, 2, 10.0};
ThresholdTable worked_table() {
  return compile_independent(kWorked, PriceModel::deterministic({{5, 1}, {7, 0}}));
}

PriceModel random_discrete_model(std::mt19937_64& rng, int T, double scale = 1.0) {
  std::uniform_int_distribution<int> v(0, 80);
  std::vector<StageInnovations> stages;
  for (int t = 0; t < T; ++t) {
    std::vector<JointSample> joint;
    for (int k = 0; k < 3; ++k) {
      joint.push_back({scale * 0.5 * v(rng), scale * (0.25 * v(rng) - 4), 1.0 + k});
    }
    stages.push_back({D::point_mass(0), D::point_mass(0), joint});
  }
  return PriceModel(stages);
}

void expect_feasible(const Decision& dec, double d, double cap) {
  EXPECT_GE(dec.reserve_offer, 0);
  EXPECT_LE(dec.reserve_offer, dec.consume);
  EXPECT_LE(dec.consume, std::min(d, cap));
}

TEST(OptimalDecision, WorkedInstance) {
  const auto table = worked_table();
  const Decision first = optimal_decision(table, {1.5, 0}, {5, 1}, kWorked);
  EXPECT_EQ(first, (Decision{1, 1}));
  const Decision second = optimal_decision(table, {0.5, 1}, {7, 0}, kWorked);
  EXPECT_EQ(second, (Decision{0.5, 0.5}));
}

TEST(OptimalDecision, NoDemandNoAction) {
  EXPECT_EQ(optimal_decision(worked_table(), {0, 0}, {5, 1}, kWorked), (Decision{0, 0}));
}

TEST(OptimalDecision, PriceAboveEveryThresholdBuysNothing) {
  const auto table = worked_table();
  for (double d : {0.5, 1.0, 2.0, 2.5, 4.0}) {
    EXPECT_EQ(optimal_decision(table, {d, 0}, {11, 0}, kWorked), (Decision{0, 0})) << d;
    EXPECT_EQ(optimal_decision(table, {d, 1}, {10.5, 0}, kWorked), (Decision{0, 0})) << d;
  }
}

// Demand past T * capacity can never be met, so it is worth the penalty:
// buy it only below the penalty.
TEST(OptimalDecision, ExcessDemandComparesAgainstPenalty) {
  const auto table = worked_table();
  EXPECT_EQ(optimal_decision(table, {2.5, 1}, {9, 0}, kWorked).consume, 1);
  EXPECT_EQ(optimal_decision(table, {2.5, 1}, {10, 0}, kWorked).consume, 1);
}

TEST(OptimalDecision, RejectsStageOutOfRange) {
  EXPECT_THROW(optimal_decision(worked_table(), {1, 2}, {5, 1}, kWorked), ValidationError);
  EXPECT_THROW(optimal_decision(worked_table(), {1, -1}, {5, 1}, kWorked), ValidationError);
}

TEST(ReserveRule, Examples) {
  EXPECT_EQ(reserve_rule(1.0, 2.5), 1.0);
  EXPECT_EQ(reserve_rule(1.0, -0.1), 0);
  EXPECT_EQ(reserve_rule(0, 5), 0);
  EXPECT_EQ(reserve_rule(0.7, 0), 0.7);
}

// For fixed (t, d) the consumption is a nonincreasing step function of the
// effective price, stepping exactly at the two thresholds around the piece
// holding d.
TEST(OptimalDecision, RegionConsistency) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 40; ++rep) {
    const int T = 2 + rep % 6;
    const LoadSpec spec{0, 1, T, 30};
    const auto table = compile_independent(spec, random_discrete_model(rng, T));
    for (int t = 0; t < T; ++t) {
      for (double d : {0.25, 1.0, 1.5, 2.75, double(T)}) {
        if (d > T) continue;
        const int k = static_cast<int>(std::ceil(d - 1e-12));
        const Threshold lower = table.at(t + 1, k - 1);
        const Threshold upper = table.at(t + 1, k);
        double last = INFINITY;
        for (double p = -10; p <= 45; p += 0.125) {
          const double e = optimal_decision(table, {d, t}, {p, 0}, spec).consume;
          EXPECT_LE(e, last);
          last = e;
          switch (classify_region(p, lower, upper)) {
            case ConsumptionRegion::consume:
              EXPECT_EQ(e, std::min(d, 1.0));
              break;
            case ConsumptionRegion::partially_consume:
              EXPECT_DOUBLE_EQ(e, d - (k - 1));
              break;
            case ConsumptionRegion::do_not_consume:
              EXPECT_EQ(e, 0);
              break;
          }
        }
      }
    }
  }
}

// Scaling prices and the penalty by a power of two is exact in binary
// floating point, so decisions must not move at all.
TEST(OptimalDecision, ScaleInvariant) {
  for (double scale : {0.25, 2.0, 8.0}) {
    std::mt19937_64 a(71), b(71);
    const int T = 5;
    const LoadSpec base{3, 1, T, 25}, scaled{3, 1, T, 25 * scale};
    const auto m1 = random_discrete_model(a, T);
    const auto m2 = random_discrete_model(b, T, scale);
    const auto t1 = compile_independent(base, m1);
    const auto t2 = compile_independent(scaled, m2);
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto path = m1.sample_path(s);
      for (int t = 0; t < T; ++t) {
        const PricePair p = path[static_cast<std::size_t>(t)];
        for (double d : {0.5, 1.0, 2.25, 3.0}) {
          EXPECT_EQ(optimal_decision(t1, {d, t}, p, base),
                    optimal_decision(t2, {d, t}, {p.energy * scale, p.reserve * scale}, scaled));
        }
      }
    }
  }
}

TEST(OptimalDecision, ActionsAreBellmanMinimizers) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 15; ++rep) {
    const auto inst = oracle::random_independent(rng, {4, 4, 0.25});
    const auto table = compile_independent(inst.spec, oracle::to_price_model(inst));
    const auto rep_ = oracle::compare(inst, oracle::solve_dp(inst), table);
    EXPECT_TRUE(rep_.actions_optimal()) << rep_.first_mismatch;
    EXPECT_LT(rep_.max_value_error, 1e-9);
  }
}

TEST(Baseline, Immediate) {
  const LoadSpec spec{2, 1, 4, 30};
  EXPECT_EQ(baseline_decision(PolicyKind::immediate, {0.4, 1}, {5, 2}, spec, {}),
            (Decision{0.4, 0}));
  EXPECT_EQ(baseline_decision(PolicyKind::immediate, {1.7, 0}, {5, 2}, spec, {}),
            (Decision{1, 0}));
}

TEST(Baseline, UniformRateSpreadsInitialDemand) {
  const LoadSpec spec{2, 1, 4, 30};
  BaselineAux aux;
  aux.initial_demand = 2;
  const auto path = std::vector<PricePair>(4, {5, 1});
  const auto r = rollout(spec, path, [&](const LoadState& s, PricePair p) {
    return baseline_decision(PolicyKind::uniform_rate, s, p, spec, aux);
  });
  for (const auto& step : r.steps) EXPECT_EQ(step.decision, (Decision{0.5, 0}));
  EXPECT_EQ(r.terminal_demand, 0);
}

TEST(Baseline, NoReserveMatchesOptimalWhenReservePricesAreZero) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> v(0, 60);
  const int T = 6;
  std::vector<StageInnovations> stages;
  for (int t = 0; t < T; ++t) {
    stages.push_back({D::empirical({{0.5 * v(rng), 1}, {0.5 * v(rng), 2}}), D::point_mass(0), {}});
  }
  const PriceModel m(stages);
  const LoadSpec spec{3.5, 1, T, 28};
  const auto with = compile_independent(spec, m);
  const auto without = compile_independent(spec, m.without_reserve());
  BaselineAux aux{&without, spec.demand};
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto path = m.sample_path(s);
    for (int t = 0; t < T; ++t) {
      for (double d : {0.5, 2.0, 3.5}) {
        const PricePair p = path[static_cast<std::size_t>(t)];
        const Decision opt = optimal_decision(with, {d, t}, p, spec);
        const Decision base = baseline_decision(PolicyKind::no_as_optimal, {d, t}, p, spec, aux);
        EXPECT_EQ(opt.consume, base.consume);
        EXPECT_EQ(base.reserve_offer, 0);
      }
    }
  }
}

TEST(Baseline, NeedsItsTable) {
  EXPECT_THROW(baseline_decision(PolicyKind::no_as_optimal, {1, 0}, {5, 0}, kWorked, {}),
               ValidationError);
  EXPECT_THROW(baseline_decision(PolicyKind::certainty_equivalent, {1, 0}, {5, 0}, kWorked, {}),
               ValidationError);
}

TEST(Rollout, FeasibleAndConservesDemand) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    const int T = 1 + rep % 8;
    const auto m = random_discrete_model(rng, T);
    const LoadSpec spec{0.37 * (rep % 11), 0.8, T, 35};
    const auto table = compile_independent(spec, m);
    const auto r = rollout(spec, m.sample_path(static_cast<std::uint64_t>(rep)),
                           [&](const LoadState& s, PricePair p) {
                             const auto dec = optimal_decision(table, s, p, spec);
                             expect_feasible(dec, s.remaining_demand, spec.capacity);
                             return dec;
                           });
    double used = r.terminal_demand, cost = r.terminal_cost;
    for (const auto& s : r.steps) {
      used += s.decision.consume;
      cost += s.stage_cost;
    }
    EXPECT_NEAR(used, spec.demand, 1e-12);
    EXPECT_NEAR(cost, r.total_cost, 1e-9);
    EXPECT_GE(r.terminal_demand, 0);
  }
}

TEST(Rollout, WorkedInstanceCost) {
  const auto table = worked_table();
  const std::vector<PricePair> path{{5, 1}, {7, 0}};
  const auto r = rollout(kWorked, path, [&](const LoadState& s, PricePair p) {
    return optimal_decision(table, s, p, kWorked);
  });
  EXPECT_EQ(r.total_cost, 7.5);
  EXPECT_EQ(r.terminal_demand, 0);
  EXPECT_EQ(r.reserve_offered, 1.5);
}

TEST(Rollout, RejectsInfeasibleRule) {
  const std::vector<PricePair> path{{5, 1}, {7, 0}};
  EXPECT_THROW(rollout(kWorked, path, [](const LoadState&, PricePair) { return Decision{2, 0}; }),
               ValidationError);
  EXPECT_THROW(rollout(kWorked, path, [](const LoadState&, PricePair) { return Decision{1, 1.5}; }),
               ValidationError);
  EXPECT_THROW(rollout(kWorked, std::vector<PricePair>{{5, 1}},
                       [](const LoadState&, PricePair) { return Decision{}; }),
               ValidationError);
}

// Offering reserve at a nonnegative price can only lower the expected
// optimum, since the effective price never exceeds the energy price.
TEST(ReserveValue, LowersExpectedCost) {
  std::mt19937_64 rng(44);
  for (int rep = 0; rep < 30; ++rep) {
    const int T = 1 + rep % 10;
    std::vector<StageInnovations> stages;
    for (int t = 0; t < T; ++t) {
      stages.push_back({D::gaussian(20 + t, 6), D::point_mass(0.5 * (rep % 5)), {}});
    }
    const PriceModel m(stages);
    const LoadSpec spec{0, 1, T, 60};
    const auto with = compile_independent(spec, m);
    const auto without = compile_independent(spec, m.without_reserve());
    for (double d = 0; d <= T + 1; d += 0.5) {
      EXPECT_LE(value_function(with, spec, d), value_function(without, spec, d) + 1e-9);
    }
  }
}

// ...but not on every path. Buying at pi^a = 8 (energy 12, reserve 4) beats
// the threshold 11 in expectation, while the no-reserve policy waits and
// then sees the cheap outcome.
TEST(ReserveValue, CanLoseOnASinglePath) {
  const PriceModel m({{D::point_mass(12), D::point_mass(4), {}},
                      {D::empirical({{2, 1}, {20, 1}}), D::point_mass(0), {}}});
  const LoadSpec spec{1, 1, 2, 100};
  const auto with = compile_independent(spec, m);
  const auto without = compile_independent(spec, m.without_reserve());
  EXPECT_EQ(with.value(1, 1), 11);
  const std::vector<PricePair> cheap{{12, 4}, {2, 0}};
  const auto r_with = rollout(spec, cheap, [&](const LoadState& s, PricePair p) {
    return optimal_decision(with, s, p, spec);
  });
  const auto r_without = rollout(spec, cheap, [&](const LoadState& s, PricePair p) {
    return Decision{optimal_decision(without, s, {p.energy, 0}, spec).consume, 0};
  });
  EXPECT_EQ(r_with.total_cost, 8);
  EXPECT_EQ(r_without.total_cost, 2);
  EXPECT_EQ(value_function(with, spec, 1), 8);
  EXPECT_EQ(value_function(without, spec, 1), 11);
}

TEST(PolicyKind, NamesRoundTrip) {
  for (auto k : {PolicyKind::optimal_with_as, PolicyKind::no_as_optimal,
                 PolicyKind::certainty_equivalent, PolicyKind::immediate,
                 PolicyKind::uniform_rate}) {
    EXPECT_EQ(parse_policy_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_policy_kind("greedy"), ValidationError);
}

}  // namespace
}  // namespace flexload
