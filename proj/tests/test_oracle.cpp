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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "flexload/oracle.hpp"
#include "flexload/policy.hpp"
#include "flexload/threshold_engine.hpp"

namespace flexload {
namespace {

using oracle::DiscreteInstance;

const LoadSpec kWorked{1.5, 1.0, 2, 10.0};

DiscreteInstance worked_instance() {
  return DiscreteInstance::independent(kWorked, {{{{5, 1}, 1.0}}, {{{7, 0}, 1.0}}});
}

double pos(double x) { return x > 0 ? x : 0.0; }

TEST(Oracle, WorkedInstance) {
  const auto inst = worked_instance();
  const auto sol = oracle::solve_dp(inst);
  EXPECT_DOUBLE_EQ(sol.value(0, 0, 6), 7.5);
  EXPECT_DOUBLE_EQ(sol.value(0, 0, 0), 0.0);
  const auto table = compile_independent(kWorked, oracle::to_price_model(inst));
  const auto report = oracle::compare(inst, sol, table);
  EXPECT_LE(report.max_value_error, 1e-12);
  EXPECT_TRUE(report.actions_optimal()) << report.first_mismatch;
  EXPECT_GT(report.actions_checked, 0u);
}

TEST(Oracle, TerminalValueIsThePenalty) {
  const auto inst = worked_instance();
  const auto sol = oracle::solve_dp(inst);
  for (int k = 0; k <= inst.max_index(); ++k) {
    EXPECT_DOUBLE_EQ(sol.value(2, 0, k), 10.0 * k * inst.unit());
  }
}

// One stage: buy what fits at min(price, penalty), the rest pays the penalty.
TEST(Oracle, SingleStageClosedForm) {
  const LoadSpec spec{0, 2.0, 1, 6.0};
  const auto inst = DiscreteInstance::independent(
      spec, {{{{3, 1}, 0.25}, {{8, 0}, 0.5}, {{7, -2}, 0.25}}});
  const auto sol = oracle::solve_dp(inst);
  const double mean_min = 0.25 * 2 + 0.5 * 6 + 0.25 * 6;
  for (int k = 0; k <= inst.max_index(); ++k) {
    const double d = k * inst.unit();
    const double expected = mean_min * std::min(d, 2.0) + 6.0 * pos(d - 2.0);
    EXPECT_NEAR(sol.value(0, 0, k), expected, 1e-12) << d;
  }
}

// V_t is convex in demand and linear on each capacity piece.
TEST(Oracle, ValueConvexWithKinksOnlyAtCapacityMultiples) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 40; ++n) {
    const auto inst = oracle::random_independent(rng);
    const auto sol = oracle::solve_dp(inst);
    const int per = inst.lattice_per_capacity();
    for (int t = 0; t <= inst.spec.horizon; ++t) {
      for (int k = 1; k < inst.max_index(); ++k) {
        const double d2 = sol.value(t, 0, k + 1) - 2 * sol.value(t, 0, k) +
                          sol.value(t, 0, k - 1);
        EXPECT_GE(d2, -1e-9) << "instance " << n << " t=" << t << " k=" << k;
        if (k % per != 0) {
          EXPECT_NEAR(d2, 0.0, 1e-9) << "instance " << n << " k=" << k;
        }
      }
    }
  }
}

TEST(Oracle, ExtraLeadingStageNeverHurts) {
  std::mt19937_64 rng(12);
  for (int n = 0; n < 30; ++n) {
    const auto inst = oracle::random_independent(rng);
    const auto sol = oracle::solve_dp(inst);
    // Stages 1..T of the same instance, one stage shorter.
    auto shorter = inst;
    shorter.spec.horizon -= 1;
    if (shorter.spec.horizon < 1) continue;
    shorter.transitions.erase(shorter.transitions.begin());
    const auto sol_short = oracle::solve_dp(shorter);
    for (int k = 0; k <= shorter.max_index(); ++k) {
      EXPECT_LE(sol.value(0, 0, k), sol_short.value(0, 0, k) + 1e-12);
      EXPECT_DOUBLE_EQ(sol.value(1, 0, k), sol_short.value(0, 0, k));
    }
  }
}

TEST(Oracle, LibraryMatchesOnRandomIndependentInstances) {
  std::mt19937_64 rng(13);
  for (int n = 0; n < 60; ++n) {
    const auto inst = oracle::random_independent(rng);
    const auto sol = oracle::solve_dp(inst);
    const auto table = compile_independent(inst.spec, oracle::to_price_model(inst));
    const auto report = oracle::compare(inst, sol, table);
    EXPECT_LE(report.max_value_error, 1e-9) << n;
    EXPECT_TRUE(report.actions_optimal()) << n << ": " << report.first_mismatch;
  }
}

// Slopes of V_{t+1} read off the oracle by finite differences. With d in
// piece i and d~ = d - i * cap, exactly one of
//   E1: s_i < price            buy nothing
//   E2: s_{i-1} < price <= s_i  buy d~
//   E3: price <= s_{i-1}        buy a full capacity
// holds, and the named amount is among the oracle's minimizers.
TEST(Oracle, ConsumptionEventsPartitionAndAreOptimal) {
  std::mt19937_64 rng(14);
  int seen[3] = {0, 0, 0};
  for (int n = 0; n < 60; ++n) {
    const auto inst = oracle::random_independent(rng);
    const auto sol = oracle::solve_dp(inst);
    const int per = inst.lattice_per_capacity();
    const double cap = inst.spec.capacity;
    for (int t = 0; t < inst.spec.horizon; ++t) {
      auto slope = [&](int j) {
        if (j < 0) return -std::numeric_limits<double>::infinity();
        // Rounded so finite-difference noise cannot break the slope order.
        const double s = (sol.value(t + 1, 0, (j + 1) * per) - sol.value(t + 1, 0, j * per)) / cap;
        return std::round(s * 1e9) / 1e9;
      };
      const auto& atoms = inst.transitions[t][0];
      for (int k = 0; k + per <= inst.max_index(); ++k) {
        const int i = k / per;
        const int rem = k - i * per;
        for (std::size_t a = 0; a < atoms.size(); ++a) {
          const double price = effective_price(atoms[a].prices);
          const double lo = slope(i - 1), hi = slope(i);
          const bool e1 = hi < price;
          const bool e2 = lo < price && price <= hi;
          const bool e3 = price <= lo;
          ASSERT_EQ(e1 + e2 + e3, 1) << "price " << price << " slopes " << lo << ", " << hi;
          const int want = e1 ? 0 : e2 ? rem : std::min(per, k);
          seen[e1 ? 0 : e2 ? 1 : 2]++;
          const auto& mins = sol.minimizers(t, 0, k, static_cast<int>(a));
          const bool found = std::any_of(mins.begin(), mins.end(),
                                         [&](const oracle::Action& x) { return x.consume == want; });
          EXPECT_TRUE(found) << "instance " << n << " t=" << t << " k=" << k << " atom " << a;
        }
      }
    }
  }
  for (int c : seen) EXPECT_GT(c, 0);
}

// The piecewise identities behind the Bellman step, on exact dyadic inputs
// and on arbitrary doubles.
TEST(Oracle, PieceIdentities) {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> units(0, 64);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int n = 0; n < 20000; ++n) {
    const bool exact = n % 2 == 0;
    const double cap = exact ? 0.25 * (1 + units(rng) % 16) : 0.01 + 5 * unif(rng);
    const double d = exact ? 0.125 * units(rng) : 20 * unif(rng);
    const double e = exact ? std::min(cap, 0.125 * units(rng)) : cap * unif(rng);
    const double i = std::floor(d / cap);
    const double dt = d - i * cap;
    const double tol = exact ? 0.0 : 1e-12 * (1 + d + cap);

    EXPECT_NEAR(std::min(pos(d - e - (i - 1) * cap), cap), cap - pos(e - dt), tol);
    EXPECT_NEAR(pos(dt - e), dt - std::min(e, dt), tol);
    EXPECT_NEAR(e, pos(e - dt) + std::min(e, dt), tol);
  }
}

TEST(Oracle, FromPriceModelMergesDeterministicPaths) {
  const auto model = PriceModel::deterministic({{5, 1}, {7, 0}});
  const auto inst = oracle::from_price_model(kWorked, model);
  ASSERT_EQ(inst.transitions.size(), 2u);
  for (const auto& stage : inst.transitions) EXPECT_EQ(stage.size(), 1u);
  EXPECT_DOUBLE_EQ(oracle::solve_dp(inst).value(0, 0, 6), 7.5);
}

TEST(Oracle, BudgetIsEnforced) {
  EXPECT_THROW(oracle::solve_dp(worked_instance(), 10), ValidationError);
  EXPECT_NO_THROW(oracle::solve_dp(worked_instance()));
}

TEST(Oracle, RejectsMalformedInstances) {
  auto bad_prob = DiscreteInstance::independent(kWorked, {{{{5, 1}, 0.6}}, {{{7, 0}, 1.0}}});
  EXPECT_THROW(oracle::solve_dp(bad_prob), ValidationError);

  auto bad_step = worked_instance();
  bad_step.step = 0.3;
  EXPECT_THROW(oracle::solve_dp(bad_step), ValidationError);

  auto bad_next = worked_instance();
  bad_next.transitions[0][0][0].next_state = 3;
  EXPECT_THROW(oracle::solve_dp(bad_next), ValidationError);

  auto missing = worked_instance();
  missing.transitions.pop_back();
  EXPECT_THROW(oracle::solve_dp(missing), ValidationError);
}

}  // namespace
}  // namespace flexload
