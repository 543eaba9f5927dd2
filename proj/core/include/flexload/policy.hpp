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


#ifndef FLEXLOAD_POLICY_HPP_
#define FLEXLOAD_POLICY_HPP_

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "flexload/threshold_engine.hpp"
#include "flexload/threshold_table.hpp"
#include "flexload/types.hpp"

namespace flexload {

// Energy consumed in the slot and reserve capacity offered; 0 <= r <= e.
struct Decision {
  double consume = 0.0;
  double reserve_offer = 0.0;

  friend bool operator==(const Decision&, const Decision&) = default;
};

struct LoadState {
  double remaining_demand = 0.0;
  int stage = 0;
};

// i* = number of pieces whose stage-(t+1) threshold lies strictly below the
// effective price. 0 <= t < T.
int optimal_piece_index(const ThresholdTable& table, int t, double effective);

// e* = (d - i* cap)^+ ^ cap, r* = e* 1{reserve price >= 0}; e* = 0 when
// i* = T (the price beats the penalty, so no piece is worth buying).
Decision optimal_decision(const ThresholdTable& table, const LoadState& state,
                          PricePair prices, const LoadSpec& spec);

// Same rule with the thresholds m^i_{t+1}(pi^a) read off a coefficient grid
// (Markov prices: the next-stage state is the current effective price).
Decision optimal_decision(const CoefficientGrid& grid, const LoadState& state,
                          PricePair prices, const LoadSpec& spec);

double reserve_rule(double consume, double reserve_price);

enum class PolicyKind {
  optimal_with_as,
  no_as_optimal,
  certainty_equivalent,
  immediate,
  uniform_rate,
};

std::string_view to_string(PolicyKind kind);
// Throws ValidationError on unknown names.
PolicyKind parse_policy_kind(std::string_view name);

// What the baselines need beyond state and prices. `table` is the no-AS
// table for no_as_optimal and the mean-price table for certainty_equivalent;
// `initial_demand` feeds uniform_rate.
struct BaselineAux {
  const ThresholdTable* table = nullptr;
  double initial_demand = 0.0;
};

// Baselines never offer reserve. optimal_with_as uses aux.table as the
// with-AS table and is accepted here for uniform dispatch.
Decision baseline_decision(PolicyKind kind, const LoadState& state, PricePair prices,
                           const LoadSpec& spec, const BaselineAux& aux);

struct RolloutStep {
  int t = 0;
  PricePair prices;
  double demand = 0.0;  // before the decision
  Decision decision;
  double stage_cost = 0.0;  // pi^e e - pi^r r
};

struct Rollout {
  std::vector<RolloutStep> steps;
  double terminal_demand = 0.0;
  double terminal_cost = 0.0;  // penalty * terminal_demand
  double total_cost = 0.0;
  double reserve_offered = 0.0;
};

using DecisionRule = std::function<Decision(const LoadState&, PricePair)>;

// Runs `rule` along `path` (one entry per stage, path.size() == spec.horizon)
// starting from spec.demand. Throws ValidationError if the rule returns an
// infeasible decision.
Rollout rollout(const LoadSpec& spec, std::span<const PricePair> path,
                const DecisionRule& rule);

}  // namespace flexload

#endif  // FLEXLOAD_POLICY_HPP_
