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


#include "flexload/policy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace flexload {
namespace {

constexpr std::array<std::pair<PolicyKind, std::string_view>, 5> kPolicyNames{{
    {PolicyKind::optimal_with_as, "optimal_with_as"},
    {PolicyKind::no_as_optimal, "no_as_optimal"},
    {PolicyKind::certainty_equivalent, "certainty_equivalent"},
    {PolicyKind::immediate, "immediate"},
    {PolicyKind::uniform_rate, "uniform_rate"},
}};

void check_stage(int stage, int horizon) {
  if (stage < 0 || stage >= horizon) {
    throw ValidationError("stage " + std::to_string(stage) + " outside [0, " +
                          std::to_string(horizon) + ")");
  }
}

// piece == horizon means the price beats every threshold including the
// last one, which always equals the penalty. Demand past T * cap then has
// marginal value m_T too, so nothing is bought.
Decision from_piece(int piece, int horizon, double demand, double capacity,
                    double reserve_price) {
  if (piece >= horizon) return {0.0, 0.0};
  const double e = std::min(positive_part(demand - piece * capacity), capacity);
  return {e, reserve_rule(e, reserve_price)};
}

const ThresholdTable& need_table(const BaselineAux& aux, PolicyKind kind) {
  if (aux.table == nullptr) {
    throw ValidationError(std::string(to_string(kind)) + " needs a threshold table");
  }
  return *aux.table;
}

}  // namespace

int optimal_piece_index(const ThresholdTable& table, int t, double effective) {
  check_stage(t, table.horizon());
  auto next = table.row(t + 1);
  return static_cast<int>(std::lower_bound(next.begin(), next.end(), effective) -
                          next.begin());
}

Decision optimal_decision(const ThresholdTable& table, const LoadState& state,
                          PricePair prices, const LoadSpec& spec) {
  if (table.horizon() != spec.horizon) {
    throw ValidationError("table horizon differs from the load horizon");
  }
  const int piece = optimal_piece_index(table, state.stage, effective_price(prices));
  return from_piece(piece, table.horizon(), state.remaining_demand, spec.capacity,
                    prices.reserve);
}

Decision optimal_decision(const CoefficientGrid& grid, const LoadState& state,
                          PricePair prices, const LoadSpec& spec) {
  check_stage(state.stage, grid.horizon());
  const double x = effective_price(prices);
  int piece = 0;
  while (piece < grid.horizon() &&
         grid.threshold(state.stage + 1, piece + 1, x).below(x)) {
    ++piece;
  }
  return from_piece(piece, grid.horizon(), state.remaining_demand, spec.capacity,
                    prices.reserve);
}

double reserve_rule(double consume, double reserve_price) {
  return reserve_price >= 0.0 ? consume : 0.0;
}

std::string_view to_string(PolicyKind kind) {
  for (const auto& [k, name] : kPolicyNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (const auto& [k, n] : kPolicyNames) {
    if (n == name) return k;
  }
  throw ValidationError("unknown policy kind '" + std::string(name) + "'");
}

Decision baseline_decision(PolicyKind kind, const LoadState& state, PricePair prices,
                           const LoadSpec& spec, const BaselineAux& aux) {
  const double d = state.remaining_demand;
  switch (kind) {
    case PolicyKind::optimal_with_as:
      return optimal_decision(need_table(aux, kind), state, prices, spec);
    case PolicyKind::no_as_optimal:
    case PolicyKind::certainty_equivalent: {
      Decision dec = optimal_decision(need_table(aux, kind), state,
                                      PricePair{prices.energy, 0.0}, spec);
      dec.reserve_offer = 0.0;
      return dec;
    }
    case PolicyKind::immediate:
      return {std::min(d, spec.capacity), 0.0};
    case PolicyKind::uniform_rate: {
      const double rate = aux.initial_demand / spec.horizon;
      return {std::min({d, rate, spec.capacity}), 0.0};
    }
  }
  throw ValidationError("unknown policy kind");
}

Rollout rollout(const LoadSpec& spec, std::span<const PricePair> path,
                const DecisionRule& rule) {
  spec.validate();
  if (static_cast<int>(path.size()) != spec.horizon) {
    throw ValidationError("price path has " + std::to_string(path.size()) +
                          " stages, load horizon is " + std::to_string(spec.horizon));
  }
  Rollout out;
  out.steps.reserve(path.size());
  double d = spec.demand;
  for (int t = 0; t < spec.horizon; ++t) {
    const PricePair p = path[static_cast<std::size_t>(t)];
    const Decision dec = rule(LoadState{d, t}, p);
    if (!(dec.reserve_offer >= 0.0) || dec.reserve_offer > dec.consume ||
        dec.consume > std::min(d, spec.capacity)) {
      throw ValidationError("infeasible decision at stage " + std::to_string(t));
    }
    const double cost = p.energy * dec.consume - p.reserve * dec.reserve_offer;
    out.steps.push_back({t, p, d, dec, cost});
    out.total_cost += cost;
    out.reserve_offered += dec.reserve_offer;
    d -= dec.consume;
  }
  out.terminal_demand = d;
  out.terminal_cost = spec.shortfall_penalty * d;
  out.total_cost += out.terminal_cost;
  return out;
}

}  // namespace flexload
