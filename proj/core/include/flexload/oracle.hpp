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


#ifndef FLEXLOAD_ORACLE_HPP_
#define FLEXLOAD_ORACLE_HPP_

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "flexload/price_model.hpp"
#include "flexload/threshold_engine.hpp"
#include "flexload/threshold_table.hpp"
#include "flexload/types.hpp"

namespace flexload::oracle {

// One outcome of a stage: the prices seen and the price state it leads to.
struct PriceAtom {
  PricePair prices;
  double probability = 0.0;
  int next_state = 0;
};

// Finite Markov chain of price states over a demand lattice. Stage t starts
// in one of transitions[t].size() states (state 0 at t = 0) and draws one
// atom; next_state indexes the states of stage t + 1.
struct DiscreteInstance {
  LoadSpec spec;
  std::vector<std::vector<std::vector<PriceAtom>>> transitions;
  // Demand and action lattice step as a fraction of capacity; 1/step must
  // be an integer so both stay on the lattice.
  double step = 0.25;

  // Independent stages: one state per stage.
  static DiscreteInstance independent(
      const LoadSpec& spec,
      const std::vector<std::vector<std::pair<PricePair, double>>>& stages,
      double step = 0.25);

  // Throws ValidationError on malformed chains or probabilities that do not
  // sum to one within 1e-12.
  void validate() const;
  int lattice_per_capacity() const;
  double unit() const { return spec.capacity * step; }
  // Largest demand index: (T + 1) capacities.
  int max_index() const { return lattice_per_capacity() * (spec.horizon + 1); }
};

struct Action {
  int consume = 0;  // lattice units
  int reserve = 0;

  friend bool operator==(const Action&, const Action&) = default;
};

inline constexpr double kTieTolerance = 1e-9;
inline constexpr std::size_t kDefaultBudget = 10'000'000;

class Solution {
 public:
  Solution(int horizon, int max_index, double unit)
      : horizon_(horizon), max_index_(max_index), unit_(unit) {}

  int horizon() const { return horizon_; }
  int max_index() const { return max_index_; }
  double unit() const { return unit_; }

  // V(t, state, k * unit), 0 <= t <= T.
  double value(int t, int state, int k) const;
  // Every action within the tie tolerance of the minimum, t < T.
  const std::vector<Action>& minimizers(int t, int state, int k, int atom) const;

 private:
  friend Solution solve_dp(const DiscreteInstance&, std::size_t);

  int horizon_;
  int max_index_;
  double unit_;
  std::vector<std::vector<std::vector<double>>> value_;  // [t][s][k]
  // [t][s][k][atom]
  std::vector<std::vector<std::vector<std::vector<std::vector<Action>>>>> minimizers_;
};

// Exhaustive Bellman recursion over every (e, r) on the lattice with
// 0 <= r <= e <= min(d, capacity). Terminal value is penalty * d. Throws
// ValidationError when the (t, d, state, action) count exceeds `budget`.
Solution solve_dp(const DiscreteInstance& inst, std::size_t budget = kDefaultBudget);

struct Report {
  double max_value_error = 0.0;
  std::size_t actions_checked = 0;
  std::size_t actions_outside = 0;
  std::string first_mismatch;

  bool actions_optimal() const { return actions_outside == 0; }
};

// Value J*_0 against V(0, ., state 0) on every lattice demand, and every
// threshold-policy action against the minimizing sets.
Report compare(const DiscreteInstance& inst, const Solution& sol,
               const ThresholdTable& table);
// Same against a coefficient grid; `psi0` is the effective price feeding
// stage 0.
Report compare(const DiscreteInstance& inst, const Solution& sol,
               const CoefficientGrid& grid, double psi0);

struct RandomOptions {
  int max_horizon = 6;
  int max_atoms = 5;
  double step = 0.25;
};

// Small independent instance with prices on a 0.5 grid (ties are common).
DiscreteInstance random_independent(std::mt19937_64& rng, const RandomOptions& options = {});

// Independent instance as a price model with joint samples per stage.
PriceModel to_price_model(const DiscreteInstance& inst);

// Enumerates the reachable effective-price states of a model with discrete
// innovations (states merged by exact effective price). Throws
// ValidationError past `max_states` states in any stage.
DiscreteInstance from_price_model(const LoadSpec& spec, const PriceModel& model,
                                  double step = 0.25, std::size_t max_states = 4096);

}  // namespace flexload::oracle

#endif  // FLEXLOAD_ORACLE_HPP_
