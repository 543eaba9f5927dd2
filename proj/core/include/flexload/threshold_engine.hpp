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


#ifndef FLEXLOAD_THRESHOLD_ENGINE_HPP_
#define FLEXLOAD_THRESHOLD_ENGINE_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "flexload/distribution.hpp"
#include "flexload/price_model.hpp"
#include "flexload/threshold_table.hpp"
#include "flexload/types.hpp"
#include "flexload/worker_pool.hpp"

namespace flexload {

// Where an effective price falls relative to the two thresholds bracketing
// the piece that holds the remaining demand.
enum class ConsumptionRegion {
  do_not_consume,     // price > upper
  partially_consume,  // lower < price <= upper
  consume,            // price <= lower
};

ConsumptionRegion classify_region(double price, Threshold lower, Threshold upper);

// G(z, z') = integral of F^a over [z, z']. z may be the sentinel, in which
// case only the mass below z' contributes. Throws ValidationError if z > z'.
double g_integral(const EffectivePriceDistribution& dist, Threshold lower,
                  double upper);

struct CompileOptions {
  WorkerPool* pool = nullptr;  // null runs inline
};

// Backward recursion m^i_t = m^i_{t+1} - G_t(m^{i-1}_{t+1}, m^i_{t+1}) for
// independent price stages. spec.demand is not used.
ThresholdTable compile_independent(const LoadSpec& spec, const PriceModel& model,
                                   const CompileOptions& options = {});

// Extends `table` (the last stages of `model`) to the full horizon of
// `model`, computing only the new leading rows. Existing rows are copied
// bit for bit.
ThresholdTable augment_horizon(const ThresholdTable& table, const LoadSpec& spec,
                               const PriceModel& model,
                               const CompileOptions& options = {});

struct CorrelatedOptions {
  double grid_delta = 1e-2;
  // Grid bounds; derived from the propagated price support when absent.
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::size_t max_nodes = 4'000'000;
  WorkerPool* pool = nullptr;
};

// m^i_t(psi) tabulated on a uniform grid over the previous effective price,
// linearly interpolated inside and held flat outside.
class CoefficientGrid {
 public:
  CoefficientGrid(int horizon, double penalty, double psi_min, double delta,
                  std::size_t nodes);

  int horizon() const { return horizon_; }
  double shortfall_penalty() const { return penalty_; }
  double psi_min() const { return psi_min_; }
  double delta() const { return delta_; }
  std::size_t nodes() const { return nodes_; }
  double node(std::size_t k) const { return psi_min_ + delta_ * static_cast<double>(k); }
  double psi_max() const { return node(nodes_ - 1); }

  // 0 <= t <= T, 1 <= i <= T.
  std::span<const double> column(int t, int i) const;
  std::span<double> mutable_column(int t, int i);

  double coefficient(int t, int i, double psi) const;
  // The sentinel for i == 0.
  Threshold threshold(int t, int i, double psi) const;

 private:
  std::size_t offset(int t, int i) const;

  int horizon_;
  double penalty_;
  double psi_min_;
  double delta_;
  std::size_t nodes_;
  std::vector<double> values_;
};

struct CorrelatedSolution {
  CoefficientGrid coefficients;
  // Fixed points psi = m^i_t(psi) per (t, i).
  ThresholdTable thresholds;
};

// Grid-based recursion for seasonal (Markov) price models. Independent
// models are accepted too and reproduce compile_independent.
CorrelatedSolution compile_correlated(const LoadSpec& spec, const PriceModel& model,
                                      const CorrelatedOptions& options = {});

// J*_0(demand, psi) read from the t = 0 coefficients, psi being the
// effective price of the slot before the horizon starts.
double value_function(const CoefficientGrid& grid, const LoadSpec& spec,
                      double demand, double psi);

}  // namespace flexload

#endif  // FLEXLOAD_THRESHOLD_ENGINE_HPP_
