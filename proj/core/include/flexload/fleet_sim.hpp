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


#ifndef FLEXLOAD_FLEET_SIM_HPP_
#define FLEXLOAD_FLEET_SIM_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "flexload/policy.hpp"
#include "flexload/price_model.hpp"
#include "flexload/threshold_table.hpp"
#include "flexload/worker_pool.hpp"

namespace flexload::fleet {

struct SessionSpec {
  int arrival = 0;  // slot index within the window
  int dwell = 1;    // slots
  double demand = 0.0;
  double capacity = 1.0;

  int deadline() const { return arrival + dwell; }
};

// Lognormal draw exp(N(log_mean, log_sd)) clipped to [min, max].
struct ClippedLognormal {
  double log_mean = 0.0;
  double log_sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Diurnal price inputs, one entry per slot of the day, repeated over the
// two-day window. Energy is gaussian around the mean (point mass when the
// standard deviation is zero); reserve is a known point mass.
struct DiurnalPrices {
  std::vector<double> energy_mean;
  double energy_stddev = 0.0;
  std::vector<double> reserve;
};

struct SimConfig {
  int n_scenarios = 1;
  int fleet_size = 1;
  int slot_minutes = 60;
  std::vector<double> arrival_weights;  // per slot of the first day
  ClippedLognormal dwell_hours;
  ClippedLognormal demand;  // further clipped to [capacity, dwell * capacity]
  std::vector<double> capacities;  // drawn uniformly per session
  double shortfall_penalty = 0.0;
  DiurnalPrices prices;
  std::vector<PolicyKind> policies;
  std::uint64_t seed = 0;

  int slots_per_day() const { return 24 * 60 / slot_minutes; }
  int window_slots() const { return 2 * slots_per_day(); }

  // Throws ValidationError.
  void validate() const;

  // Documented synthetic stand-in for the unpublished fleet and price data.
  static SimConfig synthetic_default();
};

// Independent two-day price model built from the diurnal inputs.
PriceModel window_model(const SimConfig& config);

// Sessions of one scenario, drawn from `seed`.
std::vector<SessionSpec> sample_sessions(const SimConfig& config, std::uint64_t seed);

// Seed of scenario k derived from the master seed (splitmix64 of both).
std::uint64_t scenario_seed(std::uint64_t master, std::uint64_t scenario);

enum class TableVariant { with_as, no_as, mean_price };

// Thresholds keyed by (variant, deadline, capacity). A cached table covers
// stages [deadline - horizon, deadline); requests reaching further back
// extend it with augment_horizon. Published tables are immutable.
class ThresholdCache {
 public:
  explicit ThresholdCache(const SimConfig& config);

  // Table for stages [arrival, deadline).
  ThresholdTable get(TableVariant variant, int arrival, int deadline, double capacity);

  std::size_t compiled() const;
  std::size_t augmented() const;

 private:
  using Key = std::tuple<TableVariant, int, double>;

  const PriceModel& model(TableVariant variant) const;

  double penalty_;
  PriceModel with_as_;
  PriceModel no_as_;
  PriceModel mean_price_;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const ThresholdTable>> tables_;
  std::size_t compiled_ = 0;
  std::size_t augmented_ = 0;
};

struct PolicyStats {
  PolicyKind kind = PolicyKind::optimal_with_as;
  double mean_cost = 0.0;  // per session
  double halfwidth = 0.0;  // 95% over scenarios
  double normalized_mean = 0.0;
  double normalized_halfwidth = 0.0;
  std::vector<double> diurnal_load;  // mean aggregate energy per slot of day
  double par = 0.0;
  double reserve_offered = 0.0;  // mean total per scenario
};

struct SimResult {
  std::vector<PolicyStats> policies;
  std::size_t scenarios = 0;
  std::size_t sessions = 0;
  // Sessions where the with-AS optimum cost more than the no-AS optimum.
  std::size_t dominance_checked = 0;
  std::size_t dominance_violations = 0;
  double max_dominance_excess = 0.0;
  // Scenarios whose normalized with-AS cost is not below one.
  std::size_t scenarios_not_saving = 0;
  double max_budget_error = 0.0;
  std::size_t tables_compiled = 0;
  std::size_t tables_augmented = 0;

  const PolicyStats& stats(PolicyKind kind) const;
};

// max / mean; throws ValidationError on an all-zero or negative load.
double par(std::span<const double> load);

// Runs every scenario and policy on common price and session draws. The
// result depends only on the config, not on the pool size.
SimResult run(const SimConfig& config, WorkerPool* pool = nullptr);

}  // namespace flexload::fleet

#endif  // FLEXLOAD_FLEET_SIM_HPP_
