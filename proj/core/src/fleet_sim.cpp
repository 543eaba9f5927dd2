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


#include "flexload/fleet_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "flexload/threshold_engine.hpp"

namespace flexload::fleet {
namespace {

constexpr double kZ95 = 1.96;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double draw(const ClippedLognormal& spec, std::mt19937_64& rng) {
  double v = std::exp(spec.log_mean);
  if (spec.log_sd > 0.0) {
    v = std::exp(InnovationDistribution::gaussian(spec.log_mean, spec.log_sd).sample(rng));
  }
  return std::clamp(v, spec.min, spec.max);
}

int draw_index(std::span<const double> weights, std::mt19937_64& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (target < acc) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size()) - 1;
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + " must be finite");
  }
}

struct Summary {
  double mean = 0.0;
  double halfwidth = 0.0;
};

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.halfwidth = kZ95 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

struct ScenarioOutcome {
  std::vector<double> cost;                 // per policy, mean per session
  std::vector<std::vector<double>> load;    // per policy, per slot of day
  std::vector<double> reserve;              // per policy
  std::size_t dominance_checked = 0;
  std::size_t dominance_violations = 0;
  double dominance_excess = 0.0;
  double budget_error = 0.0;
};

TableVariant variant_of(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::optimal_with_as: return TableVariant::with_as;
    case PolicyKind::no_as_optimal: return TableVariant::no_as;
    case PolicyKind::certainty_equivalent: return TableVariant::mean_price;
    default: break;
  }
  throw ValidationError("policy has no threshold table");
}

bool uses_table(PolicyKind kind) {
  return kind == PolicyKind::optimal_with_as || kind == PolicyKind::no_as_optimal ||
         kind == PolicyKind::certainty_equivalent;
}

}  // namespace

void SimConfig::validate() const {
  if (n_scenarios < 1) throw ValidationError("n_scenarios must be >= 1");
  if (fleet_size < 1) throw ValidationError("fleet_size must be >= 1");
  if (slot_minutes < 1 || (24 * 60) % slot_minutes != 0) {
    throw ValidationError("slot_minutes must divide 24 hours");
  }
  const auto spd = static_cast<std::size_t>(slots_per_day());
  if (arrival_weights.size() != spd) {
    throw ValidationError("arrival_weights needs one entry per slot of the day (" +
                          std::to_string(spd) + ")");
  }
  check_finite(arrival_weights, "arrival weights");
  if (std::any_of(arrival_weights.begin(), arrival_weights.end(),
                  [](double w) { return w < 0.0; }) ||
      !(std::accumulate(arrival_weights.begin(), arrival_weights.end(), 0.0) > 0.0)) {
    throw ValidationError("arrival weights must be >= 0 with a positive sum");
  }
  auto check_lognormal = [](const ClippedLognormal& l, const char* what) {
    if (!std::isfinite(l.log_mean) || !(l.log_sd >= 0.0) || !std::isfinite(l.log_sd) ||
        !(l.min > 0.0) || !(l.max >= l.min) || !std::isfinite(l.max)) {
      throw ValidationError(std::string(what) +
                            ": need finite log_mean, log_sd >= 0, 0 < min <= max");
    }
  };
  check_lognormal(dwell_hours, "dwell");
  check_lognormal(demand, "demand");
  if (dwell_hours.max > 24.0) throw ValidationError("dwell is truncated at 24 hours");
  if (dwell_hours.min * 60.0 < slot_minutes) {
    throw ValidationError("minimum dwell must cover at least one slot");
  }
  if (capacities.empty()) throw ValidationError("capacities must not be empty");
  for (double c : capacities) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("capacities must be > 0");
  }
  if (!std::isfinite(shortfall_penalty)) throw ValidationError("penalty must be finite");
  if (prices.energy_mean.size() != spd || prices.reserve.size() != spd) {
    throw ValidationError("diurnal price vectors need one entry per slot of the day");
  }
  check_finite(prices.energy_mean, "energy means");
  check_finite(prices.reserve, "reserve prices");
  if (!(prices.energy_stddev >= 0.0) || !std::isfinite(prices.energy_stddev)) {
    throw ValidationError("energy stddev must be finite and >= 0");
  }
  if (policies.empty()) throw ValidationError("at least one policy is required");
  if (std::find(policies.begin(), policies.end(), PolicyKind::no_as_optimal) ==
      policies.end()) {
    throw ValidationError("no_as_optimal is required; costs are normalized by it");
  }
  for (std::size_t k = 0; k < policies.size(); ++k) {
    if (std::count(policies.begin(), policies.end(), policies[k]) > 1) {
      throw ValidationError("duplicate policy " + std::string(to_string(policies[k])));
    }
  }
}

SimConfig SimConfig::synthetic_default() {
  SimConfig c;
  c.n_scenarios = 500;
  c.fleet_size = 100;
  c.slot_minutes = 60;
  // Morning (07-09) and evening (17-19) arrival peaks.
  c.arrival_weights = {1, 1, 1, 1, 1, 2, 4, 10, 14, 10, 5, 3,
                       3, 3, 3, 4, 6, 10, 14, 12, 7, 4, 2, 1};
  c.dwell_hours = {std::log(8.0), 0.5, 3.0, 24.0};
  c.demand = {std::log(0.012), 0.4, 0.002, 0.05};  // MWh
  c.capacities = {0.0033, 0.0066};                 // MWh per hourly slot
  c.shortfall_penalty = 120.0;                     // $/MWh
  c.prices.energy_mean = {22, 20, 19, 18, 19, 22, 28, 34, 32, 29, 30, 32,
                          34, 37, 41, 45, 49, 52, 46, 40, 35, 31, 27, 24};
  c.prices.energy_stddev = 10.0;
  c.prices.reserve.reserve(c.prices.energy_mean.size());
  for (double m : c.prices.energy_mean) c.prices.reserve.push_back(1.0 + 0.1 * m);
  c.policies = {PolicyKind::optimal_with_as, PolicyKind::no_as_optimal,
                PolicyKind::certainty_equivalent, PolicyKind::immediate,
                PolicyKind::uniform_rate};
  c.seed = 2012;
  return c;
}

PriceModel window_model(const SimConfig& config) {
  const int spd = config.slots_per_day();
  std::vector<StageInnovations> stages;
  stages.reserve(static_cast<std::size_t>(config.window_slots()));
  for (int s = 0; s < config.window_slots(); ++s) {
    const auto k = static_cast<std::size_t>(s % spd);
    StageInnovations st;
    st.energy = config.prices.energy_stddev > 0.0
                    ? InnovationDistribution::gaussian(config.prices.energy_mean[k],
                                                       config.prices.energy_stddev)
                    : InnovationDistribution::point_mass(config.prices.energy_mean[k]);
    st.reserve = InnovationDistribution::point_mass(config.prices.reserve[k]);
    stages.push_back(std::move(st));
  }
  return PriceModel(std::move(stages));
}

std::uint64_t scenario_seed(std::uint64_t master, std::uint64_t scenario) {
  return splitmix64(splitmix64(master) ^ splitmix64(scenario + 0x5851f42d4c957f2dULL));
}

std::vector<SessionSpec> sample_sessions(const SimConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double slots_per_hour = 60.0 / config.slot_minutes;
  const int min_dwell = std::max(
      1, static_cast<int>(std::ceil(config.dwell_hours.min * slots_per_hour - 1e-9)));
  const int max_dwell =
      static_cast<int>(std::floor(config.dwell_hours.max * slots_per_hour + 1e-9));
  std::vector<SessionSpec> out;
  out.reserve(static_cast<std::size_t>(config.fleet_size));
  for (int n = 0; n < config.fleet_size; ++n) {
    SessionSpec s;
    s.arrival = draw_index(config.arrival_weights, rng);
    const double hours = draw(config.dwell_hours, rng);
    s.dwell = std::clamp(static_cast<int>(std::lround(hours * slots_per_hour)), min_dwell,
                         max_dwell);
    const auto cap_index = static_cast<std::size_t>(
        std::min(uniform01(rng) * static_cast<double>(config.capacities.size()),
                 static_cast<double>(config.capacities.size() - 1)));
    s.capacity = config.capacities[cap_index];
    s.demand = std::clamp(draw(config.demand, rng), s.capacity, s.dwell * s.capacity);
    out.push_back(s);
  }
  return out;
}

ThresholdCache::ThresholdCache(const SimConfig& config)
    : penalty_(config.shortfall_penalty),
      with_as_(window_model(config)),
      no_as_(with_as_.without_reserve()),
      mean_price_(no_as_.at_means()) {}

const PriceModel& ThresholdCache::model(TableVariant variant) const {
  switch (variant) {
    case TableVariant::with_as: return with_as_;
    case TableVariant::no_as: return no_as_;
    case TableVariant::mean_price: return mean_price_;
  }
  return with_as_;
}

ThresholdTable ThresholdCache::get(TableVariant variant, int arrival, int deadline,
                                   double capacity) {
  const int need = deadline - arrival;
  if (arrival < 0 || need < 1 || deadline > with_as_.horizon()) {
    throw ValidationError("session [" + std::to_string(arrival) + ", " +
                          std::to_string(deadline) + ") outside the price window");
  }
  const Key key{variant, deadline, capacity};
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = tables_[key];
  if (!slot || slot->horizon() < need) {
    const LoadSpec spec{0.0, capacity, need, penalty_};
    const PriceModel stages = model(variant).slice(arrival, deadline);
    if (slot) {
      slot = std::make_shared<const ThresholdTable>(augment_horizon(*slot, spec, stages));
      ++augmented_;
    } else {
      slot = std::make_shared<const ThresholdTable>(compile_independent(spec, stages));
      ++compiled_;
    }
  }
  return slot->horizon() == need ? *slot : slot->tail(need);
}

std::size_t ThresholdCache::compiled() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return compiled_;
}

std::size_t ThresholdCache::augmented() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return augmented_;
}

const PolicyStats& SimResult::stats(PolicyKind kind) const {
  for (const auto& p : policies) {
    if (p.kind == kind) return p;
  }
  throw ValidationError("policy " + std::string(to_string(kind)) + " was not simulated");
}

double par(std::span<const double> load) {
  if (load.empty()) throw ValidationError("PAR of an empty load profile");
  double peak = 0.0;
  double total = 0.0;
  for (double x : load) {
    if (!(x >= 0.0)) throw ValidationError("load must be nonnegative");
    peak = std::max(peak, x);
    total += x;
  }
  if (!(total > 0.0)) throw ValidationError("PAR of an all-zero load profile");
  return peak / (total / static_cast<double>(load.size()));
}

SimResult run(const SimConfig& config, WorkerPool* pool) {
  config.validate();
  const auto n_scen = static_cast<std::size_t>(config.n_scenarios);
  const std::size_t n_pol = config.policies.size();
  const auto spd = static_cast<std::size_t>(config.slots_per_day());
  const PriceModel model = window_model(config);

  std::vector<std::vector<SessionSpec>> sessions(n_scen);
  parallel_for(pool, n_scen, [&](std::size_t k) {
    sessions[k] = sample_sessions(config, scenario_seed(config.seed, 2 * k));
  });

  // Warm the cache in scenario order so it is built the same way whatever
  // the worker count; rollouts below only read it.
  ThresholdCache cache(config);
  for (const auto& scen : sessions) {
    for (const auto& s : scen) {
      for (PolicyKind p : config.policies) {
        if (uses_table(p)) cache.get(variant_of(p), s.arrival, s.deadline(), s.capacity);
      }
    }
  }

  const auto with_as = std::find(config.policies.begin(), config.policies.end(),
                                 PolicyKind::optimal_with_as);
  const auto no_as_index = static_cast<std::size_t>(
      std::find(config.policies.begin(), config.policies.end(), PolicyKind::no_as_optimal) -
      config.policies.begin());
  const bool check_dominance = with_as != config.policies.end();
  const auto with_as_index = static_cast<std::size_t>(with_as - config.policies.begin());

  std::vector<ScenarioOutcome> outcomes(n_scen);
  parallel_for(pool, n_scen, [&](std::size_t k) {
    ScenarioOutcome& out = outcomes[k];
    out.cost.assign(n_pol, 0.0);
    out.reserve.assign(n_pol, 0.0);
    out.load.assign(n_pol, std::vector<double>(spd, 0.0));
    const std::vector<PricePair> path = model.sample_path(scenario_seed(config.seed, 2 * k + 1));
    std::vector<double> session_cost(n_pol);
    for (const SessionSpec& s : sessions[k]) {
      const LoadSpec spec{s.demand, s.capacity, s.dwell, config.shortfall_penalty};
      const std::span<const PricePair> prices(path.data() + s.arrival,
                                              static_cast<std::size_t>(s.dwell));
      for (std::size_t p = 0; p < n_pol; ++p) {
        const PolicyKind kind = config.policies[p];
        ThresholdTable table(1, s.capacity, config.shortfall_penalty);
        BaselineAux aux{nullptr, s.demand};
        if (uses_table(kind)) {
          table = cache.get(variant_of(kind), s.arrival, s.deadline(), s.capacity);
          aux.table = &table;
        }
        const Rollout r = rollout(spec, prices, [&](const LoadState& st, PricePair pp) {
          return baseline_decision(kind, st, pp, spec, aux);
        });
        double consumed = 0.0;
        for (const auto& step : r.steps) {
          consumed += step.decision.consume;
          out.load[p][static_cast<std::size_t>(s.arrival + step.t) % spd] +=
              step.decision.consume;
        }
        out.budget_error =
            std::max(out.budget_error, std::abs(consumed + r.terminal_demand - s.demand));
        out.reserve[p] += r.reserve_offered;
        session_cost[p] = r.total_cost;
        out.cost[p] += r.total_cost;
      }
      if (check_dominance) {
        ++out.dominance_checked;
        const double excess = session_cost[with_as_index] - session_cost[no_as_index];
        const double tol = 1e-9 * std::max(1.0, std::abs(session_cost[no_as_index]));
        if (excess > tol) {
          ++out.dominance_violations;
          out.dominance_excess = std::max(out.dominance_excess, excess);
        }
      }
    }
    for (double& c : out.cost) c /= static_cast<double>(config.fleet_size);
  });

  SimResult result;
  result.scenarios = n_scen;
  result.sessions = n_scen * static_cast<std::size_t>(config.fleet_size);
  result.tables_compiled = cache.compiled();
  result.tables_augmented = cache.augmented();
  for (const auto& o : outcomes) {
    result.dominance_checked += o.dominance_checked;
    result.dominance_violations += o.dominance_violations;
    result.max_dominance_excess = std::max(result.max_dominance_excess, o.dominance_excess);
    result.max_budget_error = std::max(result.max_budget_error, o.budget_error);
    if (check_dominance && !(o.cost[with_as_index] < o.cost[no_as_index])) {
      ++result.scenarios_not_saving;
    }
  }
  for (std::size_t p = 0; p < n_pol; ++p) {
    PolicyStats st;
    st.kind = config.policies[p];
    std::vector<double> costs;
    std::vector<double> normalized;
    costs.reserve(n_scen);
    normalized.reserve(n_scen);
    st.diurnal_load.assign(spd, 0.0);
    for (const auto& o : outcomes) {
      costs.push_back(o.cost[p]);
      normalized.push_back(p == no_as_index ? 1.0 : o.cost[p] / o.cost[no_as_index]);
      st.reserve_offered += o.reserve[p];
      for (std::size_t s = 0; s < spd; ++s) st.diurnal_load[s] += o.load[p][s];
    }
    const Summary c = summarize(costs);
    const Summary n = summarize(normalized);
    st.mean_cost = c.mean;
    st.halfwidth = c.halfwidth;
    st.normalized_mean = n.mean;
    st.normalized_halfwidth = n.halfwidth;
    st.reserve_offered /= static_cast<double>(n_scen);
    for (double& x : st.diurnal_load) x /= static_cast<double>(n_scen);
    st.par = par(st.diurnal_load);
    result.policies.push_back(std::move(st));
  }
  return result;
}

}  // namespace flexload::fleet
