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


#include "flexload/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "flexload/policy.hpp"

namespace flexload::oracle {
namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Lattice index of a decision amount, or -1 if it is off the lattice.
int to_index(double amount, double unit) {
  const double k = std::round(amount / unit);
  if (std::abs(amount - k * unit) > 1e-9 * unit) return -1;
  return static_cast<int>(k);
}

template <typename DecideFn>
void check_actions(const DiscreteInstance& inst, const Solution& sol,
                   const DecideFn& decide, Report& report) {
  const double u = sol.unit();
  for (int t = 0; t < inst.spec.horizon; ++t) {
    const auto& states = inst.transitions[static_cast<std::size_t>(t)];
    for (int s = 0; s < static_cast<int>(states.size()); ++s) {
      const auto& atoms = states[static_cast<std::size_t>(s)];
      for (int k = 0; k <= sol.max_index(); ++k) {
        for (int a = 0; a < static_cast<int>(atoms.size()); ++a) {
          const PricePair p = atoms[static_cast<std::size_t>(a)].prices;
          const Decision dec = decide(LoadState{k * u, t}, p);
          const Action act{to_index(dec.consume, u), to_index(dec.reserve_offer, u)};
          const auto& best = sol.minimizers(t, s, k, a);
          ++report.actions_checked;
          if (std::find(best.begin(), best.end(), act) == best.end()) {
            if (report.actions_outside++ == 0) {
              std::ostringstream msg;
              msg << "t=" << t << " state=" << s << " d=" << k * u << " prices=("
                  << p.energy << "," << p.reserve << ") e=" << dec.consume
                  << " r=" << dec.reserve_offer;
              report.first_mismatch = msg.str();
            }
          }
        }
      }
    }
  }
}

}  // namespace

DiscreteInstance DiscreteInstance::independent(
    const LoadSpec& spec,
    const std::vector<std::vector<std::pair<PricePair, double>>>& stages, double step) {
  DiscreteInstance inst;
  inst.spec = spec;
  inst.step = step;
  for (const auto& stage : stages) {
    std::vector<PriceAtom> atoms;
    for (const auto& [p, w] : stage) atoms.push_back({p, w, 0});
    inst.transitions.push_back({std::move(atoms)});
  }
  return inst;
}

int DiscreteInstance::lattice_per_capacity() const {
  const double n = std::round(1.0 / step);
  if (!(step > 0.0) || n < 1.0 || std::abs(n * step - 1.0) > 1e-12) {
    throw ValidationError("lattice step must be 1/n for a positive integer n");
  }
  return static_cast<int>(n);
}

void DiscreteInstance::validate() const {
  spec.validate();
  lattice_per_capacity();
  if (static_cast<int>(transitions.size()) != spec.horizon) {
    throw ValidationError("instance needs one transition block per stage");
  }
  for (std::size_t t = 0; t < transitions.size(); ++t) {
    if (transitions[t].empty()) throw ValidationError("stage without price states");
    if (t == 0 && transitions[t].size() != 1) {
      throw ValidationError("stage 0 must start from a single price state");
    }
    const std::size_t next_states =
        t + 1 < transitions.size() ? transitions[t + 1].size()
                                   : std::numeric_limits<std::size_t>::max();
    for (const auto& atoms : transitions[t]) {
      double total = 0.0;
      for (const auto& a : atoms) {
        if (!(a.probability >= 0.0) || !std::isfinite(a.prices.energy) ||
            !std::isfinite(a.prices.reserve)) {
          throw ValidationError("bad price atom at stage " + std::to_string(t));
        }
        if (a.next_state < 0 || static_cast<std::size_t>(a.next_state) >= next_states) {
          throw ValidationError("atom points at a missing state at stage " +
                                std::to_string(t));
        }
        total += a.probability;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("atom probabilities at stage " + std::to_string(t) +
                              " sum to " + std::to_string(total));
      }
    }
  }
}

double Solution::value(int t, int state, int k) const {
  return value_.at(static_cast<std::size_t>(t))
      .at(static_cast<std::size_t>(state))
      .at(static_cast<std::size_t>(k));
}

const std::vector<Action>& Solution::minimizers(int t, int state, int k, int atom) const {
  return minimizers_.at(static_cast<std::size_t>(t))
      .at(static_cast<std::size_t>(state))
      .at(static_cast<std::size_t>(k))
      .at(static_cast<std::size_t>(atom));
}

Solution solve_dp(const DiscreteInstance& inst, std::size_t budget) {
  inst.validate();
  const int T = inst.spec.horizon;
  const int n = inst.lattice_per_capacity();
  const int K = inst.max_index();
  const double u = inst.unit();

  // (e, r) pairs available at demand index k.
  auto action_count = [&](int k) {
    const std::size_t m = static_cast<std::size_t>(std::min(k, n)) + 1;
    return m * (m + 1) / 2;
  };
  std::size_t tuples = 0;
  for (int t = 0; t < T; ++t) {
    for (const auto& atoms : inst.transitions[static_cast<std::size_t>(t)]) {
      for (int k = 0; k <= K; ++k) tuples += atoms.size() * action_count(k);
    }
    if (tuples > budget) {
      throw ValidationError("oracle budget exceeded: more than " + std::to_string(budget) +
                            " (t, d, state, action) tuples");
    }
  }

  Solution sol(T, K, u);
  sol.value_.resize(static_cast<std::size_t>(T) + 1);
  sol.minimizers_.resize(static_cast<std::size_t>(T));

  std::size_t terminal_states = 1;
  if (T > 0) {
    for (const auto& atoms : inst.transitions.back()) {
      for (const auto& a : atoms) {
        terminal_states = std::max(terminal_states, static_cast<std::size_t>(a.next_state) + 1);
      }
    }
  }
  auto& terminal = sol.value_[static_cast<std::size_t>(T)];
  terminal.assign(terminal_states, std::vector<double>(static_cast<std::size_t>(K) + 1));
  for (auto& row : terminal) {
    for (int k = 0; k <= K; ++k) row[static_cast<std::size_t>(k)] = inst.spec.shortfall_penalty * (k * u);
  }

  std::vector<double> q;
  for (int t = T - 1; t >= 0; --t) {
    const auto& states = inst.transitions[static_cast<std::size_t>(t)];
    const auto& next = sol.value_[static_cast<std::size_t>(t) + 1];
    auto& vt = sol.value_[static_cast<std::size_t>(t)];
    auto& mt = sol.minimizers_[static_cast<std::size_t>(t)];
    vt.assign(states.size(), std::vector<double>(static_cast<std::size_t>(K) + 1, 0.0));
    mt.resize(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
      const auto& atoms = states[s];
      mt[s].assign(static_cast<std::size_t>(K) + 1,
                   std::vector<std::vector<Action>>(atoms.size()));
      for (int k = 0; k <= K; ++k) {
        double expected = 0.0;
        for (std::size_t a = 0; a < atoms.size(); ++a) {
          const PriceAtom& atom = atoms[a];
          const auto& vn = next[static_cast<std::size_t>(atom.next_state)];
          double best = std::numeric_limits<double>::infinity();
          std::vector<Action> candidates;
          q.clear();
          const int e_max = std::min(k, n);
          for (int e = 0; e <= e_max; ++e) {
            for (int r = 0; r <= e; ++r) {
              const double cost = atom.prices.energy * (e * u) -
                                  atom.prices.reserve * (r * u) +
                                  vn[static_cast<std::size_t>(k - e)];
              q.push_back(cost);
              candidates.push_back({e, r});
              best = std::min(best, cost);
            }
          }
          auto& keep = mt[s][static_cast<std::size_t>(k)][a];
          for (std::size_t c = 0; c < q.size(); ++c) {
            if (q[c] <= best + kTieTolerance) keep.push_back(candidates[c]);
          }
          expected += atom.probability * best;
        }
        vt[s][static_cast<std::size_t>(k)] = expected;
      }
    }
  }
  return sol;
}

Report compare(const DiscreteInstance& inst, const Solution& sol,
               const ThresholdTable& table) {
  Report report;
  for (int k = 0; k <= sol.max_index(); ++k) {
    const double err =
        std::abs(sol.value(0, 0, k) - value_function(table, inst.spec, k * sol.unit()));
    report.max_value_error = std::max(report.max_value_error, err);
  }
  check_actions(inst, sol,
                [&](const LoadState& st, PricePair p) {
                  return optimal_decision(table, st, p, inst.spec);
                },
                report);
  return report;
}

Report compare(const DiscreteInstance& inst, const Solution& sol,
               const CoefficientGrid& grid, double psi0) {
  Report report;
  for (int k = 0; k <= sol.max_index(); ++k) {
    const double err = std::abs(sol.value(0, 0, k) -
                                value_function(grid, inst.spec, k * sol.unit(), psi0));
    report.max_value_error = std::max(report.max_value_error, err);
  }
  check_actions(inst, sol,
                [&](const LoadState& st, PricePair p) {
                  return optimal_decision(grid, st, p, inst.spec);
                },
                report);
  return report;
}

DiscreteInstance random_independent(std::mt19937_64& rng, const RandomOptions& options) {
  constexpr double kCapacities[] = {0.5, 1.0, 2.0};
  LoadSpec spec;
  spec.horizon = uniform_int(rng, 1, options.max_horizon);
  spec.capacity = kCapacities[uniform_int(rng, 0, 2)];
  spec.shortfall_penalty = 0.5 * uniform_int(rng, 10, 40);
  std::vector<std::vector<std::pair<PricePair, double>>> stages;
  for (int t = 0; t < spec.horizon; ++t) {
    const int atoms = uniform_int(rng, 1, options.max_atoms);
    std::vector<std::pair<PricePair, double>> stage;
    double total = 0.0;
    for (int a = 0; a < atoms; ++a) {
      const PricePair p{0.5 * uniform_int(rng, 0, 40), 0.5 * uniform_int(rng, -6, 10)};
      const double w = uniform_int(rng, 1, 8);
      stage.push_back({p, w});
      total += w;
    }
    for (auto& [p, w] : stage) w /= total;
    stages.push_back(std::move(stage));
  }
  spec.demand = (spec.horizon + 1) * spec.capacity;
  return DiscreteInstance::independent(spec, stages, options.step);
}

PriceModel to_price_model(const DiscreteInstance& inst) {
  std::vector<StageInnovations> stages;
  for (const auto& states : inst.transitions) {
    if (states.size() != 1) {
      throw ValidationError("only single-state (independent) instances map to a price model");
    }
    StageInnovations s;
    for (const auto& a : states.front()) {
      s.joint.push_back({a.prices.energy, a.prices.reserve, a.probability});
    }
    stages.push_back(std::move(s));
  }
  return PriceModel(std::move(stages));
}

DiscreteInstance from_price_model(const LoadSpec& spec, const PriceModel& model,
                                  double step, std::size_t max_states) {
  if (model.horizon() != spec.horizon) {
    throw ValidationError("price model and load horizon differ");
  }
  DiscreteInstance inst;
  inst.spec = spec;
  inst.step = step;
  std::vector<double> psi{model.initial_effective_price()};
  for (int t = 0; t < model.horizon(); ++t) {
    const StageInnovations& st = model.stage(t);
    std::vector<JointSample> eps = st.joint;
    if (eps.empty()) {
      if (!st.energy.is_discrete() || !st.reserve.is_discrete()) {
        throw ValidationError("oracle enumeration needs discrete innovations");
      }
      for (const auto& e : st.energy.atoms()) {
        for (const auto& r : st.reserve.atoms()) {
          eps.push_back({e.value, r.value, e.weight * r.weight});
        }
      }
    }
    double total = 0.0;
    for (const auto& e : eps) total += e.weight;

    std::map<double, int> next_index;
    std::vector<std::vector<PriceAtom>> states;
    for (double s : psi) {
      const PricePair mean = model.seasonal_mean(t, s);
      std::vector<PriceAtom> atoms;
      for (const auto& e : eps) {
        const PricePair p{mean.energy + e.energy, mean.reserve + e.reserve};
        const double x = effective_price(p);
        auto [it, fresh] = next_index.try_emplace(x, static_cast<int>(next_index.size()));
        atoms.push_back({p, e.weight / total, it->second});
      }
      states.push_back(std::move(atoms));
    }
    if (next_index.size() > max_states) {
      throw ValidationError("oracle enumeration exceeds " + std::to_string(max_states) +
                            " price states at stage " + std::to_string(t + 1));
    }
    inst.transitions.push_back(std::move(states));
    psi.assign(next_index.size(), 0.0);
    for (const auto& [x, idx] : next_index) psi[static_cast<std::size_t>(idx)] = x;
  }
  return inst;
}

}  // namespace flexload::oracle
