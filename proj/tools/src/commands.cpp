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


#include "flexload_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "flexload/fleet_sim.hpp"
#include "flexload/io.hpp"
#include "flexload/oracle.hpp"
#include "flexload/policy.hpp"
#include "flexload/threshold_engine.hpp"
#include "flexload/worker_pool.hpp"
#include "flexload_cli/manifest.hpp"
#include "json.hpp"

namespace flexload::cli {
namespace fs = std::filesystem;
namespace {

using nlohmann::json;

unsigned resolve_workers(const GlobalOptions& g, unsigned fallback) {
  return g.workers == 0 ? fallback : g.workers;
}

// Collects outputs in memory so nothing is written before every input has
// been validated and every result computed.
class PendingOutputs {
 public:
  void add(fs::path path, std::string bytes, bool timing = false) {
    files_.push_back({std::move(path), std::move(bytes), timing});
  }

  // Writes every file, then the manifest next to them.
  void commit(RunManifest& manifest, const fs::path& manifest_path) {
    for (const auto& f : files_) {
      if (f.path.has_parent_path()) fs::create_directories(f.path.parent_path());
      write_file_atomic(f.path, f.bytes);
      if (f.timing) {
        manifest.add_timing_output(f.path);
      } else {
        manifest.add_output(f.path, f.bytes);
      }
    }
    if (manifest_path.has_parent_path()) fs::create_directories(manifest_path.parent_path());
    write_file_atomic(manifest_path, manifest.to_json());
  }

 private:
  struct File {
    fs::path path;
    std::string bytes;
    bool timing;
  };
  std::vector<File> files_;
};

fs::path manifest_beside(const fs::path& out) {
  fs::path m = out;
  m.replace_extension(".manifest.json");
  return m;
}

void require(const fs::path& p, const char* flag) {
  if (p.empty()) throw ValidationError(std::string(flag) + " is required");
}

PriceModel read_price_model(const fs::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".json") return io::price_model_from_json(text);
  return io::price_model_from_csv(text);
}

bool is_point_mass(const StageInnovations& s) {
  if (!s.joint.empty()) return s.joint.size() == 1;
  return s.energy.kind() == DistributionKind::point_mass &&
         s.reserve.kind() == DistributionKind::point_mass;
}

std::string grid_to_csv(const CoefficientGrid& grid) {
  std::string out = "t,i,psi,m\n";
  for (int t = 0; t <= grid.horizon(); ++t) {
    for (int i = 1; i <= grid.horizon(); ++i) {
      auto col = grid.column(t, i);
      for (std::size_t k = 0; k < grid.nodes(); ++k) {
        out += std::to_string(t) + "," + std::to_string(i) + "," +
               io::format_number(grid.node(k)) + "," + io::format_number(col[k]) + "\n";
      }
    }
  }
  return out;
}

PriceModel bench_model(int horizon) {
  const auto base = fleet::SimConfig::synthetic_default();
  std::vector<StageInnovations> stages;
  stages.reserve(static_cast<std::size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    const double mean = base.prices.energy_mean[static_cast<std::size_t>(t) % 24];
    stages.push_back({InnovationDistribution::gaussian(mean, base.prices.energy_stddev),
                      InnovationDistribution::point_mass(1.0 + 0.1 * mean),
                      {}});
  }
  return PriceModel(std::move(stages));
}

}  // namespace

double fit_exponent(const std::vector<int>& horizons, const std::vector<double>& seconds) {
  const std::size_t n = std::min(horizons.size(), seconds.size());
  if (n < 2) throw ValidationError("exponent fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log(static_cast<double>(horizons[k]));
    const double y = std::log(std::max(seconds[k], 1e-12));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(n);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

int run_thresholds(const GlobalOptions& g, const ThresholdsArgs& a, std::ostream& log) {
  require(a.load, "--load");
  require(a.prices, "--prices");
  require(a.out, "--out");
  if (a.mode != "independent" && a.mode != "correlated" && a.mode != "deterministic") {
    throw ValidationError("--mode must be independent, correlated or deterministic");
  }
  if (!a.grid_out.empty() && a.mode != "correlated") {
    throw ValidationError("--grid-out needs --mode correlated");
  }
  const LoadSpec spec = io::load_spec_from_json(read_file(a.load));
  const PriceModel model = read_price_model(a.prices);
  if (model.horizon() != spec.horizon) {
    throw ValidationError("price model has " + std::to_string(model.horizon()) +
                          " stages, load horizon is " + std::to_string(spec.horizon));
  }

  RunManifest manifest("thresholds");
  manifest.set("mode", a.mode);
  manifest.set_input("load", a.load);
  manifest.set_input("prices", a.prices);
  manifest.set_seed(g.seed.value_or(0));

  WorkerPool pool(resolve_workers(g, WorkerPool::default_workers()));
  PendingOutputs outputs;
  if (a.mode == "correlated") {
    manifest.set("grid_delta", a.grid_delta);
    CorrelatedOptions opts;
    opts.grid_delta = a.grid_delta;
    opts.pool = &pool;
    const CorrelatedSolution sol = compile_correlated(spec, model, opts);
    outputs.add(a.out, io::table_to_csv(sol.thresholds));
    if (!a.grid_out.empty()) outputs.add(a.grid_out, grid_to_csv(sol.coefficients));
    log << "grid " << sol.coefficients.nodes() << " nodes on ["
        << io::format_number(sol.coefficients.psi_min()) << ", "
        << io::format_number(sol.coefficients.psi_max()) << "]\n"
        << "J*(" << io::format_number(spec.demand) << ") = "
        << io::format_number(value_function(sol.coefficients, spec, spec.demand,
                                            model.initial_effective_price()))
        << "\n";
  } else {
    if (a.mode == "deterministic") {
      for (int t = 0; t < model.horizon(); ++t) {
        if (!is_point_mass(model.stage(t))) {
          throw ValidationError("--mode deterministic needs point-mass prices (stage " +
                                std::to_string(t) + ")");
        }
      }
    }
    const ThresholdTable table = compile_independent(spec, model, CompileOptions{&pool});
    outputs.add(a.out, io::table_to_csv(table));
    log << "J*(" << io::format_number(spec.demand)
        << ") = " << io::format_number(value_function(table, spec, spec.demand)) << "\n";
  }
  outputs.commit(manifest, manifest_beside(a.out));
  log << "wrote " << a.out.string() << "\n";
  return kExitOk;
}

int run_policy(const GlobalOptions& g, const PolicyArgs& a, std::ostream& log) {
  require(a.table, "--table");
  require(a.path, "--path");
  require(a.load, "--load");
  require(a.out, "--out");
  const LoadSpec spec = io::load_spec_from_json(read_file(a.load));
  const ThresholdTable table =
      io::table_from_csv(read_file(a.table), spec.capacity, spec.shortfall_penalty);
  if (table.horizon() != spec.horizon) {
    throw ValidationError("table horizon " + std::to_string(table.horizon()) +
                          " differs from load horizon " + std::to_string(spec.horizon));
  }
  const std::vector<PricePair> path = io::price_path_from_csv(read_file(a.path));
  const Rollout r = rollout(spec, path, [&](const LoadState& st, PricePair p) {
    return optimal_decision(table, st, p, spec);
  });

  RunManifest manifest("policy");
  manifest.set_input("table", a.table);
  manifest.set_input("path", a.path);
  manifest.set_input("load", a.load);
  manifest.set_seed(g.seed.value_or(0));
  PendingOutputs outputs;
  outputs.add(a.out, io::rollout_to_csv(r, spec));
  outputs.commit(manifest, manifest_beside(a.out));
  log << "total cost " << io::format_number(r.total_cost) << " (shortfall "
      << io::format_number(r.terminal_demand) << ")\n";
  return kExitOk;
}

int run_simulate(const GlobalOptions& g, const SimulateArgs& a, std::ostream& log) {
  require(a.out_dir, "--out-dir");
  fleet::SimConfig config = a.config.empty() ? fleet::SimConfig::synthetic_default()
                                             : io::sim_config_from_json(read_file(a.config));
  if (g.seed) config.seed = *g.seed;
  config.validate();

  WorkerPool pool(resolve_workers(g, WorkerPool::default_workers()));
  const fleet::SimResult res = fleet::run(config, &pool);

  std::string costs = "policy,mean,halfwidth,normalized\n";
  std::string diurnal = "slot,policy,mean_load\n";
  json per_policy = json::object();
  for (const auto& p : res.policies) {
    const std::string name(to_string(p.kind));
    costs += name + "," + io::format_number(p.mean_cost) + "," +
             io::format_number(p.halfwidth) + "," + io::format_number(p.normalized_mean) + "\n";
    per_policy[name] = {{"mean_cost", p.mean_cost},
                        {"halfwidth", p.halfwidth},
                        {"normalized_mean", p.normalized_mean},
                        {"normalized_halfwidth", p.normalized_halfwidth},
                        {"par", p.par},
                        {"reserve_offered", p.reserve_offered}};
  }
  for (std::size_t s = 0; s < static_cast<std::size_t>(config.slots_per_day()); ++s) {
    for (const auto& p : res.policies) {
      diurnal += std::to_string(s) + "," + std::string(to_string(p.kind)) + "," +
                 io::format_number(p.diurnal_load[s]) + "\n";
    }
  }
  const json summary = {
      {"seed", config.seed},
      {"scenario_seeds", "splitmix64(seed, 2k) sessions, splitmix64(seed, 2k+1) prices"},
      {"n_scenarios", config.n_scenarios},
      {"fleet_size", config.fleet_size},
      {"sessions", res.sessions},
      {"policies", per_policy},
      {"as_dominance",
       {{"sessions_checked", res.dominance_checked},
        {"violations", res.dominance_violations},
        {"max_excess", res.max_dominance_excess}}},
      {"scenarios_without_as_saving", res.scenarios_not_saving},
      {"max_budget_error", res.max_budget_error},
      {"threshold_tables", {{"compiled", res.tables_compiled}, {"augmented", res.tables_augmented}}}};

  RunManifest manifest("simulate");
  manifest.set("sim_config", "fnv1a:" + hex64(fnv1a(io::to_json(config))));
  manifest.set_seed(config.seed);
  PendingOutputs outputs;
  outputs.add(a.out_dir / "costs.csv", costs);
  outputs.add(a.out_dir / "diurnal.csv", diurnal);
  outputs.add(a.out_dir / "summary.json", summary.dump(2) + "\n");
  outputs.add(a.out_dir / "config.json", io::to_json(config));
  outputs.commit(manifest, a.out_dir / "manifest.json");

  log << "policy                 mean cost   +-95%      normalized  PAR\n";
  for (const auto& p : res.policies) {
    char line[160];
    std::snprintf(line, sizeof line, "%-22s %-11.5g %-10.3g %-11.4f %.3f\n",
                  std::string(to_string(p.kind)).c_str(), p.mean_cost, p.halfwidth,
                  p.normalized_mean, p.par);
    log << line;
  }
  log << "AS dominance violations: " << res.dominance_violations << " of "
      << res.dominance_checked << " sessions\n";
  return kExitOk;
}

namespace {

struct OracleRow {
  int horizon = 0;
  double capacity = 0;
  double penalty = 0;
  std::size_t atoms = 0;
  oracle::Report report;

  bool pass() const { return report.max_value_error < 1e-9 && report.actions_optimal(); }
};

OracleRow oracle_row(const oracle::DiscreteInstance& inst, const ThresholdTable& table) {
  OracleRow r;
  r.horizon = inst.spec.horizon;
  r.capacity = inst.spec.capacity;
  r.penalty = inst.spec.shortfall_penalty;
  for (const auto& st : inst.transitions) {
    for (const auto& state : st) r.atoms = std::max(r.atoms, state.size());
  }
  r.report = oracle::compare(inst, oracle::solve_dp(inst), table);
  return r;
}

// Report CSV plus the failure count; mismatches are logged.
std::pair<std::string, int> oracle_report(const std::vector<OracleRow>& rows, std::ostream& log,
                                          double& worst) {
  std::string csv =
      "instance,horizon,capacity,penalty,max_atoms,max_value_error,actions_checked,"
      "actions_outside,pass\n";
  int failures = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const OracleRow& r = rows[k];
    const bool pass = r.pass();
    failures += pass ? 0 : 1;
    worst = std::max(worst, r.report.max_value_error);
    csv += std::to_string(k) + "," + std::to_string(r.horizon) + "," +
           io::format_number(r.capacity) + "," + io::format_number(r.penalty) + "," +
           std::to_string(r.atoms) + "," + io::format_number(r.report.max_value_error) + "," +
           std::to_string(r.report.actions_checked) + "," +
           std::to_string(r.report.actions_outside) + "," + (pass ? "pass" : "fail") + "\n";
    if (!pass && !r.report.first_mismatch.empty()) {
      log << "instance " << k << ": " << r.report.first_mismatch << "\n";
    }
  }
  return {csv, failures};
}

// A table from disk against the brute-force DP of its own load and prices.
int check_given_table(const GlobalOptions& g, const OracleCheckArgs& a, std::ostream& log) {
  require(a.load, "--load");
  require(a.prices, "--prices");
  const LoadSpec spec = io::load_spec_from_json(read_file(a.load));
  const PriceModel model = read_price_model(a.prices);
  if (!model.is_independent()) {
    throw ValidationError("oracle-check --table needs independent prices");
  }
  const ThresholdTable table =
      io::table_from_csv(read_file(a.table), spec.capacity, spec.shortfall_penalty);
  if (table.horizon() != spec.horizon || model.horizon() != spec.horizon) {
    throw ValidationError("table, prices and load disagree on the horizon");
  }
  const oracle::DiscreteInstance inst = oracle::from_price_model(spec, model);
  const std::vector<OracleRow> rows{oracle_row(inst, table)};
  double worst = 0.0;
  const auto [csv, failures] = oracle_report(rows, log, worst);

  RunManifest manifest("oracle-check");
  manifest.set_input("load", a.load);
  manifest.set_input("prices", a.prices);
  manifest.set_input("table", a.table);
  manifest.set_seed(g.seed.value_or(0));
  PendingOutputs outputs;
  outputs.add(a.out, csv);
  outputs.commit(manifest, manifest_beside(a.out));
  log << (failures == 0 ? "table matches" : "table does not match")
      << " the brute-force DP (max value error " << io::format_number(worst) << ")\n";
  return failures == 0 ? kExitOk : kExitOracleMismatch;
}

}  // namespace

int run_oracle_check(const GlobalOptions& g, const OracleCheckArgs& a, std::ostream& log) {
  require(a.out, "--out");
  if (!a.table.empty()) return check_given_table(g, a, log);
  if (!a.load.empty() || !a.prices.empty()) {
    throw ValidationError("--load and --prices go with --table");
  }
  if (a.instances < 1) throw ValidationError("--instances must be >= 1");
  if (a.max_horizon < 1 || a.max_horizon > 8) {
    throw ValidationError("--max-horizon must be in [1, 8]");
  }
  const std::uint64_t seed = g.seed.value_or(0);
  std::vector<OracleRow> rows(static_cast<std::size_t>(a.instances));
  WorkerPool pool(resolve_workers(g, WorkerPool::default_workers()));
  pool.parallel_for(rows.size(), [&](std::size_t k) {
    std::mt19937_64 rng(fleet::scenario_seed(seed, k));
    oracle::RandomOptions opts;
    opts.max_horizon = a.max_horizon;
    const oracle::DiscreteInstance inst = oracle::random_independent(rng, opts);
    rows[k] = oracle_row(inst, compile_independent(inst.spec, oracle::to_price_model(inst)));
  });
  double worst = 0.0;
  const auto [csv, failures] = oracle_report(rows, log, worst);

  RunManifest manifest("oracle-check");
  manifest.set("instances", static_cast<std::int64_t>(a.instances));
  manifest.set("max_horizon", static_cast<std::int64_t>(a.max_horizon));
  manifest.set_seed(seed);
  PendingOutputs outputs;
  outputs.add(a.out, csv);
  outputs.commit(manifest, manifest_beside(a.out));
  log << a.instances - failures << "/" << a.instances
      << " instances match the brute-force DP (max value error "
      << io::format_number(worst) << ")\n";
  return failures == 0 ? kExitOk : kExitOracleMismatch;
}

int run_bench(const GlobalOptions& g, const BenchArgs& a, std::ostream& log) {
  require(a.out_dir, "--out");
  if (a.step < 1 || a.max_horizon < 2 * a.step) {
    throw ValidationError("bench needs --step >= 1 and --max-horizon >= 2 * step");
  }
  // One worker unless asked: timing is the point, and row-level
  // parallelism only pays off for very long horizons.
  WorkerPool pool(resolve_workers(g, 1));
  std::vector<int> horizons;
  std::vector<double> seconds;
  std::string bench = "T,seconds\n";
  std::string digests = "T,table_digest\n";
  // Untimed warm-up so page faults and cold caches do not land on the first T.
  (void)compile_independent({0.0, 1.0, a.step, 120.0}, bench_model(a.step),
                            CompileOptions{&pool});
  for (int T = a.step; T <= a.max_horizon; T += a.step) {
    const PriceModel model = bench_model(T);
    const LoadSpec spec{0.0, 1.0, T, 120.0};
    double best = INFINITY;
    double spent = 0.0;
    std::uint64_t digest = 0;
    for (int rep = 0; rep < 25 && (rep < 3 || spent < 0.2); ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const ThresholdTable table = compile_independent(spec, model, CompileOptions{&pool});
      const double s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      best = std::min(best, s);
      spent += s;
      digest = table.digest();
    }
    horizons.push_back(T);
    seconds.push_back(best);
    char line[64];
    std::snprintf(line, sizeof line, "%d,%.6e\n", T, best);
    bench += line;
    digests += std::to_string(T) + "," + hex64(digest) + "\n";
  }
  const double exponent = fit_exponent(horizons, seconds);

  RunManifest manifest("bench");
  manifest.set("max_horizon", static_cast<std::int64_t>(a.max_horizon));
  manifest.set("step", static_cast<std::int64_t>(a.step));
  manifest.set_seed(g.seed.value_or(0));
  PendingOutputs outputs;
  outputs.add(a.out_dir / "bench.csv", bench, /*timing=*/true);
  outputs.add(a.out_dir / "digests.csv", digests);
  outputs.commit(manifest, a.out_dir / "manifest.json");
  char line[128];
  std::snprintf(line, sizeof line, "fitted exponent %.3f over T in [%d, %d]; T=%d took %.4f s\n",
                exponent, horizons.front(), horizons.back(), horizons.back(), seconds.back());
  log << line;
  return kExitOk;
}

}  // namespace flexload::cli
