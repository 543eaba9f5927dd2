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


#include <iostream>
#include <ostream>
#include <streambuf>

#include "CLI11.hpp"
#include "flexload/types.hpp"
#include "flexload_cli/commands.hpp"

#ifndef FLEXLOAD_VERSION
#define FLEXLOAD_VERSION "0.0.0"
#endif

namespace flexload::cli {
namespace {

class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"flexload: optimal threshold policies for flexible loads offering reserve"};
  app.set_version_flag("--version", FLEXLOAD_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every random draw");
  app.add_option("--workers", g.workers, "Worker threads (default: all cores)");
  app.add_flag("--quiet", g.quiet, "Suppress the summary");

  ThresholdsArgs th;
  auto* cmd_th = app.add_subcommand("thresholds", "Compile the threshold table");
  cmd_th->add_option("--load", th.load, "LoadSpec JSON")->required();
  cmd_th->add_option("--prices", th.prices, "PriceModel JSON or price CSV")->required();
  cmd_th->add_option("--mode", th.mode, "independent | correlated | deterministic")
      ->check(CLI::IsMember({"independent", "correlated", "deterministic"}));
  cmd_th->add_option("--grid-delta", th.grid_delta, "Correlated grid step")
      ->check(CLI::PositiveNumber);
  cmd_th->add_option("--out", th.out, "Table CSV")->required();
  cmd_th->add_option("--grid-out", th.grid_out, "Coefficient grid CSV (correlated)");

  PolicyArgs po;
  auto* cmd_po = app.add_subcommand("policy", "Roll the optimal policy along a price path");
  cmd_po->add_option("--table", po.table, "Table CSV")->required();
  cmd_po->add_option("--path", po.path, "Price path CSV (stage,pi_e,pi_r)")->required();
  cmd_po->add_option("--load", po.load, "LoadSpec JSON")->required();
  cmd_po->add_option("--out", po.out, "Rollout CSV")->required();

  SimulateArgs si;
  auto* cmd_si = app.add_subcommand("simulate", "Monte Carlo fleet experiment");
  cmd_si->add_option("--config", si.config, "SimConfig JSON (default: synthetic)");
  cmd_si->add_option("--out-dir", si.out_dir, "Output directory")->required();

  OracleCheckArgs oc;
  auto* cmd_oc = app.add_subcommand("oracle-check", "Compare against the brute-force DP");
  cmd_oc->add_option("--instances", oc.instances, "Random instances");
  cmd_oc->add_option("--max-horizon", oc.max_horizon, "Largest horizon");
  cmd_oc->add_option("--out", oc.out, "Report CSV")->required();
  cmd_oc->add_option("--table", oc.table, "Check this table CSV instead");
  cmd_oc->add_option("--load", oc.load, "LoadSpec JSON for --table");
  cmd_oc->add_option("--prices", oc.prices, "Discrete independent prices for --table");

  BenchArgs be;
  auto* cmd_be = app.add_subcommand("bench", "Time compile_independent against T");
  cmd_be->add_option("--max-horizon", be.max_horizon, "Largest horizon");
  cmd_be->add_option("--step", be.step, "Horizon step");
  cmd_be->add_option("--out", be.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  NullBuffer null_buffer;
  std::ostream null_stream(&null_buffer);
  std::ostream& log = g.quiet ? null_stream : out;
  try {
    if (cmd_th->parsed()) return run_thresholds(g, th, log);
    if (cmd_po->parsed()) return run_policy(g, po, log);
    if (cmd_si->parsed()) return run_simulate(g, si, log);
    if (cmd_oc->parsed()) return run_oracle_check(g, oc, log);
    if (cmd_be->parsed()) return run_bench(g, be, log);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace flexload::cli
