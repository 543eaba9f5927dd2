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


#ifndef FLEXLOAD_CLI_COMMANDS_HPP_
#define FLEXLOAD_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flexload::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitOracleMismatch = 4;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;  // 0: machine parallelism
  bool quiet = false;
};

struct ThresholdsArgs {
  std::filesystem::path load;
  std::filesystem::path prices;
  std::string mode = "independent";
  double grid_delta = 1e-2;
  std::filesystem::path out;
  std::filesystem::path grid_out;  // optional, correlated mode only
};

struct PolicyArgs {
  std::filesystem::path table;
  std::filesystem::path path;
  std::filesystem::path load;
  std::filesystem::path out;
};

struct SimulateArgs {
  std::filesystem::path config;  // empty: synthetic default
  std::filesystem::path out_dir;
};

struct OracleCheckArgs {
  int instances = 100;
  int max_horizon = 6;
  std::filesystem::path out;
  // All three set: check this table instead of random instances.
  std::filesystem::path table;
  std::filesystem::path load;
  std::filesystem::path prices;
};

struct BenchArgs {
  int max_horizon = 800;
  int step = 100;
  std::filesystem::path out_dir;
};

// Each command validates all inputs, computes, then writes its outputs and
// a manifest (temp file + rename). Errors propagate as ValidationError /
// NumericalError; the return value is the process exit code.
int run_thresholds(const GlobalOptions& g, const ThresholdsArgs& a, std::ostream& log);
int run_policy(const GlobalOptions& g, const PolicyArgs& a, std::ostream& log);
int run_simulate(const GlobalOptions& g, const SimulateArgs& a, std::ostream& log);
int run_oracle_check(const GlobalOptions& g, const OracleCheckArgs& a, std::ostream& log);
int run_bench(const GlobalOptions& g, const BenchArgs& a, std::ostream& log);

// Least-squares slope of log(seconds) against log(T).
double fit_exponent(const std::vector<int>& horizons, const std::vector<double>& seconds);

// Parses argv and dispatches; maps exceptions to exit codes.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace flexload::cli

#endif  // FLEXLOAD_CLI_COMMANDS_HPP_
