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

#ifndef FLEXLOAD_THRESHOLD_TABLE_HPP_
#define FLEXLOAD_THRESHOLD_TABLE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "flexload/types.hpp"

namespace flexload {

/// Optimal thresholds m̂ⁱ_t for t in [0, T] and pieces i in [0, T].
///
/// Piece i covers remaining demand in ((i-1)ē, iē]. Piece 0 is the
/// "below all prices" sentinel and is not stored. Row T is the terminal row
/// (every piece at the shortfall penalty). The decision at stage t < T reads
/// row t + 1; row 0 holds the slopes of the time-0 value function.
class ThresholdTable {
 public:
  // All entries start at the shortfall penalty.
  ThresholdTable(int horizon, double capacity, double shortfall_penalty);

  int horizon() const { return horizon_; }
  double capacity() const { return capacity_; }
  double shortfall_penalty() const { return penalty_; }

  // 0 <= t <= T, 0 <= i <= T.
  Threshold at(int t, int i) const;
  // 0 <= t <= T, 1 <= i <= T.
  double value(int t, int i) const;
  void set(int t, int i, double v);

  // Pieces 1..T of row t, nondecreasing for compiled tables.
  std::span<const double> row(int t) const;
  std::span<double> mutable_row(int t);

  // Last `horizon` stages as a standalone table (pieces beyond the new
  // horizon are dropped; they sit at the penalty in those rows).
  ThresholdTable tail(int horizon) const;

  // FNV-1a over the value bit patterns and metadata.
  std::uint64_t digest() const;

  friend bool operator==(const ThresholdTable&, const ThresholdTable&) = default;

 private:
  void check_row(int t) const;

  int horizon_;
  double capacity_;
  double penalty_;
  std::vector<double> values_;  // row-major, (T + 1) x T
};

// (d - j*cap)^+ ∧ cap: how much of piece j (0-based) demand d occupies.
double piece_fill(double demand, int piece, double capacity);

// Continuous, convex, piecewise-linear cost-to-go with breakpoints at
// multiples of the capacity: slopes[j] applies to the j-th capacity-sized
// piece, terminal_slope beyond slopes.size() * capacity.
struct PiecewiseLinearValue {
  double capacity = 1.0;
  std::vector<double> slopes;
  double terminal_slope = 0.0;

  double operator()(double demand) const;
  bool is_convex() const;
};

// Cost-to-go at stage t as a function of remaining demand.
PiecewiseLinearValue value_curve(const ThresholdTable& table, int t = 0);

// Expected optimal cost J*_0(demand). Uses spec.capacity for breakpoints.
double value_function(const ThresholdTable& table, const LoadSpec& spec,
                      double demand);

}  // namespace flexload

#endif  // FLEXLOAD_THRESHOLD_TABLE_HPP_
