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


#include "flexload/threshold_table.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <string>

namespace flexload {

void LoadSpec::validate() const {
  if (!std::isfinite(demand) || demand < 0.0) {
    throw ValidationError("demand must be finite and >= 0");
  }
  if (!std::isfinite(capacity) || !(capacity > 0.0)) {
    throw ValidationError("capacity must be finite and > 0");
  }
  if (horizon < 1) throw ValidationError("horizon must be >= 1");
  if (!std::isfinite(shortfall_penalty)) {
    throw ValidationError("shortfall penalty must be finite");
  }
}

std::string to_string(const Threshold& t) {
  if (t.is_below_all()) return "-inf";
  std::ostringstream out;
  out.precision(12);
  out << t.value();
  return out.str();
}

ThresholdTable::ThresholdTable(int horizon, double capacity,
                               double shortfall_penalty)
    : horizon_(horizon), capacity_(capacity), penalty_(shortfall_penalty) {
  if (horizon < 1) throw ValidationError("table horizon must be >= 1");
  if (!(capacity > 0.0) || !std::isfinite(capacity)) {
    throw ValidationError("table capacity must be finite and > 0");
  }
  if (!std::isfinite(shortfall_penalty)) {
    throw ValidationError("shortfall penalty must be finite");
  }
  const auto n = static_cast<std::size_t>(horizon);
  values_.assign((n + 1) * n, shortfall_penalty);
}

void ThresholdTable::check_row(int t) const {
  if (t < 0 || t > horizon_) {
    throw ValidationError("table stage " + std::to_string(t) + " out of range");
  }
}

Threshold ThresholdTable::at(int t, int i) const {
  if (i == 0) {
    check_row(t);
    return Threshold::below_all();
  }
  return Threshold::at(value(t, i));
}

double ThresholdTable::value(int t, int i) const {
  check_row(t);
  if (i < 1 || i > horizon_) {
    throw ValidationError("table piece " + std::to_string(i) + " out of range");
  }
  return values_[static_cast<std::size_t>(t) * static_cast<std::size_t>(horizon_) +
                 static_cast<std::size_t>(i - 1)];
}

void ThresholdTable::set(int t, int i, double v) {
  check_row(t);
  if (i < 1 || i > horizon_) {
    throw ValidationError("table piece " + std::to_string(i) + " out of range");
  }
  values_[static_cast<std::size_t>(t) * static_cast<std::size_t>(horizon_) +
          static_cast<std::size_t>(i - 1)] = v;
}

std::span<const double> ThresholdTable::row(int t) const {
  check_row(t);
  const auto n = static_cast<std::size_t>(horizon_);
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(t) * n, n);
}

std::span<double> ThresholdTable::mutable_row(int t) {
  check_row(t);
  const auto n = static_cast<std::size_t>(horizon_);
  return std::span<double>(values_).subspan(static_cast<std::size_t>(t) * n, n);
}

ThresholdTable ThresholdTable::tail(int horizon) const {
  if (horizon < 1 || horizon > horizon_) {
    throw ValidationError("tail horizon " + std::to_string(horizon) +
                          " outside [1, " + std::to_string(horizon_) + "]");
  }
  ThresholdTable out(horizon, capacity_, penalty_);
  const int offset = horizon_ - horizon;
  for (int t = 0; t <= horizon; ++t) {
    auto src = row(t + offset);
    auto dst = out.mutable_row(t);
    std::copy_n(src.begin(), horizon, dst.begin());
  }
  return out;
}

std::uint64_t ThresholdTable::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int k = 0; k < 8; ++k) {
      h ^= (word >> (8 * k)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(horizon_));
  mix(std::bit_cast<std::uint64_t>(capacity_));
  mix(std::bit_cast<std::uint64_t>(penalty_));
  for (double v : values_) mix(std::bit_cast<std::uint64_t>(v));
  return h;
}

double piece_fill(double demand, int piece, double capacity) {
  return std::min(positive_part(demand - piece * capacity), capacity);
}

double PiecewiseLinearValue::operator()(double demand) const {
  double total = 0.0;
  const int n = static_cast<int>(slopes.size());
  for (int j = 0; j < n; ++j) {
    const double fill = piece_fill(demand, j, capacity);
    if (fill <= 0.0) break;
    total += slopes[static_cast<std::size_t>(j)] * fill;
  }
  total += terminal_slope * positive_part(demand - n * capacity);
  return total;
}

bool PiecewiseLinearValue::is_convex() const {
  for (std::size_t j = 1; j < slopes.size(); ++j) {
    if (slopes[j] < slopes[j - 1]) return false;
  }
  return slopes.empty() || slopes.back() <= terminal_slope;
}

PiecewiseLinearValue value_curve(const ThresholdTable& table, int t) {
  auto r = table.row(t);
  return {table.capacity(), std::vector<double>(r.begin(), r.end()),
          table.shortfall_penalty()};
}

double value_function(const ThresholdTable& table, const LoadSpec& spec,
                      double demand) {
  if (!(demand >= 0.0)) throw ValidationError("demand must be >= 0");
  PiecewiseLinearValue v = value_curve(table, 0);
  v.capacity = spec.capacity;
  return v(demand);
}

}  // namespace flexload
