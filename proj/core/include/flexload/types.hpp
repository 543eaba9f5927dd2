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

#ifndef FLEXLOAD_TYPES_HPP_
#define FLEXLOAD_TYPES_HPP_

#include <optional>
#include <stdexcept>
#include <string>

namespace flexload {

// Input that violates a documented precondition (bad config, mismatched
// tables, out-of-range stage). The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: fixed point not bracketed, quadrature did not converge,
// tabulated coefficients lost monotonicity. The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// Energy and reserve prices of one market interval. Reserve may be negative;
// only its positive part is ever collected.
struct PricePair {
  double energy = 0.0;
  double reserve = 0.0;

  friend bool operator==(const PricePair&, const PricePair&) = default;
};

// Energy price minus the positive part of the reserve price. The optimal
// policy looks at prices only through this scalar.
constexpr double effective_price(PricePair p) {
  return p.energy - positive_part(p.reserve);
}

// A flexible load: `demand` units of energy due within `horizon` slots, at
// most `capacity` per slot; each unit still unserved at the deadline costs
// `shortfall_penalty`.
struct LoadSpec {
  double demand = 0.0;
  double capacity = 1.0;
  int horizon = 1;
  double shortfall_penalty = 0.0;

  // Throws ValidationError unless demand >= 0, capacity > 0, horizon >= 1
  // and the penalty is finite.
  void validate() const;
};

// A threshold value or the "below all prices" sentinel used for piece 0.
// The sentinel never takes part in arithmetic; comparisons against it are
// resolved symbolically.
class Threshold {
 public:
  static constexpr Threshold below_all() { return Threshold(); }
  static constexpr Threshold at(double v) { return Threshold(v); }

  constexpr bool is_below_all() const { return !value_.has_value(); }
  // Precondition: !is_below_all().
  constexpr double value() const { return *value_; }

  // threshold < price
  constexpr bool below(double price) const {
    return is_below_all() || *value_ < price;
  }
  // threshold <= price
  constexpr bool at_or_below(double price) const {
    return is_below_all() || *value_ <= price;
  }

  friend constexpr bool operator==(const Threshold&,
                                   const Threshold&) = default;

 private:
  constexpr Threshold() = default;
  constexpr explicit Threshold(double v) : value_(v) {}

  std::optional<double> value_;
};

std::string to_string(const Threshold& t);

}  // namespace flexload

#endif  // FLEXLOAD_TYPES_HPP_
