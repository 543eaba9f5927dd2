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

#ifndef FLEXLOAD_SRC_QUADRATURE_HPP_
#define FLEXLOAD_SRC_QUADRATURE_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "flexload/distribution.hpp"
#include "flexload/types.hpp"

namespace flexload::detail {

// Adaptive 61-point Gauss-Kronrod on [a, b], split at every kink strictly
// inside the interval. In strict mode, throws NumericalError when the error
// estimate of any sub-interval stays above the tolerance.
template <typename F>
double integrate(const F& f, double a, double b,
                 std::span<const double> kinks = {},
                 const QuadratureOptions& quad = {}) {
  if (!(a < b)) return 0.0;
  std::vector<double> cuts;
  cuts.reserve(kinks.size() + 2);
  cuts.push_back(a);
  for (double k : kinks) {
    if (k > a && k < b) cuts.push_back(k);
  }
  cuts.push_back(b);
  std::sort(cuts.begin() + 1, cuts.end() - 1);

  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    if (!(lo < hi)) continue;
    double error = 0.0;
    double l1 = 0.0;
    const double piece = Rule::integrate(f, lo, hi, static_cast<unsigned>(quad.max_depth),
                                         quad.rel_tolerance, &error, &l1);
    if (!std::isfinite(piece)) throw NumericalError("quadrature produced a non-finite value");
    // Absolute tolerance, relaxed to 1e-12 relative for large magnitudes.
    const double allowed = std::max(quad.abs_tolerance, 1e-12 * l1);
    if (quad.strict && error > allowed) {
      throw NumericalError("quadrature did not converge on [" +
                           std::to_string(lo) + ", " + std::to_string(hi) +
                           "]");
    }
    total += piece;
  }
  return total;
}

}  // namespace flexload::detail

#endif  // FLEXLOAD_SRC_QUADRATURE_HPP_
