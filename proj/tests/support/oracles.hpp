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


// Reference computations that share no code with the library. Each one
// is deliberately naive: slow, obvious, and easy to check by eye.

#ifndef FLEXLOAD_TESTS_SUPPORT_ORACLES_HPP_
#define FLEXLOAD_TESTS_SUPPORT_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace flexload::testing {

// Adaptive Simpson on [a, b]. Integrands here are piecewise smooth, so
// callers split at the known jumps and kinks first.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-14, int depth = 48) {
  struct Rec {
    const std::function<double(double)>& f;
    double operator()(double a, double b, double fa, double fm, double fb, double whole,
                      double tol, int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
      }
      return (*this)(a, m, fa, flm, fm, left, tol / 2, depth - 1) +
             (*this)(m, b, fm, frm, fb, right, tol / 2, depth - 1);
    }
  };
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec{f}(a, b, fa, fm, fb, whole, tol, depth);
}

// Integral over [a, b] with the interval cut at every breakpoint inside it.
inline double integrate_split(const std::function<double(double)>& f, double a, double b,
                              std::vector<double> cuts) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = std::max(cuts[k], a), hi = std::min(cuts[k + 1], b);
    if (hi > lo) {
      // Sample strictly inside so a jump sitting on a cut does not leak in.
      const double in_lo = std::nextafter(lo, hi), in_hi = std::nextafter(hi, lo);
      total += simpson([&](double x) { return f(std::clamp(x, in_lo, in_hi)); }, lo, hi);
    }
  }
  return total;
}

// Deterministic thresholds by direct recursion on the closed form
// G(z, z') = (z' - max(z, p))^+, rows [t][i] with i = 0 the sentinel
// (stored as -inf).
inline std::vector<std::vector<double>> deterministic_thresholds(
    const std::vector<double>& effective, double penalty) {
  const int T = static_cast<int>(effective.size());
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> m(T + 1, std::vector<double>(T + 1, penalty));
  for (auto& row : m) row[0] = ninf;
  for (int t = T - 1; t >= 0; --t) {
    for (int i = 1; i <= T; ++i) {
      const double z = m[t + 1][i - 1], zp = m[t + 1][i];
      const double g = std::max(0.0, zp - std::max(z, effective[t]));
      m[t][i] = zp - g;
    }
  }
  return m;
}

// Cost of buying d units over a deterministic effective-price path when
// every slot can take at most cap: fill the cheapest slots first, anything
// left pays the penalty. Optimal for deterministic prices.
inline double greedy_deterministic_cost(std::vector<double> prices, double d, double cap,
                                        double penalty) {
  std::sort(prices.begin(), prices.end());
  double cost = 0.0;
  for (double p : prices) {
    if (d <= 0.0 || p >= penalty) break;
    const double e = std::min(d, cap);
    cost += p * e;
    d -= e;
  }
  return cost + penalty * std::max(d, 0.0);
}

}  // namespace flexload::testing

#endif  // FLEXLOAD_TESTS_SUPPORT_ORACLES_HPP_
