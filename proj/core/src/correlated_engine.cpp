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


// Grid-based recursion for Markov prices. The state is the previous
// effective price psi; m^i_t(psi) = E[M_i(X)] with X the stage-t effective
// price given psi and M_i(x) = median(x, m^{i-1}_{t+1}(x), m^i_{t+1}(x)).

#include <algorithm>
#include <cmath>
#include <string>

#include "flexload/threshold_engine.hpp"

namespace flexload {
namespace {

constexpr double kMonotoneTolerance = 1e-9;
constexpr std::size_t kMaxGridCells = 100'000'000;

// Piecewise-linear f(x) = median(x, lower(x), upper(x)) built from two
// interpolated columns of the next row. lower may be absent (piece 1).
class PieceIntegrand {
 public:
  PieceIntegrand(const CoefficientGrid& grid, int t_next, int piece)
      : grid_(grid), t_next_(t_next), piece_(piece) {}

  double operator()(double x) const {
    const double upper = grid_.coefficient(t_next_, piece_, x);
    double v = std::min(x, upper);
    if (piece_ > 1) v = std::max(v, grid_.coefficient(t_next_, piece_ - 1, x));
    return v;
  }

 private:
  const CoefficientGrid& grid_;
  int t_next_;
  int piece_;
};

// Every x where the identity crosses column (t, piece), flat extensions
// included, in increasing order. These are the kinks of M_i that matter;
// the interpolation kinks at grid nodes are below grid accuracy anyway.
std::vector<double> column_crossings(const CoefficientGrid& grid, int t, int piece) {
  auto col = grid.column(t, piece);
  const std::size_t n = grid.nodes();
  std::vector<double> out;
  if (col.front() < grid.psi_min()) out.push_back(col.front());
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double g0 = grid.node(k) - col[k];
    const double g1 = grid.node(k + 1) - col[k + 1];
    if (g0 == 0.0) out.push_back(grid.node(k));
    if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0)) {
      out.push_back(grid.node(k) + grid.delta() * (-g0) / (g1 - g0));
    }
  }
  if (grid.psi_max() - col.back() == 0.0) out.push_back(grid.psi_max());
  if (col.back() > grid.psi_max()) out.push_back(col.back());
  std::sort(out.begin(), out.end());
  return out;
}

void append_inside(const std::vector<double>& sorted, double lo, double hi,
                   std::vector<double>& out) {
  auto first = std::upper_bound(sorted.begin(), sorted.end(), lo);
  auto last = std::lower_bound(first, sorted.end(), hi);
  out.insert(out.end(), first, last);
}

struct Range {
  double lo;
  double hi;
};

Range propagate_support(const LoadSpec& spec, const PriceModel& model) {
  const double psi0 = model.initial_effective_price();
  Range all{std::min(psi0, spec.shortfall_penalty), std::max(psi0, spec.shortfall_penalty)};
  Range cur{psi0, psi0};
  for (int t = 0; t < model.horizon(); ++t) {
    const double lo = model.effective_distribution(t, cur.lo).support_lo();
    const double hi = model.effective_distribution(t, cur.hi).support_hi();
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw NumericalError("price support is not finite at stage " + std::to_string(t));
    }
    cur = {std::min(lo, hi), std::max(lo, hi)};
    all.lo = std::min(all.lo, cur.lo);
    all.hi = std::max(all.hi, cur.hi);
  }
  return all;
}

// Fixed point psi = m(psi) on the grid: bisection for the first node where
// m - psi <= 0, then the exact root of the interpolant in that cell.
double fixed_point(const CoefficientGrid& grid, std::span<const double> col, int t,
                   int piece) {
  auto h = [&](std::size_t k) { return col[k] - grid.node(k); };
  const std::size_t n = grid.nodes();
  auto fail = [&](const char* where) {
    return NumericalError("fixed point of m^" + std::to_string(piece) + "_" +
                          std::to_string(t) + " lies " + where + " the grid [" +
                          std::to_string(grid.psi_min()) + ", " +
                          std::to_string(grid.psi_max()) + "]");
  };
  if (h(0) <= 0.0) {
    if (h(0) == 0.0) return grid.node(0);
    throw fail("below");
  }
  if (h(n - 1) > 0.0) throw fail("above");
  std::size_t lo = 0;
  std::size_t hi = n - 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (h(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double h_lo = h(lo);
  const double h_hi = h(hi);
  const double root = grid.node(lo) + grid.delta() * h_lo / (h_lo - h_hi);
  return std::clamp(root, grid.node(lo), grid.node(hi));
}

}  // namespace

CoefficientGrid::CoefficientGrid(int horizon, double penalty, double psi_min,
                                 double delta, std::size_t nodes)
    : horizon_(horizon), penalty_(penalty), psi_min_(psi_min), delta_(delta), nodes_(nodes) {
  if (horizon < 1) throw ValidationError("grid horizon must be >= 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ValidationError("grid delta must be finite and > 0");
  }
  if (nodes < 2) throw ValidationError("grid needs at least two nodes");
  const auto h = static_cast<std::size_t>(horizon);
  if ((h + 1) * h > kMaxGridCells / nodes) {
    throw ValidationError("coefficient grid too large: " + std::to_string((h + 1) * h) +
                          " columns of " + std::to_string(nodes) + " nodes");
  }
  values_.assign((h + 1) * h * nodes, penalty);
}

std::size_t CoefficientGrid::offset(int t, int i) const {
  if (t < 0 || t > horizon_ || i < 1 || i > horizon_) {
    throw ValidationError("grid column (" + std::to_string(t) + ", " + std::to_string(i) +
                          ") out of range");
  }
  return (static_cast<std::size_t>(t) * static_cast<std::size_t>(horizon_) +
          static_cast<std::size_t>(i - 1)) *
         nodes_;
}

std::span<const double> CoefficientGrid::column(int t, int i) const {
  return std::span<const double>(values_).subspan(offset(t, i), nodes_);
}

std::span<double> CoefficientGrid::mutable_column(int t, int i) {
  return std::span<double>(values_).subspan(offset(t, i), nodes_);
}

double CoefficientGrid::coefficient(int t, int i, double psi) const {
  auto col = column(t, i);
  if (!(psi > psi_min_)) return col.front();
  const double u = (psi - psi_min_) / delta_;
  if (u >= static_cast<double>(nodes_ - 1)) return col.back();
  const auto k = std::min(static_cast<std::size_t>(u), nodes_ - 2);
  const double w = u - static_cast<double>(k);
  return col[k] + w * (col[k + 1] - col[k]);
}

Threshold CoefficientGrid::threshold(int t, int i, double psi) const {
  if (i == 0) return Threshold::below_all();
  return Threshold::at(coefficient(t, i, psi));
}

CorrelatedSolution compile_correlated(const LoadSpec& spec, const PriceModel& model,
                                      const CorrelatedOptions& options) {
  spec.validate();
  if (model.horizon() != spec.horizon) {
    throw ValidationError("price model has " + std::to_string(model.horizon()) +
                          " stages, load horizon is " + std::to_string(spec.horizon));
  }
  const double delta = options.grid_delta;
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ValidationError("grid delta must be finite and > 0");
  }

  double lo = 0.0;
  double hi = 0.0;
  if (options.grid_min && options.grid_max) {
    lo = *options.grid_min;
    hi = *options.grid_max;
  } else {
    const Range r = propagate_support(spec, model);
    const double pad = std::max(2.0 * delta, 0.01 * (r.hi - r.lo));
    lo = options.grid_min.value_or(r.lo - pad);
    hi = options.grid_max.value_or(r.hi + pad);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ValidationError("grid bounds must be finite with min < max");
  }
  const double span_nodes = std::ceil((hi - lo) / delta) + 1.0;
  if (span_nodes > static_cast<double>(options.max_nodes)) {
    throw ValidationError("grid would need " + std::to_string(span_nodes) +
                          " nodes (limit " + std::to_string(options.max_nodes) +
                          "); raise --grid-delta");
  }
  const auto nodes = static_cast<std::size_t>(span_nodes);

  const int T = spec.horizon;
  CorrelatedSolution sol{CoefficientGrid(T, spec.shortfall_penalty, lo, delta, nodes),
                         ThresholdTable(T, spec.capacity, spec.shortfall_penalty)};
  CoefficientGrid& grid = sol.coefficients;

  // Continuous laws: GK-61 split at the crossings. The interpolated columns
  // are only good to O(delta^2), so refinement stops well below that rather
  // than chasing the interpolant's sub-cell kinks.
  QuadratureOptions quad;
  quad.rel_tolerance = std::max(1e-13, 1e-3 * delta * delta);
  quad.max_depth = 6;
  quad.strict = false;

  for (int t = T - 1; t >= 0; --t) {
    const int active = T - t;
    std::vector<std::vector<double>> crossings(static_cast<std::size_t>(active) + 1);
    for (int i = 1; i <= active; ++i) {
      crossings[static_cast<std::size_t>(i)] = column_crossings(grid, t + 1, i);
    }
    // A stage whose law ignores psi yields constant columns: one node does.
    const bool varies = model.depends_on_state(t);
    parallel_for(options.pool, varies ? nodes : 1, [&](std::size_t k) {
      const EffectivePriceDistribution dist = model.effective_distribution(t, grid.node(k));
      std::vector<double> kinks;
      for (int i = 1; i <= active; ++i) {
        const PieceIntegrand f(grid, t + 1, i);
        double m = 0.0;
        if (dist.is_discrete()) {
          for (const auto& a : dist.atoms()) m += a.weight * f(a.value);
        } else {
          const double lo = dist.support_lo();
          const double hi = dist.support_hi();
          kinks.clear();
          if (i > 1) append_inside(crossings[static_cast<std::size_t>(i) - 1], lo, hi, kinks);
          append_inside(crossings[static_cast<std::size_t>(i)], lo, hi, kinks);
          m = dist.expect([&](double x) { return f(x); }, kinks, quad);
        }
        grid.mutable_column(t, i)[k] = m;
      }
    });
    if (!varies) {
      for (int i = 1; i <= active; ++i) {
        auto col = grid.mutable_column(t, i);
        std::fill(col.begin() + 1, col.end(), col[0]);
      }
    }

    for (int i = 1; i <= active; ++i) {
      auto col = grid.column(t, i);
      for (std::size_t k = 0; k < nodes; ++k) {
        if (!std::isfinite(col[k])) {
          throw NumericalError("non-finite coefficient at stage " + std::to_string(t));
        }
        if (k > 0) {
          const double tol = kMonotoneTolerance * std::max(1.0, std::abs(col[k]));
          if (col[k] < col[k - 1] - tol) {
            throw NumericalError(
                "m^" + std::to_string(i) + "_" + std::to_string(t) +
                " decreases in psi near " + std::to_string(grid.node(k)) +
                "; the seasonal map must be nondecreasing");
          }
        }
      }
    }
    parallel_for(options.pool, static_cast<std::size_t>(active), [&](std::size_t k) {
      const int i = static_cast<int>(k) + 1;
      sol.thresholds.set(t, i, fixed_point(grid, grid.column(t, i), t, i));
    });
  }
  return sol;
}

double value_function(const CoefficientGrid& grid, const LoadSpec& spec, double demand,
                      double psi) {
  if (!(demand >= 0.0)) throw ValidationError("demand must be >= 0");
  PiecewiseLinearValue v;
  v.capacity = spec.capacity;
  v.terminal_slope = grid.shortfall_penalty();
  v.slopes.reserve(static_cast<std::size_t>(grid.horizon()));
  for (int i = 1; i <= grid.horizon(); ++i) v.slopes.push_back(grid.coefficient(0, i, psi));
  return v(demand);
}

}  // namespace flexload
