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

#ifndef FLEXLOAD_DISTRIBUTION_HPP_
#define FLEXLOAD_DISTRIBUTION_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "flexload/types.hpp"

namespace flexload {

enum class DistributionKind { point_mass, gaussian, empirical, tabulated_cdf };

std::string_view to_string(DistributionKind kind);

struct WeightedValue {
  double value = 0.0;
  double weight = 0.0;
};

// One row of a joint (energy, reserve) innovation sample list.
struct JointSample {
  double energy = 0.0;
  double reserve = 0.0;
  double weight = 0.0;
};

using ScalarFunction = std::function<double(double)>;

// Adaptive quadrature behind expect() for continuous kinds. With strict off
// the estimate reached at max_depth is accepted instead of throwing; callers
// that integrate interpolated data use this, since resolving the data's own
// sub-cell kinks buys nothing.
struct QuadratureOptions {
  double abs_tolerance = 1e-10;
  double rel_tolerance = 1e-13;  // refinement target handed to the rule
  int max_depth = 15;
  bool strict = true;
};

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform01(std::mt19937_64& rng);

// Distribution of a single price innovation (energy or reserve coordinate).
class InnovationDistribution {
 public:
  static InnovationDistribution point_mass(double value);
  // stddev must be > 0; use point_mass for degenerate draws.
  static InnovationDistribution gaussian(double mean, double stddev);
  // Weights are normalized to sum to one; atoms are sorted and merged.
  static InnovationDistribution empirical(std::vector<WeightedValue> samples);
  // Piecewise-linear CDF through (x[k], p[k]); x strictly increasing,
  // p nondecreasing from 0 to 1.
  static InnovationDistribution tabulated_cdf(std::vector<double> x,
                                              std::vector<double> p);

  DistributionKind kind() const { return kind_; }
  bool is_discrete() const {
    return kind_ == DistributionKind::point_mass ||
           kind_ == DistributionKind::empirical;
  }

  double cdf(double x) const;
  // Integral of the CDF from -infinity to x, i.e. E[(x - X)^+].
  double cdf_integral(double x) const;
  double mean() const;

  // Range outside of which the probability mass is negligible (exact for
  // discrete and tabulated kinds, twelve standard deviations for gaussian).
  double support_lo() const;
  double support_hi() const;

  // Sorted, merged atoms; empty for continuous kinds.
  std::span<const WeightedValue> atoms() const { return atoms_; }

  double gaussian_mean() const { return mean_; }
  double gaussian_stddev() const { return stddev_; }
  std::span<const double> table_x() const { return table_x_; }
  std::span<const double> table_p() const { return table_p_; }

  double sample(std::mt19937_64& rng) const;

  // E[f(X)]. `kinks` lists points where f is not smooth; continuous kinds
  // split their quadrature there.
  double expect(const ScalarFunction& f, std::span<const double> kinks = {},
                const QuadratureOptions& quad = {}) const;

 private:
  InnovationDistribution() = default;

  DistributionKind kind_ = DistributionKind::point_mass;
  double mean_ = 0.0;
  double stddev_ = 0.0;
  std::vector<WeightedValue> atoms_;
  std::vector<double> cumulative_;  // discrete: running weight sums
  std::vector<double> table_x_;
  std::vector<double> table_p_;
  std::vector<double> table_area_;  // tabulated: integral of the CDF up to x[k]
};

// Distribution of the effective price X = (s_e + E) - (s_r + R)^+ where
// (E, R) are the stage innovations and (s_e, s_r) a deterministic shift
// (the seasonal mean). With independent coordinates E and R are taken to be
// independent; a joint sample list overrides that.
class EffectivePriceDistribution {
 public:
  EffectivePriceDistribution(const InnovationDistribution& energy,
                             const InnovationDistribution& reserve,
                             PricePair shift = {});
  explicit EffectivePriceDistribution(std::span<const JointSample> joint,
                                      PricePair shift = {});

  bool is_discrete() const { return mode_ == Mode::discrete; }
  // Sorted atoms of X (only when is_discrete()).
  std::span<const WeightedValue> atoms() const { return atoms_; }

  double cdf(double x) const;
  // Integral of the CDF over [lower, upper]; lower may be the sentinel.
  // Callers guarantee lower <= upper (see g_integral for the checked form).
  double integral_of_cdf(Threshold lower, double upper) const;
  double mean() const;
  double support_lo() const;
  double support_hi() const;
  double expect(const ScalarFunction& f, std::span<const double> kinks = {},
                const QuadratureOptions& quad = {}) const;

 private:
  enum class Mode { discrete, continuous_reserve, continuous_energy };

  // Integral of P[(R')^+ >= y] over y in [a, b]; b may be +infinity.
  double survival_integral(double a, double b) const;
  // E[(s_r + R)^+]
  double expected_positive_reserve() const;

  Mode mode_ = Mode::discrete;
  PricePair shift_;
  std::vector<WeightedValue> atoms_;  // discrete: X atoms; else E' atoms
  std::vector<double> cumulative_;
  std::optional<InnovationDistribution> energy_;  // continuous_energy only
  std::optional<InnovationDistribution> reserve_;
};

}  // namespace flexload

#endif  // FLEXLOAD_DISTRIBUTION_HPP_
