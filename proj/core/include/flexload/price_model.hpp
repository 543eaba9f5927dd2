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

#ifndef FLEXLOAD_PRICE_MODEL_HPP_
#define FLEXLOAD_PRICE_MODEL_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "flexload/distribution.hpp"
#include "flexload/types.hpp"

namespace flexload {

// Innovations of one stage. When `joint` is non-empty it replaces the two
// marginals for both sampling and the effective-price law.
struct StageInnovations {
  InnovationDistribution energy = InnovationDistribution::point_mass(0.0);
  InnovationDistribution reserve = InnovationDistribution::point_mass(0.0);
  std::vector<JointSample> joint;
};

// Seasonal mean of one stage as an affine function of the previous
// effective price psi: (a_e + b_e psi, a_r + b_r psi). Slopes must be >= 0.
struct AffineSeasonality {
  double energy_intercept = 0.0;
  double energy_slope = 0.0;
  double reserve_intercept = 0.0;
  double reserve_slope = 0.0;

  PricePair operator()(double psi) const {
    return {energy_intercept + energy_slope * psi,
            reserve_intercept + reserve_slope * psi};
  }
};

using SeasonalMap = std::function<PricePair(double psi)>;

// Markov price process pi_t = lambda_t(theta_t) + eps_t with theta_t the
// previous prices, carried here as the previous effective price. Without a
// seasonal map the stages are independent (lambda == 0).
class PriceModel {
 public:
  PriceModel(std::vector<StageInnovations> stages, PricePair initial_state = {});
  PriceModel(std::vector<StageInnovations> stages,
             std::vector<SeasonalMap> seasonality, PricePair initial_state);
  PriceModel(std::vector<StageInnovations> stages,
             std::vector<AffineSeasonality> seasonality, PricePair initial_state);

  // Point-mass stages reproducing a fixed price path.
  static PriceModel deterministic(const std::vector<PricePair>& path);

  int horizon() const { return static_cast<int>(stages_.size()); }
  bool is_independent() const { return seasonality_.empty(); }
  const StageInnovations& stage(int t) const;
  PricePair initial_state() const { return initial_state_; }
  double initial_effective_price() const { return effective_price(initial_state_); }

  // Affine coefficients when the model was built from them (for I/O).
  const std::vector<AffineSeasonality>& affine_seasonality() const { return affine_; }

  // lambda_t(psi); zero for independent models.
  PricePair seasonal_mean(int t, double psi) const;
  // False when stage t's price law provably ignores psi (independent model,
  // or affine map with zero slopes). Arbitrary callables count as dependent.
  bool depends_on_state(int t) const;

  // Law of pi^a_t given the previous effective price psi.
  EffectivePriceDistribution effective_distribution(int t, double psi = 0.0) const;

  // Expected (energy, reserve) innovations of stage t.
  PricePair innovation_mean(int t) const;

  // Deterministic given the seed; innovations drawn independently per stage.
  std::vector<PricePair> sample_path(std::uint64_t seed) const;

  // Stages [first, horizon) as a new model (same seasonal maps).
  PriceModel suffix(int first) const;
  // Stages [first, last).
  PriceModel slice(int first, int last) const;
  // Same energy law, reserve price fixed at zero.
  PriceModel without_reserve() const;
  // Point-mass stages at the innovation means (reserve kept as its mean).
  PriceModel at_means() const;

 private:
  void validate() const;

  std::vector<StageInnovations> stages_;
  std::vector<SeasonalMap> seasonality_;
  std::vector<AffineSeasonality> affine_;
  PricePair initial_state_;
};

// P[eps^e_t - (eps^r_t)^+ <= x]. Rejects correlated models.
double effective_cdf(const PriceModel& model, int t, double x);

}  // namespace flexload

#endif  // FLEXLOAD_PRICE_MODEL_HPP_
