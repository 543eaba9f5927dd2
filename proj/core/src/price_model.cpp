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

#include "flexload/price_model.hpp"

#include <cmath>
#include <random>
#include <string>

namespace flexload {
namespace {

std::vector<SeasonalMap> wrap(const std::vector<AffineSeasonality>& affine) {
  std::vector<SeasonalMap> maps;
  maps.reserve(affine.size());
  for (const auto& a : affine) maps.emplace_back(a);
  return maps;
}

PricePair joint_mean(const std::vector<JointSample>& joint) {
  double total = 0.0;
  PricePair m;
  for (const auto& s : joint) {
    total += s.weight;
    m.energy += s.weight * s.energy;
    m.reserve += s.weight * s.reserve;
  }
  m.energy /= total;
  m.reserve /= total;
  return m;
}

PricePair sample_joint(const std::vector<JointSample>& joint,
                       std::mt19937_64& rng) {
  double total = 0.0;
  for (const auto& s : joint) total += s.weight;
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  for (const auto& s : joint) {
    acc += s.weight;
    if (target < acc) return {s.energy, s.reserve};
  }
  return {joint.back().energy, joint.back().reserve};
}

}  // namespace

PriceModel::PriceModel(std::vector<StageInnovations> stages,
                       PricePair initial_state)
    : stages_(std::move(stages)), initial_state_(initial_state) {
  validate();
}

PriceModel::PriceModel(std::vector<StageInnovations> stages,
                       std::vector<SeasonalMap> seasonality,
                       PricePair initial_state)
    : stages_(std::move(stages)),
      seasonality_(std::move(seasonality)),
      initial_state_(initial_state) {
  if (seasonality_.size() != stages_.size()) {
    throw ValidationError("seasonality needs one map per stage");
  }
  for (const auto& m : seasonality_) {
    if (!m) throw ValidationError("empty seasonal map");
  }
  validate();
}

PriceModel::PriceModel(std::vector<StageInnovations> stages,
                       std::vector<AffineSeasonality> seasonality,
                       PricePair initial_state)
    : PriceModel(std::move(stages), wrap(seasonality), initial_state) {
  for (const auto& a : seasonality) {
    if (!(a.energy_slope >= 0.0) || !(a.reserve_slope >= 0.0) ||
        !std::isfinite(a.energy_intercept) || !std::isfinite(a.reserve_intercept) ||
        !std::isfinite(a.energy_slope) || !std::isfinite(a.reserve_slope)) {
      throw ValidationError("affine seasonality needs finite coefficients and slopes >= 0");
    }
  }
  affine_ = std::move(seasonality);
}

PriceModel PriceModel::deterministic(const std::vector<PricePair>& path) {
  std::vector<StageInnovations> stages;
  stages.reserve(path.size());
  for (const auto& p : path) {
    stages.push_back({InnovationDistribution::point_mass(p.energy),
                      InnovationDistribution::point_mass(p.reserve),
                      {}});
  }
  return PriceModel(std::move(stages));
}

void PriceModel::validate() const {
  if (stages_.empty()) throw ValidationError("price model needs at least one stage");
  if (!std::isfinite(initial_state_.energy) || !std::isfinite(initial_state_.reserve)) {
    throw ValidationError("initial price state must be finite");
  }
  for (std::size_t t = 0; t < stages_.size(); ++t) {
    double total = 0.0;
    for (const auto& s : stages_[t].joint) {
      if (!std::isfinite(s.energy) || !std::isfinite(s.reserve) ||
          !std::isfinite(s.weight) || s.weight < 0.0) {
        throw ValidationError("stage " + std::to_string(t) + ": bad joint sample");
      }
      total += s.weight;
    }
    if (!stages_[t].joint.empty() && !(total > 0.0)) {
      throw ValidationError("stage " + std::to_string(t) + ": joint weights sum to zero");
    }
  }
}

const StageInnovations& PriceModel::stage(int t) const {
  if (t < 0 || t >= horizon()) {
    throw ValidationError("stage " + std::to_string(t) + " out of range");
  }
  return stages_[static_cast<std::size_t>(t)];
}

bool PriceModel::depends_on_state(int t) const {
  (void)stage(t);  // range check
  if (seasonality_.empty()) return false;
  if (affine_.empty()) return true;
  const auto& a = affine_[static_cast<std::size_t>(t)];
  return a.energy_slope != 0.0 || a.reserve_slope != 0.0;
}

PricePair PriceModel::seasonal_mean(int t, double psi) const {
  if (seasonality_.empty()) return {};
  stage(t);
  return seasonality_[static_cast<std::size_t>(t)](psi);
}

EffectivePriceDistribution PriceModel::effective_distribution(int t,
                                                              double psi) const {
  const StageInnovations& s = stage(t);
  const PricePair shift = seasonal_mean(t, psi);
  if (!s.joint.empty()) return EffectivePriceDistribution(s.joint, shift);
  return EffectivePriceDistribution(s.energy, s.reserve, shift);
}

PricePair PriceModel::innovation_mean(int t) const {
  const StageInnovations& s = stage(t);
  if (!s.joint.empty()) return joint_mean(s.joint);
  return {s.energy.mean(), s.reserve.mean()};
}

std::vector<PricePair> PriceModel::sample_path(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<PricePair> path;
  path.reserve(stages_.size());
  double psi = initial_effective_price();
  for (int t = 0; t < horizon(); ++t) {
    const StageInnovations& s = stages_[static_cast<std::size_t>(t)];
    PricePair eps;
    if (!s.joint.empty()) {
      eps = sample_joint(s.joint, rng);
    } else {
      eps.energy = s.energy.sample(rng);
      eps.reserve = s.reserve.sample(rng);
    }
    const PricePair mean = seasonal_mean(t, psi);
    const PricePair price{mean.energy + eps.energy, mean.reserve + eps.reserve};
    path.push_back(price);
    psi = effective_price(price);
  }
  return path;
}

PriceModel PriceModel::suffix(int first) const { return slice(first, horizon()); }

PriceModel PriceModel::slice(int first, int last) const {
  if (first < 0 || last > horizon() || first >= last) {
    throw ValidationError("stage range [" + std::to_string(first) + ", " +
                          std::to_string(last) + ") out of range");
  }
  std::vector<StageInnovations> stages(stages_.begin() + first, stages_.begin() + last);
  if (seasonality_.empty()) return PriceModel(std::move(stages), initial_state_);
  if (!affine_.empty()) {
    return PriceModel(std::move(stages),
                      std::vector<AffineSeasonality>(affine_.begin() + first,
                                                     affine_.begin() + last),
                      initial_state_);
  }
  return PriceModel(std::move(stages),
                    std::vector<SeasonalMap>(seasonality_.begin() + first,
                                             seasonality_.begin() + last),
                    initial_state_);
}

PriceModel PriceModel::without_reserve() const {
  std::vector<StageInnovations> stages = stages_;
  for (auto& s : stages) {
    s.reserve = InnovationDistribution::point_mass(0.0);
    for (auto& j : s.joint) j.reserve = 0.0;
  }
  const PricePair init{initial_state_.energy, 0.0};
  if (seasonality_.empty()) return PriceModel(std::move(stages), init);
  if (!affine_.empty()) {
    std::vector<AffineSeasonality> affine = affine_;
    for (auto& a : affine) a.reserve_intercept = a.reserve_slope = 0.0;
    return PriceModel(std::move(stages), std::move(affine), init);
  }
  std::vector<SeasonalMap> maps;
  maps.reserve(seasonality_.size());
  for (const auto& m : seasonality_) {
    maps.emplace_back([m](double psi) { return PricePair{m(psi).energy, 0.0}; });
  }
  return PriceModel(std::move(stages), std::move(maps), init);
}

PriceModel PriceModel::at_means() const {
  if (!is_independent()) {
    throw ValidationError("mean-price model is only defined for independent prices");
  }
  std::vector<PricePair> path;
  path.reserve(stages_.size());
  for (int t = 0; t < horizon(); ++t) path.push_back(innovation_mean(t));
  return deterministic(path);
}

double effective_cdf(const PriceModel& model, int t, double x) {
  if (!model.is_independent()) {
    throw ValidationError("effective_cdf needs an independent price model; "
                          "use the correlated engine for seasonal models");
  }
  return model.effective_distribution(t).cdf(x);
}

}  // namespace flexload
