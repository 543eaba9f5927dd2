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

#include "flexload/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "quadrature.hpp"

namespace flexload {
namespace {

constexpr double kGaussianSpan = 12.0;

double std_normal_cdf(double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

double std_normal_pdf(double u) {
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

void sort_and_merge(std::vector<WeightedValue>& atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const WeightedValue& a, const WeightedValue& b) {
              return a.value < b.value;
            });
  std::vector<WeightedValue> merged;
  merged.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(a);
    }
  }
  atoms = std::move(merged);
}

std::vector<double> running_sums(const std::vector<WeightedValue>& atoms) {
  std::vector<double> out;
  out.reserve(atoms.size());
  double acc = 0.0;
  for (const auto& a : atoms) {
    acc += a.weight;
    out.push_back(acc);
  }
  // Guard against the last running sum landing a hair below one.
  if (!out.empty()) out.back() = 1.0;
  return out;
}

double step_cdf(const std::vector<WeightedValue>& atoms,
                const std::vector<double>& cumulative, double x) {
  auto it = std::upper_bound(
      atoms.begin(), atoms.end(), x,
      [](double v, const WeightedValue& a) { return v < a.value; });
  if (it == atoms.begin()) return 0.0;
  return cumulative[static_cast<std::size_t>(it - atoms.begin()) - 1];
}

// Sum of w_k (upper - max(lower, a_k))^+, the exact area under a step CDF.
double step_cdf_area(const std::vector<WeightedValue>& atoms, Threshold lower,
                     double upper) {
  double total = 0.0;
  for (const auto& a : atoms) {
    if (a.value >= upper) break;
    const double left =
        lower.is_below_all() ? a.value : std::max(lower.value(), a.value);
    total += a.weight * positive_part(upper - left);
  }
  return total;
}

std::vector<WeightedValue> normalized(std::vector<WeightedValue> samples) {
  if (samples.empty()) {
    throw ValidationError("empirical distribution needs at least one sample");
  }
  double total = 0.0;
  for (const auto& s : samples) {
    if (!std::isfinite(s.value) || !std::isfinite(s.weight) || s.weight < 0.0) {
      throw ValidationError("empirical samples need finite values and nonnegative weights");
    }
    total += s.weight;
  }
  if (!(total > 0.0)) {
    throw ValidationError("empirical sample weights sum to zero");
  }
  for (auto& s : samples) s.weight /= total;
  std::erase_if(samples, [](const WeightedValue& s) { return s.weight == 0.0; });
  sort_and_merge(samples);
  return samples;
}

}  // namespace

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::point_mass: return "point_mass";
    case DistributionKind::gaussian: return "gaussian";
    case DistributionKind::empirical: return "empirical";
    case DistributionKind::tabulated_cdf: return "tabulated_cdf";
  }
  return "unknown";
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

InnovationDistribution InnovationDistribution::point_mass(double value) {
  if (!std::isfinite(value)) {
    throw ValidationError("point mass value must be finite");
  }
  InnovationDistribution d;
  d.kind_ = DistributionKind::point_mass;
  d.mean_ = value;
  d.atoms_ = {{value, 1.0}};
  d.cumulative_ = {1.0};
  return d;
}

InnovationDistribution InnovationDistribution::gaussian(double mean,
                                                        double stddev) {
  if (!std::isfinite(mean) || !std::isfinite(stddev) || !(stddev > 0.0)) {
    throw ValidationError("gaussian needs a finite mean and stddev > 0");
  }
  InnovationDistribution d;
  d.kind_ = DistributionKind::gaussian;
  d.mean_ = mean;
  d.stddev_ = stddev;
  return d;
}

InnovationDistribution InnovationDistribution::empirical(
    std::vector<WeightedValue> samples) {
  InnovationDistribution d;
  d.kind_ = DistributionKind::empirical;
  d.atoms_ = normalized(std::move(samples));
  d.cumulative_ = running_sums(d.atoms_);
  double m = 0.0;
  for (const auto& a : d.atoms_) m += a.weight * a.value;
  d.mean_ = m;
  return d;
}

InnovationDistribution InnovationDistribution::tabulated_cdf(
    std::vector<double> x, std::vector<double> p) {
  if (x.size() < 2 || x.size() != p.size()) {
    throw ValidationError("tabulated CDF needs >= 2 matching breakpoints");
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!std::isfinite(x[k]) || !std::isfinite(p[k])) {
      throw ValidationError("tabulated CDF breakpoints must be finite");
    }
    if (k > 0 && !(x[k] > x[k - 1])) {
      throw ValidationError("tabulated CDF x must be strictly increasing");
    }
    if (k > 0 && p[k] < p[k - 1]) {
      throw ValidationError("tabulated CDF p must be nondecreasing");
    }
  }
  if (p.front() != 0.0 || p.back() != 1.0) {
    throw ValidationError("tabulated CDF must run from p=0 to p=1");
  }
  InnovationDistribution d;
  d.kind_ = DistributionKind::tabulated_cdf;
  d.table_area_.assign(x.size(), 0.0);
  for (std::size_t k = 1; k < x.size(); ++k) {
    d.table_area_[k] =
        d.table_area_[k - 1] + 0.5 * (x[k] - x[k - 1]) * (p[k] + p[k - 1]);
  }
  d.mean_ = x.back() - d.table_area_.back();
  d.table_x_ = std::move(x);
  d.table_p_ = std::move(p);
  return d;
}

double InnovationDistribution::cdf(double x) const {
  switch (kind_) {
    case DistributionKind::point_mass:
    case DistributionKind::empirical:
      return step_cdf(atoms_, cumulative_, x);
    case DistributionKind::gaussian:
      return std_normal_cdf((x - mean_) / stddev_);
    case DistributionKind::tabulated_cdf: {
      if (x <= table_x_.front()) return 0.0;
      if (x >= table_x_.back()) return 1.0;
      const auto k = static_cast<std::size_t>(
          std::upper_bound(table_x_.begin(), table_x_.end(), x) -
          table_x_.begin() - 1);
      const double w = (x - table_x_[k]) / (table_x_[k + 1] - table_x_[k]);
      return table_p_[k] + w * (table_p_[k + 1] - table_p_[k]);
    }
  }
  return 0.0;
}

double InnovationDistribution::cdf_integral(double x) const {
  switch (kind_) {
    case DistributionKind::point_mass:
    case DistributionKind::empirical: {
      double total = 0.0;
      for (const auto& a : atoms_) {
        if (a.value >= x) break;
        total += a.weight * (x - a.value);
      }
      return total;
    }
    case DistributionKind::gaussian: {
      const double u = (x - mean_) / stddev_;
      return (x - mean_) * std_normal_cdf(u) + stddev_ * std_normal_pdf(u);
    }
    case DistributionKind::tabulated_cdf: {
      if (x <= table_x_.front()) return 0.0;
      if (x >= table_x_.back()) return table_area_.back() + (x - table_x_.back());
      const auto k = static_cast<std::size_t>(
          std::upper_bound(table_x_.begin(), table_x_.end(), x) -
          table_x_.begin() - 1);
      return table_area_[k] + 0.5 * (x - table_x_[k]) * (table_p_[k] + cdf(x));
    }
  }
  return 0.0;
}

double InnovationDistribution::mean() const { return mean_; }

double InnovationDistribution::support_lo() const {
  switch (kind_) {
    case DistributionKind::point_mass:
    case DistributionKind::empirical: return atoms_.front().value;
    case DistributionKind::gaussian: return mean_ - kGaussianSpan * stddev_;
    case DistributionKind::tabulated_cdf: return table_x_.front();
  }
  return 0.0;
}

double InnovationDistribution::support_hi() const {
  switch (kind_) {
    case DistributionKind::point_mass:
    case DistributionKind::empirical: return atoms_.back().value;
    case DistributionKind::gaussian: return mean_ + kGaussianSpan * stddev_;
    case DistributionKind::tabulated_cdf: return table_x_.back();
  }
  return 0.0;
}

double InnovationDistribution::sample(std::mt19937_64& rng) const {
  switch (kind_) {
    case DistributionKind::point_mass: return mean_;
    case DistributionKind::empirical: {
      const double u = uniform01(rng);
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      if (it == cumulative_.end()) --it;
      return atoms_[static_cast<std::size_t>(it - cumulative_.begin())].value;
    }
    case DistributionKind::gaussian: {
      std::normal_distribution<double> normal(mean_, stddev_);
      return normal(rng);
    }
    case DistributionKind::tabulated_cdf: {
      const double u = uniform01(rng);
      auto it = std::upper_bound(table_p_.begin(), table_p_.end(), u);
      if (it == table_p_.end()) return table_x_.back();
      const auto k = static_cast<std::size_t>(it - table_p_.begin()) - 1;
      const double w = (u - table_p_[k]) / (table_p_[k + 1] - table_p_[k]);
      return table_x_[k] + w * (table_x_[k + 1] - table_x_[k]);
    }
  }
  return 0.0;
}

double InnovationDistribution::expect(const ScalarFunction& f,
                                      std::span<const double> kinks,
                                      const QuadratureOptions& quad) const {
  switch (kind_) {
    case DistributionKind::point_mass:
    case DistributionKind::empirical: {
      double total = 0.0;
      for (const auto& a : atoms_) total += a.weight * f(a.value);
      return total;
    }
    case DistributionKind::gaussian: {
      auto integrand = [&](double x) {
        return f(x) * std_normal_pdf((x - mean_) / stddev_) / stddev_;
      };
      return detail::integrate(integrand, support_lo(), support_hi(), kinks, quad);
    }
    case DistributionKind::tabulated_cdf: {
      double total = 0.0;
      for (std::size_t k = 0; k + 1 < table_x_.size(); ++k) {
        const double mass = table_p_[k + 1] - table_p_[k];
        if (mass == 0.0) continue;
        const double density = mass / (table_x_[k + 1] - table_x_[k]);
        total += density * detail::integrate(f, table_x_[k], table_x_[k + 1], kinks, quad);
      }
      return total;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

EffectivePriceDistribution::EffectivePriceDistribution(
    const InnovationDistribution& energy, const InnovationDistribution& reserve,
    PricePair shift)
    : shift_(shift) {
  if (energy.is_discrete() && reserve.is_discrete()) {
    mode_ = Mode::discrete;
    atoms_.reserve(energy.atoms().size() * reserve.atoms().size());
    for (const auto& e : energy.atoms()) {
      for (const auto& r : reserve.atoms()) {
        atoms_.push_back({effective_price({shift.energy + e.value, shift.reserve + r.value}),
                          e.weight * r.weight});
      }
    }
    sort_and_merge(atoms_);
    cumulative_ = running_sums(atoms_);
  } else if (energy.is_discrete()) {
    mode_ = Mode::continuous_reserve;
    for (const auto& e : energy.atoms()) {
      atoms_.push_back({shift.energy + e.value, e.weight});
    }
    reserve_ = reserve;
  } else {
    mode_ = Mode::continuous_energy;
    energy_ = energy;
    reserve_ = reserve;
  }
}

EffectivePriceDistribution::EffectivePriceDistribution(
    std::span<const JointSample> joint, PricePair shift)
    : mode_(Mode::discrete), shift_(shift) {
  std::vector<WeightedValue> raw;
  raw.reserve(joint.size());
  for (const auto& s : joint) {
    raw.push_back({effective_price({shift.energy + s.energy, shift.reserve + s.reserve}),
                   s.weight});
  }
  atoms_ = normalized(std::move(raw));
  cumulative_ = running_sums(atoms_);
}

double EffectivePriceDistribution::expected_positive_reserve() const {
  // E[Y^+] = E[Y] + E[(-Y)^+] with Y = s_r + R.
  return shift_.reserve + reserve_->mean() + reserve_->cdf_integral(-shift_.reserve);
}

double EffectivePriceDistribution::survival_integral(double a, double b) const {
  // P[(R')^+ >= y] is 1 for y <= 0 and 1 - F_R(y - s_r) above.
  double total = 0.0;
  if (a < 0.0) total += std::min(b, 0.0) - a;
  const double lo = std::max(a, 0.0);
  if (!(b > lo)) return total;
  const InnovationDistribution& r = *reserve_;
  const double s = shift_.reserve;
  if (std::isinf(b)) {
    // E[(R' - lo)^+] = E[R' - lo] + E[(lo - R')^+]
    total += (s + r.mean() - lo) + r.cdf_integral(lo - s);
  } else {
    total += (b - lo) - (r.cdf_integral(b - s) - r.cdf_integral(lo - s));
  }
  return total;
}

double EffectivePriceDistribution::cdf(double x) const {
  switch (mode_) {
    case Mode::discrete:
      return step_cdf(atoms_, cumulative_, x);
    case Mode::continuous_reserve: {
      double total = 0.0;
      for (const auto& e : atoms_) {
        const double y = e.value - x;
        total += e.weight * (y <= 0.0 ? 1.0 : 1.0 - reserve_->cdf(y - shift_.reserve));
      }
      // Weight sums and quadrature can overshoot by an ulp.
      return std::clamp(total, 0.0, 1.0);
    }
    case Mode::continuous_energy: {
      const double kink = -shift_.reserve;
      return std::clamp(reserve_->expect(
                            [&](double r) {
                              return energy_->cdf(x + positive_part(shift_.reserve + r) -
                                                  shift_.energy);
                            },
                            std::span<const double>(&kink, 1)),
                        0.0, 1.0);
    }
  }
  return 0.0;
}

double EffectivePriceDistribution::integral_of_cdf(Threshold lower,
                                                   double upper) const {
  if (!lower.is_below_all() && lower.value() == upper) {
    return 0.0;
  }
  switch (mode_) {
    case Mode::discrete:
      return step_cdf_area(atoms_, lower, upper);
    case Mode::continuous_reserve: {
      // P[X <= z] = P[(R')^+ >= e' - z]; substitute y = e' - z.
      double total = 0.0;
      for (const auto& e : atoms_) {
        const double a = e.value - upper;
        const double b = lower.is_below_all()
                             ? std::numeric_limits<double>::infinity()
                             : e.value - lower.value();
        total += e.weight * survival_integral(a, b);
      }
      return total;
    }
    case Mode::continuous_energy: {
      const double kink = -shift_.reserve;
      return reserve_->expect(
          [&](double r) {
            const double c = positive_part(shift_.reserve + r) - shift_.energy;
            const double hi = energy_->cdf_integral(upper + c);
            const double lo =
                lower.is_below_all() ? 0.0 : energy_->cdf_integral(lower.value() + c);
            return hi - lo;
          },
          std::span<const double>(&kink, 1));
    }
  }
  return 0.0;
}

double EffectivePriceDistribution::mean() const {
  switch (mode_) {
    case Mode::discrete: {
      double m = 0.0;
      for (const auto& a : atoms_) m += a.weight * a.value;
      return m;
    }
    case Mode::continuous_reserve: {
      double m = 0.0;
      for (const auto& e : atoms_) m += e.weight * e.value;
      return m - expected_positive_reserve();
    }
    case Mode::continuous_energy:
      return shift_.energy + energy_->mean() - expected_positive_reserve();
  }
  return 0.0;
}

double EffectivePriceDistribution::support_lo() const {
  switch (mode_) {
    case Mode::discrete: return atoms_.front().value;
    case Mode::continuous_reserve:
      return atoms_.front().value - positive_part(shift_.reserve + reserve_->support_hi());
    case Mode::continuous_energy:
      return shift_.energy + energy_->support_lo() -
             positive_part(shift_.reserve + reserve_->support_hi());
  }
  return 0.0;
}

double EffectivePriceDistribution::support_hi() const {
  switch (mode_) {
    case Mode::discrete: return atoms_.back().value;
    case Mode::continuous_reserve:
      return atoms_.back().value - positive_part(shift_.reserve + reserve_->support_lo());
    case Mode::continuous_energy:
      return shift_.energy + energy_->support_hi() -
             positive_part(shift_.reserve + reserve_->support_lo());
  }
  return 0.0;
}

double EffectivePriceDistribution::expect(const ScalarFunction& f,
                                          std::span<const double> kinks,
                                          const QuadratureOptions& quad) const {
  switch (mode_) {
    case Mode::discrete: {
      double total = 0.0;
      for (const auto& a : atoms_) total += a.weight * f(a.value);
      return total;
    }
    case Mode::continuous_reserve: {
      // X = e' - (s_r + R)^+; a kink x_j of f maps to R = e' - x_j - s_r.
      double total = 0.0;
      std::vector<double> reserve_kinks;
      for (const auto& e : atoms_) {
        reserve_kinks.assign(1, -shift_.reserve);
        for (double x : kinks) reserve_kinks.push_back(e.value - x - shift_.reserve);
        total += e.weight * reserve_->expect(
                                [&](double r) {
                                  return f(e.value - positive_part(shift_.reserve + r));
                                },
                                reserve_kinks, quad);
      }
      return total;
    }
    case Mode::continuous_energy: {
      const double kink = -shift_.reserve;
      return reserve_->expect(
          [&](double r) {
            const double c = positive_part(shift_.reserve + r) - shift_.energy;
            std::vector<double> energy_kinks;
            energy_kinks.reserve(kinks.size());
            for (double x : kinks) energy_kinks.push_back(x + c);
            return energy_->expect([&](double e) { return f(e - c); }, energy_kinks, quad);
          },
          std::span<const double>(&kink, 1), quad);
    }
  }
  return 0.0;
}

}  // namespace flexload
