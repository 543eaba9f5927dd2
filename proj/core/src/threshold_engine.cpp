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


#include "flexload/threshold_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flexload {
namespace {

// Row t from row t + 1 and the stage-t effective price law. Pieces beyond
// T - t sit between two penalty entries, so G vanishes and they are skipped.
void fill_row(ThresholdTable& table, int t, const EffectivePriceDistribution& dist,
              WorkerPool* pool) {
  const int active = table.horizon() - t;
  auto next = table.row(t + 1);
  auto out = table.mutable_row(t);
  parallel_for(pool, static_cast<std::size_t>(active), [&](std::size_t k) {
    const double upper = next[k];
    const Threshold lower =
        k == 0 ? Threshold::below_all() : Threshold::at(next[k - 1]);
    double m = upper - g_integral(dist, lower, upper);
    if (!lower.is_below_all()) m = std::max(m, lower.value());
    out[k] = std::min(m, upper);
  });
}

void check_independent(const LoadSpec& spec, const PriceModel& model) {
  spec.validate();
  if (!model.is_independent()) {
    throw ValidationError("independent compilation needs a model without seasonality");
  }
}

}  // namespace

ConsumptionRegion classify_region(double price, Threshold lower, Threshold upper) {
  if (upper.below(price)) return ConsumptionRegion::do_not_consume;
  if (lower.below(price)) return ConsumptionRegion::partially_consume;
  return ConsumptionRegion::consume;
}

double g_integral(const EffectivePriceDistribution& dist, Threshold lower,
                  double upper) {
  if (!lower.is_below_all() && lower.value() > upper) {
    throw ValidationError("G(z, z') needs z <= z' (got z = " + to_string(lower) +
                          ", z' = " + to_string(Threshold::at(upper)) + ")");
  }
  const double g = dist.integral_of_cdf(lower, upper);
  if (!std::isfinite(g)) throw NumericalError("G evaluated to a non-finite value");
  const double clipped = std::max(g, 0.0);
  return lower.is_below_all() ? clipped : std::min(clipped, upper - lower.value());
}

ThresholdTable compile_independent(const LoadSpec& spec, const PriceModel& model,
                                   const CompileOptions& options) {
  check_independent(spec, model);
  if (model.horizon() != spec.horizon) {
    throw ValidationError("price model has " + std::to_string(model.horizon()) +
                          " stages, load horizon is " + std::to_string(spec.horizon));
  }
  ThresholdTable table(spec.horizon, spec.capacity, spec.shortfall_penalty);
  for (int t = spec.horizon - 1; t >= 0; --t) {
    fill_row(table, t, model.effective_distribution(t), options.pool);
  }
  return table;
}

ThresholdTable augment_horizon(const ThresholdTable& table, const LoadSpec& spec,
                               const PriceModel& model,
                               const CompileOptions& options) {
  check_independent(spec, model);
  if (spec.capacity != table.capacity()) {
    throw ValidationError("capacity differs from the cached table");
  }
  if (spec.shortfall_penalty != table.shortfall_penalty()) {
    throw ValidationError("shortfall penalty differs from the cached table");
  }
  if (spec.horizon != model.horizon()) {
    throw ValidationError("load horizon and price model stages differ");
  }
  const int extra = spec.horizon - table.horizon();
  if (extra < 0) throw ValidationError("extended horizon is shorter than the table");
  if (extra == 0) return table;

  ThresholdTable out(spec.horizon, spec.capacity, spec.shortfall_penalty);
  for (int t = 0; t <= table.horizon(); ++t) {
    auto src = table.row(t);
    std::copy(src.begin(), src.end(), out.mutable_row(t + extra).begin());
  }
  for (int t = extra - 1; t >= 0; --t) {
    fill_row(out, t, model.effective_distribution(t), options.pool);
  }
  return out;
}

}  // namespace flexload
