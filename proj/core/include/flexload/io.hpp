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


#ifndef FLEXLOAD_IO_HPP_
#define FLEXLOAD_IO_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "flexload/fleet_sim.hpp"
#include "flexload/policy.hpp"
#include "flexload/price_model.hpp"
#include "flexload/threshold_table.hpp"
#include "flexload/types.hpp"

// Text formats. Parsers throw ValidationError with a message naming the
// offending field or line; writers are deterministic (same input, same
// bytes).
namespace flexload::io {

// 12 significant digits, "-inf"/"inf" for infinities.
std::string format_number(double v);

LoadSpec load_spec_from_json(std::string_view text);
std::string to_json(const LoadSpec& spec);

// {"stages": [...], "seasonality": [...], "initial_state": {...}}
PriceModel price_model_from_json(std::string_view text);
// Seasonal models built from callables cannot be written.
std::string to_json(const PriceModel& model);

// Header `stage,pi_e,pi_r` (one row per stage, deterministic path) or
// `stage,sample_idx,weight,eps_e,eps_r` (joint empirical innovations).
PriceModel price_model_from_csv(std::string_view text);
// `stage,pi_e,pi_r` only.
std::vector<PricePair> price_path_from_csv(std::string_view text);

// `t,i,m_hat`, row-major, i = 0 written as -inf.
std::string table_to_csv(const ThresholdTable& table);
// Horizon is read from the rows; capacity and penalty come from the load.
// The terminal row must equal the penalty.
ThresholdTable table_from_csv(std::string_view text, double capacity, double penalty);

// `t,pi_e,pi_r,d,e,r,stage_cost` plus a terminal row at t = T.
std::string rollout_to_csv(const Rollout& rollout, const LoadSpec& spec);

// Keys absent from the document keep their synthetic_default() values.
fleet::SimConfig sim_config_from_json(std::string_view text);
std::string to_json(const fleet::SimConfig& config);

}  // namespace flexload::io

#endif  // FLEXLOAD_IO_HPP_
