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


#include "flexload/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace flexload::io {
namespace {

using nlohmann::json;

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

void only_keys(const json& j, std::initializer_list<const char*> allowed,
               const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw ValidationError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

int integer(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number_integer()) {
    throw ValidationError(where + ": '" + key + "' must be an integer");
  }
  return v.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError(where + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

InnovationDistribution distribution_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ValidationError(where + ": expected an object with a 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "point_mass") {
    only_keys(j, {"kind", "value"}, where);
    return InnovationDistribution::point_mass(number(j, "value", where));
  }
  if (kind == "gaussian") {
    only_keys(j, {"kind", "mean", "stddev"}, where);
    return InnovationDistribution::gaussian(number(j, "mean", where),
                                            number(j, "stddev", where));
  }
  if (kind == "empirical") {
    only_keys(j, {"kind", "samples"}, where);
    if (!j.contains("samples") || !j.at("samples").is_array()) {
      throw ValidationError(where + ": 'samples' must be an array");
    }
    std::vector<WeightedValue> samples;
    for (const auto& s : j.at("samples")) {
      if (s.is_number()) {
        samples.push_back({s.get<double>(), 1.0});
      } else {
        only_keys(s, {"value", "weight"}, where + ".samples");
        samples.push_back({number(s, "value", where), number_or(s, "weight", 1.0, where)});
      }
    }
    return InnovationDistribution::empirical(std::move(samples));
  }
  if (kind == "tabulated_cdf") {
    only_keys(j, {"kind", "x", "p"}, where);
    if (!j.contains("x") || !j.contains("p")) {
      throw ValidationError(where + ": tabulated_cdf needs 'x' and 'p'");
    }
    return InnovationDistribution::tabulated_cdf(numbers(j.at("x"), where + ".x"),
                                                 numbers(j.at("p"), where + ".p"));
  }
  throw ValidationError(where + ": unknown distribution kind '" + kind + "'");
}

json distribution_to_json(const InnovationDistribution& d) {
  switch (d.kind()) {
    case DistributionKind::point_mass:
      return {{"kind", "point_mass"}, {"value", d.mean()}};
    case DistributionKind::gaussian:
      return {{"kind", "gaussian"}, {"mean", d.gaussian_mean()}, {"stddev", d.gaussian_stddev()}};
    case DistributionKind::empirical: {
      json samples = json::array();
      for (const auto& a : d.atoms()) samples.push_back({{"value", a.value}, {"weight", a.weight}});
      return {{"kind", "empirical"}, {"samples", samples}};
    }
    case DistributionKind::tabulated_cdf: {
      auto x = d.table_x();
      auto p = d.table_p();
      return {{"kind", "tabulated_cdf"},
              {"x", std::vector<double>(x.begin(), x.end())},
              {"p", std::vector<double>(p.begin(), p.end())}};
    }
  }
  return {};
}

// ---- CSV ------------------------------------------------------------------

struct CsvRow {
  int line = 0;
  std::vector<std::string> cells;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<CsvRow> read_csv(std::string_view text, std::vector<std::string>& header) {
  std::vector<CsvRow> rows;
  header.clear();
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    if (trim(raw).empty()) continue;
    CsvRow row{line, {}};
    std::size_t c = 0;
    while (true) {
      const auto comma = raw.find(',', c);
      row.cells.push_back(trim(raw.substr(c, comma == std::string_view::npos ? raw.npos : comma - c)));
      if (comma == std::string_view::npos) break;
      c = comma + 1;
    }
    if (header.empty()) {
      header = std::move(row.cells);
    } else {
      rows.push_back(std::move(row));
    }
  }
  if (header.empty()) throw ValidationError("CSV input is empty");
  return rows;
}

double parse_double(const std::string& s, const CsvRow& row) {
  if (s == "-inf") return -INFINITY;
  if (s == "inf") return INFINITY;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw ValidationError("line " + std::to_string(row.line) + ": '" + s +
                          "' is not a number");
  }
  return v;
}

int parse_int(const std::string& s, const CsvRow& row) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("line " + std::to_string(row.line) + ": '" + s +
                          "' is not an integer");
  }
  return v;
}

void expect_width(const CsvRow& row, std::size_t n) {
  if (row.cells.size() != n) {
    throw ValidationError("line " + std::to_string(row.line) + ": expected " +
                          std::to_string(n) + " fields, found " +
                          std::to_string(row.cells.size()));
  }
}

bool header_is(const std::vector<std::string>& header, std::initializer_list<const char*> names) {
  if (header.size() != names.size()) return false;
  std::size_t k = 0;
  for (const char* n : names) {
    if (header[k++] != n) return false;
  }
  return true;
}

std::vector<PricePair> path_rows(const std::vector<CsvRow>& rows) {
  std::vector<PricePair> path;
  for (const auto& row : rows) {
    expect_width(row, 3);
    const int stage = parse_int(row.cells[0], row);
    if (stage != static_cast<int>(path.size())) {
      throw ValidationError("line " + std::to_string(row.line) + ": stages must run 0, 1, 2, ...");
    }
    const PricePair p{parse_double(row.cells[1], row), parse_double(row.cells[2], row)};
    if (!std::isfinite(p.energy) || !std::isfinite(p.reserve)) {
      throw ValidationError("line " + std::to_string(row.line) + ": prices must be finite");
    }
    path.push_back(p);
  }
  if (path.empty()) throw ValidationError("price CSV has no stages");
  return path;
}

fleet::ClippedLognormal lognormal_from_json(const json& j, fleet::ClippedLognormal base,
                                                  const std::string& where) {
  only_keys(j, {"log_mean", "log_sd", "min", "max"}, where);
  base.log_mean = number_or(j, "log_mean", base.log_mean, where);
  base.log_sd = number_or(j, "log_sd", base.log_sd, where);
  base.min = number_or(j, "min", base.min, where);
  base.max = number_or(j, "max", base.max, where);
  return base;
}

json lognormal_to_json(const fleet::ClippedLognormal& l) {
  return {{"log_mean", l.log_mean}, {"log_sd", l.log_sd}, {"min", l.min}, {"max", l.max}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

LoadSpec load_spec_from_json(std::string_view text) {
  const json j = parse(text, "load spec");
  only_keys(j, {"demand", "capacity", "horizon", "shortfall_penalty"}, "load spec");
  LoadSpec spec;
  spec.demand = number(j, "demand", "load spec");
  spec.capacity = number_or(j, "capacity", 1.0, "load spec");
  spec.horizon = integer(j, "horizon", "load spec");
  spec.shortfall_penalty = number(j, "shortfall_penalty", "load spec");
  spec.validate();
  return spec;
}

std::string to_json(const LoadSpec& spec) {
  const json j = {{"demand", spec.demand},
                  {"capacity", spec.capacity},
                  {"horizon", spec.horizon},
                  {"shortfall_penalty", spec.shortfall_penalty}};
  return j.dump(2) + "\n";
}

PriceModel price_model_from_json(std::string_view text) {
  const json j = parse(text, "price model");
  only_keys(j, {"stages", "seasonality", "initial_state"}, "price model");
  if (!j.contains("stages") || !j.at("stages").is_array()) {
    throw ValidationError("price model: 'stages' must be an array");
  }
  std::vector<StageInnovations> stages;
  int t = 0;
  for (const auto& s : j.at("stages")) {
    const std::string where = "stages[" + std::to_string(t++) + "]";
    only_keys(s, {"energy", "reserve", "joint"}, where);
    StageInnovations st;
    if (s.contains("energy")) st.energy = distribution_from_json(s.at("energy"), where + ".energy");
    if (s.contains("reserve")) {
      st.reserve = distribution_from_json(s.at("reserve"), where + ".reserve");
    }
    if (s.contains("joint")) {
      if (!s.at("joint").is_array()) throw ValidationError(where + ".joint must be an array");
      for (const auto& js : s.at("joint")) {
        only_keys(js, {"energy", "reserve", "weight"}, where + ".joint");
        st.joint.push_back({number(js, "energy", where), number_or(js, "reserve", 0.0, where),
                            number_or(js, "weight", 1.0, where)});
      }
    }
    stages.push_back(std::move(st));
  }
  PricePair init;
  if (j.contains("initial_state")) {
    only_keys(j.at("initial_state"), {"energy", "reserve"}, "initial_state");
    init.energy = number_or(j.at("initial_state"), "energy", 0.0, "initial_state");
    init.reserve = number_or(j.at("initial_state"), "reserve", 0.0, "initial_state");
  }
  if (!j.contains("seasonality") || j.at("seasonality").is_null()) {
    return PriceModel(std::move(stages), init);
  }
  if (!j.at("seasonality").is_array()) {
    throw ValidationError("price model: 'seasonality' must be an array");
  }
  std::vector<AffineSeasonality> affine;
  int k = 0;
  for (const auto& a : j.at("seasonality")) {
    const std::string where = "seasonality[" + std::to_string(k++) + "]";
    only_keys(a, {"energy_intercept", "energy_slope", "reserve_intercept", "reserve_slope"},
              where);
    affine.push_back({number_or(a, "energy_intercept", 0.0, where),
                      number_or(a, "energy_slope", 0.0, where),
                      number_or(a, "reserve_intercept", 0.0, where),
                      number_or(a, "reserve_slope", 0.0, where)});
  }
  return PriceModel(std::move(stages), std::move(affine), init);
}

std::string to_json(const PriceModel& model) {
  json stages = json::array();
  for (int t = 0; t < model.horizon(); ++t) {
    const StageInnovations& s = model.stage(t);
    json js = {{"energy", distribution_to_json(s.energy)},
               {"reserve", distribution_to_json(s.reserve)}};
    if (!s.joint.empty()) {
      json joint = json::array();
      for (const auto& x : s.joint) {
        joint.push_back({{"energy", x.energy}, {"reserve", x.reserve}, {"weight", x.weight}});
      }
      js["joint"] = joint;
    }
    stages.push_back(js);
  }
  json j = {{"stages", stages},
            {"initial_state",
             {{"energy", model.initial_state().energy},
              {"reserve", model.initial_state().reserve}}}};
  if (!model.is_independent()) {
    if (model.affine_seasonality().empty()) {
      throw ValidationError("seasonal maps given as callables cannot be serialized");
    }
    json seasonality = json::array();
    for (const auto& a : model.affine_seasonality()) {
      seasonality.push_back({{"energy_intercept", a.energy_intercept},
                             {"energy_slope", a.energy_slope},
                             {"reserve_intercept", a.reserve_intercept},
                             {"reserve_slope", a.reserve_slope}});
    }
    j["seasonality"] = seasonality;
  }
  return j.dump(2) + "\n";
}

std::vector<PricePair> price_path_from_csv(std::string_view text) {
  std::vector<std::string> header;
  const auto rows = read_csv(text, header);
  if (!header_is(header, {"stage", "pi_e", "pi_r"})) {
    throw ValidationError("price path CSV header must be 'stage,pi_e,pi_r'");
  }
  return path_rows(rows);
}

PriceModel price_model_from_csv(std::string_view text) {
  std::vector<std::string> header;
  const auto rows = read_csv(text, header);
  if (header_is(header, {"stage", "pi_e", "pi_r"})) {
    return PriceModel::deterministic(path_rows(rows));
  }
  if (!header_is(header, {"stage", "sample_idx", "weight", "eps_e", "eps_r"})) {
    throw ValidationError(
        "price CSV header must be 'stage,pi_e,pi_r' or "
        "'stage,sample_idx,weight,eps_e,eps_r'");
  }
  std::map<int, std::map<int, JointSample>> by_stage;
  for (const auto& row : rows) {
    expect_width(row, 5);
    const int stage = parse_int(row.cells[0], row);
    const int idx = parse_int(row.cells[1], row);
    const JointSample s{parse_double(row.cells[3], row), parse_double(row.cells[4], row),
                        parse_double(row.cells[2], row)};
    if (stage < 0) throw ValidationError("line " + std::to_string(row.line) + ": negative stage");
    if (!by_stage[stage].emplace(idx, s).second) {
      throw ValidationError("line " + std::to_string(row.line) + ": duplicate sample_idx");
    }
  }
  std::vector<StageInnovations> stages;
  for (const auto& [stage, samples] : by_stage) {
    if (stage != static_cast<int>(stages.size())) {
      throw ValidationError("price CSV is missing stage " + std::to_string(stages.size()));
    }
    StageInnovations st;
    for (const auto& [idx, s] : samples) st.joint.push_back(s);
    stages.push_back(std::move(st));
  }
  if (stages.empty()) throw ValidationError("price CSV has no stages");
  return PriceModel(std::move(stages));
}

std::string table_to_csv(const ThresholdTable& table) {
  std::string out = "t,i,m_hat\n";
  for (int t = 0; t <= table.horizon(); ++t) {
    for (int i = 0; i <= table.horizon(); ++i) {
      out += std::to_string(t) + "," + std::to_string(i) + "," + to_string(table.at(t, i)) + "\n";
    }
  }
  return out;
}

ThresholdTable table_from_csv(std::string_view text, double capacity, double penalty) {
  std::vector<std::string> header;
  const auto rows = read_csv(text, header);
  if (!header_is(header, {"t", "i", "m_hat"})) {
    throw ValidationError("table CSV header must be 't,i,m_hat'");
  }
  int horizon = 0;
  for (const auto& row : rows) {
    expect_width(row, 3);
    horizon = std::max(horizon, parse_int(row.cells[0], row));
  }
  if (horizon < 1) throw ValidationError("table CSV needs at least one stage");
  const auto n = static_cast<std::size_t>(horizon) + 1;
  if (rows.size() != n * n) {
    throw ValidationError("table CSV needs (T+1)^2 = " + std::to_string(n * n) + " rows");
  }
  ThresholdTable table(horizon, capacity, penalty);
  std::set<std::pair<int, int>> seen;
  for (const auto& row : rows) {
    const int t = parse_int(row.cells[0], row);
    const int i = parse_int(row.cells[1], row);
    if (t < 0 || i < 0 || i > horizon || !seen.emplace(t, i).second) {
      throw ValidationError("line " + std::to_string(row.line) + ": bad or repeated (t, i)");
    }
    const double v = parse_double(row.cells[2], row);
    if (i == 0) {
      if (!(std::isinf(v) && v < 0)) {
        throw ValidationError("line " + std::to_string(row.line) + ": piece 0 must be -inf");
      }
      continue;
    }
    if (!std::isfinite(v)) {
      throw ValidationError("line " + std::to_string(row.line) + ": threshold must be finite");
    }
    if (t == horizon && v != penalty) {
      throw ValidationError("terminal row does not match the shortfall penalty " +
                            format_number(penalty));
    }
    table.set(t, i, v);
  }
  return table;
}

std::string rollout_to_csv(const Rollout& rollout, const LoadSpec& spec) {
  std::string out = "t,pi_e,pi_r,d,e,r,stage_cost\n";
  for (const auto& s : rollout.steps) {
    out += std::to_string(s.t) + "," + format_number(s.prices.energy) + "," +
           format_number(s.prices.reserve) + "," + format_number(s.demand) + "," +
           format_number(s.decision.consume) + "," + format_number(s.decision.reserve_offer) +
           "," + format_number(s.stage_cost) + "\n";
  }
  out += std::to_string(spec.horizon) + "," + format_number(spec.shortfall_penalty) + ",0," +
         format_number(rollout.terminal_demand) + ",0,0," +
         format_number(rollout.terminal_cost) + "\n";
  return out;
}

fleet::SimConfig sim_config_from_json(std::string_view text) {
  const json j = parse(text, "sim config");
  only_keys(j,
            {"n_scenarios", "fleet_size", "slot_minutes", "arrival_weights", "dwell_hours",
             "demand", "capacities", "shortfall_penalty", "prices", "policies", "seed"},
            "sim config");
  fleet::SimConfig c = fleet::SimConfig::synthetic_default();
  const std::string w = "sim config";
  if (j.contains("n_scenarios")) c.n_scenarios = integer(j, "n_scenarios", w);
  if (j.contains("fleet_size")) c.fleet_size = integer(j, "fleet_size", w);
  if (j.contains("slot_minutes")) c.slot_minutes = integer(j, "slot_minutes", w);
  if (j.contains("arrival_weights")) c.arrival_weights = numbers(j.at("arrival_weights"), w);
  if (j.contains("dwell_hours")) c.dwell_hours = lognormal_from_json(j.at("dwell_hours"), c.dwell_hours, "dwell_hours");
  if (j.contains("demand")) c.demand = lognormal_from_json(j.at("demand"), c.demand, "demand");
  if (j.contains("capacities")) c.capacities = numbers(j.at("capacities"), "capacities");
  c.shortfall_penalty = number_or(j, "shortfall_penalty", c.shortfall_penalty, w);
  if (j.contains("prices")) {
    const json& p = j.at("prices");
    only_keys(p, {"energy_mean", "energy_stddev", "reserve"}, "prices");
    if (p.contains("energy_mean")) c.prices.energy_mean = numbers(p.at("energy_mean"), "prices.energy_mean");
    c.prices.energy_stddev = number_or(p, "energy_stddev", c.prices.energy_stddev, "prices");
    if (p.contains("reserve")) {
      if (p.at("reserve").is_number()) {
        c.prices.reserve.assign(c.prices.energy_mean.size(), p.at("reserve").get<double>());
      } else {
        c.prices.reserve = numbers(p.at("reserve"), "prices.reserve");
      }
    }
  }
  if (j.contains("policies")) {
    if (!j.at("policies").is_array()) throw ValidationError("policies must be an array");
    c.policies.clear();
    for (const auto& p : j.at("policies")) {
      if (!p.is_string()) throw ValidationError("policies must be names");
      c.policies.push_back(parse_policy_kind(p.get<std::string>()));
    }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
      throw ValidationError("seed must be a nonnegative integer");
    }
    if (j.at("seed").is_number_integer() && j.at("seed").get<long long>() < 0) {
      throw ValidationError("seed must be a nonnegative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  c.validate();
  return c;
}

std::string to_json(const fleet::SimConfig& c) {
  json policies = json::array();
  for (PolicyKind p : c.policies) policies.push_back(std::string(to_string(p)));
  const json j = {{"n_scenarios", c.n_scenarios},
                  {"fleet_size", c.fleet_size},
                  {"slot_minutes", c.slot_minutes},
                  {"arrival_weights", c.arrival_weights},
                  {"dwell_hours", lognormal_to_json(c.dwell_hours)},
                  {"demand", lognormal_to_json(c.demand)},
                  {"capacities", c.capacities},
                  {"shortfall_penalty", c.shortfall_penalty},
                  {"prices",
                   {{"energy_mean", c.prices.energy_mean},
                    {"energy_stddev", c.prices.energy_stddev},
                    {"reserve", c.prices.reserve}}},
                  {"policies", policies},
                  {"seed", c.seed}};
  return j.dump(2) + "\n";
}

}  // namespace flexload::io
