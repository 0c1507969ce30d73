// Copyright 2026 The backstep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "backstep/scenario_config.hpp"

#include "backstep/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace backstep
{
namespace
{

std::string trim(const std::string & s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string & key, const std::string & text)
{
  const std::string t = trim(text);
  double v = 0.0;
  const char * begin = t.data();
  const char * end = t.data() + t.size();
  if (!t.empty() && *begin == '+') {
    ++begin;
  }
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "': expected a finite number, got '" + t + "'", key);
  }
  return v;
}

int parse_int(const std::string & key, const std::string & text)
{
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + t + "'", key);
  }
  return v;
}

std::vector<double> parse_list(const std::string & key, const std::string & text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) {
    throw ConfigError("key '" + key + "': expected a comma-separated list of numbers", key);
  }
  return out;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

long long ScenarioConfig::steps() const
{
  return std::llround(horizon / dt);
}

long long ScenarioConfig::effective_stride() const
{
  if (snapshot_stride > 0) {
    return snapshot_stride;
  }
  if (snapshot_interval > 0.0) {
    return std::max(1LL, std::llround(snapshot_interval / dt));
  }
  return 0;
}

void ScenarioConfig::validate() const
{
  const auto names = builtin_plant_names();
  if (std::find(names.begin(), names.end(), plant) == names.end()) {
    throw ConfigError("unknown plant '" + plant + "'", "plant");
  }
  const Plant p = make_builtin_plant(plant, plant_params);
  if (static_cast<int>(x0.size()) != p.model->dim()) {
    throw ConfigError(
      fmt::format("x0 has {} entries, plant '{}' has dimension {}", x0.size(), plant, p.model->dim()),
      "x0");
  }
  if (!(delay_lower > 0.0)) {
    throw ConfigError("delay_lower must be positive", "delay_lower");
  }
  if (!(delay_upper >= delay_lower)) {
    throw ConfigError("delay_upper must be at least delay_lower", "delay_upper");
  }
  if (!(delay >= delay_lower && delay <= delay_upper)) {
    throw ConfigError("delay must lie in [delay_lower, delay_upper]", "delay");
  }
  if (!(dt > 0.0)) {
    throw ConfigError("dt must be positive", "dt");
  }
  if (!(horizon >= dt)) {
    throw ConfigError("horizon must be at least dt", "horizon");
  }
  if (!(delay >= dt)) {
    throw ConfigError("dt must not exceed the true delay", "dt");
  }
  if (grid < 8) {
    throw ConfigError("grid must have at least 8 intervals", "grid");
  }
  if (snapshot_stride < 0) {
    throw ConfigError("snapshot_stride must be non-negative", "snapshot_stride");
  }
  if (triplet_spacing < 1) {
    throw ConfigError("triplet_spacing must be at least 1", "triplet_spacing");
  }
  if (!(snapshot_interval >= 0.0)) {
    throw ConfigError("snapshot_interval must be non-negative", "snapshot_interval");
  }
  if (!(analysis_margin >= 0.0)) {
    throw ConfigError("analysis_margin must be non-negative", "analysis_margin");
  }
  if (!(blowup_threshold > 0.0)) {
    throw ConfigError("blowup_threshold must be positive", "blowup_threshold");
  }
  DelaySchedule(schedule, bounds());
}

void apply_config_value(ScenarioConfig & c, const std::string & key, const std::string & value)
{
  const std::string v = trim(value);
  if (key == "plant") {
    c.plant = v;
  } else if (key.rfind("plant.", 0) == 0 && key.size() > 6) {
    c.plant_params[key.substr(6)] = parse_double(key, v);
  } else if (key == "x0") {
    c.x0 = parse_list(key, v);
  } else if (key == "delay") {
    c.delay = parse_double(key, v);
  } else if (key == "delay_lower") {
    c.delay_lower = parse_double(key, v);
  } else if (key == "delay_upper") {
    c.delay_upper = parse_double(key, v);
  } else if (key == "schedule") {
    c.schedule.kind = schedule_kind_from_string(v);
  } else if (key == "schedule.value") {
    c.schedule.value = parse_double(key, v);
  } else if (key == "schedule.initial") {
    c.schedule.initial = parse_double(key, v);
  } else if (key == "schedule.rate") {
    c.schedule.rate = parse_double(key, v);
  } else if (key == "schedule.center") {
    c.schedule.center = parse_double(key, v);
  } else if (key == "schedule.amplitude") {
    c.schedule.amplitude = parse_double(key, v);
  } else if (key == "schedule.frequency") {
    c.schedule.frequency = parse_double(key, v);
  } else if (key == "schedule.phase") {
    c.schedule.phase = parse_double(key, v);
  } else if (key == "schedule.offset") {
    c.schedule.offset = parse_double(key, v);
  } else if (key == "grid") {
    c.grid = parse_int(key, v);
  } else if (key == "dt") {
    c.dt = parse_double(key, v);
  } else if (key == "horizon") {
    c.horizon = parse_double(key, v);
  } else if (key == "snapshot_stride") {
    c.snapshot_stride = parse_int(key, v);
  } else if (key == "snapshot_interval") {
    c.snapshot_interval = parse_double(key, v);
  } else if (key == "triplet_spacing") {
    c.triplet_spacing = parse_int(key, v);
  } else if (key == "analysis_margin") {
    c.analysis_margin = parse_double(key, v);
  } else if (key == "blowup_threshold") {
    c.blowup_threshold = parse_double(key, v);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'", key);
  }
}

ScenarioConfig parse_scenario_config(std::istream & in)
{
  ScenarioConfig c;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", number));
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(fmt::format("line {}: empty key", number));
    }
    apply_config_value(c, key, line.substr(eq + 1));
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file '" + path.string() + "'");
  }
  return parse_scenario_config(in);
}

std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig & c)
{
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("plant", c.plant);
  for (const auto & [k, v] : c.plant_params) {
    e.emplace_back("plant." + k, num(v));
  }
  std::string xs;
  for (std::size_t i = 0; i < c.x0.size(); ++i) {
    xs += (i ? "," : "") + num(c.x0[i]);
  }
  e.emplace_back("x0", xs);
  e.emplace_back("delay", num(c.delay));
  e.emplace_back("delay_lower", num(c.delay_lower));
  e.emplace_back("delay_upper", num(c.delay_upper));
  e.emplace_back("schedule", to_string(c.schedule.kind));
  e.emplace_back("schedule.value", num(c.schedule.value));
  e.emplace_back("schedule.initial", num(c.schedule.initial));
  e.emplace_back("schedule.rate", num(c.schedule.rate));
  e.emplace_back("schedule.center", num(c.schedule.center));
  e.emplace_back("schedule.amplitude", num(c.schedule.amplitude));
  e.emplace_back("schedule.frequency", num(c.schedule.frequency));
  e.emplace_back("schedule.phase", num(c.schedule.phase));
  e.emplace_back("schedule.offset", num(c.schedule.offset));
  e.emplace_back("grid", std::to_string(c.grid));
  e.emplace_back("dt", num(c.dt));
  e.emplace_back("horizon", num(c.horizon));
  e.emplace_back("snapshot_stride", std::to_string(c.snapshot_stride));
  e.emplace_back("snapshot_interval", num(c.snapshot_interval));
  e.emplace_back("triplet_spacing", std::to_string(c.triplet_spacing));
  e.emplace_back("analysis_margin", num(c.analysis_margin));
  e.emplace_back("blowup_threshold", num(c.blowup_threshold));
  return e;
}

std::string to_config_text(const ScenarioConfig & config)
{
  std::string out;
  for (const auto & [k, v] : config_entries(config)) {
    out += k + " = " + v + "\n";
  }
  return out;
}

}  // namespace backstep
