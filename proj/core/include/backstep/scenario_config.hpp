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

#ifndef BACKSTEP__SCENARIO_CONFIG_HPP_
#define BACKSTEP__SCENARIO_CONFIG_HPP_

#include "backstep/delay_schedule.hpp"
#include "backstep/plant_model.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace backstep
{

/// One closed-loop scenario. Text form is flat `key = value` lines; see README for the schema.
struct ScenarioConfig
{
  std::string plant{"linear"};
  PlantParameters plant_params;
  std::vector<double> x0{1.0};

  double delay{0.5};
  double delay_lower{0.3};
  double delay_upper{0.8};
  ScheduleSpec schedule{ScheduleKind::kConstant, 0.5};

  int grid{100};
  double dt{1e-3};
  double horizon{10.0};
  /// Steps between emitted snapshot triplets; 0 disables snapshots unless snapshot_interval
  /// (in time units) is set.
  int snapshot_stride{0};
  double snapshot_interval{0.0};
  /// Steps between the members of a triplet; the time-difference step is spacing * dt.
  int triplet_spacing{1};

  double analysis_margin{1.0};
  double blowup_threshold{1e8};

  DelayBounds bounds() const { return {delay_lower, delay_upper, delay}; }
  /// Number of integration steps, horizon / dt rounded to the nearest integer.
  long long steps() const;
  /// snapshot_stride, or snapshot_interval converted to steps; 0 when neither is set.
  long long effective_stride() const;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Applies one `key = value` assignment. Throws ConfigError for unknown keys or bad values.
void apply_config_value(ScenarioConfig & config, const std::string & key, const std::string & value);

/// Parses the text form; `#` starts a comment. Unset keys keep their defaults. The result is
/// validated.
ScenarioConfig parse_scenario_config(std::istream & in);
ScenarioConfig load_scenario_config(const std::filesystem::path & path);

/// Every key with its effective value, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig & config);

/// Text form that parses back to an equal configuration.
std::string to_config_text(const ScenarioConfig & config);

}  // namespace backstep

#endif  // BACKSTEP__SCENARIO_CONFIG_HPP_
