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

#ifndef BACKSTEP__SERIALIZATION_HPP_
#define BACKSTEP__SERIALIZATION_HPP_

#include "backstep/closed_loop.hpp"
#include "backstep/residuals.hpp"
#include "backstep/scenario_config.hpp"

#include <nlohmann/json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace backstep
{

/// Library version string.
std::string version();

/// RFC-4180 field: quoted when it contains a comma, quote or line break.
std::string csv_field(const std::string & text);

/// Shortest round-trip-safe decimal form ("{:.17g}").
std::string format_number(double v);

/// Columns t, x1..xn, U, dhat; one row per step.
void write_trajectory_csv(std::ostream & out, const SimulationResult & result);

/// One row per node: x, every scalar profile, vector profiles as name_1..name_n.
void write_snapshot_csv(std::ostream & out, const SystemSnapshot & snapshot);

/// Scalars, boundary values and the scalar kernels of a snapshot.
nlohmann::json snapshot_summary_json(const SystemSnapshot & snapshot);

nlohmann::json config_json(const ScenarioConfig & config);
nlohmann::json report_json(const ResidualReport & report);

/// Columns rung, M, dt, delta, then one column per residual (max norm).
void write_convergence_csv(std::ostream & out, const ResidualReport & report);

/// Fixed-width table of the equation summaries.
void write_report_table(std::ostream & out, const ResidualReport & report);

struct ManifestEntry
{
  std::string label;
  std::string status;
  std::string message;
  double failure_time{0.0};
};

struct RunManifest
{
  std::string command;
  ScenarioConfig config;
  std::string started_utc;
  std::string finished_utc;
  double wall_seconds{0.0};
  int exit_code{0};
  std::vector<ManifestEntry> runs;
  /// Paths relative to the output directory.
  std::vector<std::string> files;
};

nlohmann::json manifest_json(const RunManifest & manifest);

/// Current UTC time, ISO 8601 with seconds.
std::string utc_timestamp();

}  // namespace backstep

#endif  // BACKSTEP__SERIALIZATION_HPP_
