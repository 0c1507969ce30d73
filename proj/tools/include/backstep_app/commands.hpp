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

#ifndef BACKSTEP_APP__COMMANDS_HPP_
#define BACKSTEP_APP__COMMANDS_HPP_

#include "backstep/scenario_config.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace backstep::app
{

/// Process exit codes.
enum ExitCode : int
{
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitBlowUp = 3,
  kExitNumeric = 4,
  kExitVerifyFailed = 5,
};

/// Name of the environment variable holding the default output root.
inline constexpr const char * kOutputRootVariable = "BACKSTEP_OUTPUT_ROOT";

/// `requested` if non-empty, else $BACKSTEP_OUTPUT_ROOT/<command>, else ./backstep-out/<command>.
std::filesystem::path resolve_output_dir(
  const std::string & requested, const std::string & command);

/// One sweep axis, parsed from "key=v1,v2,...".
struct SweepAxis
{
  std::string key;
  std::vector<std::string> values;
};

/// Throws ConfigError on malformed text.
SweepAxis parse_sweep_axis(const std::string & text);

/// Runs one simulation and writes trajectory.csv, config.txt, snapshots/ and manifest.json.
int cmd_simulate(
  const std::filesystem::path & config_path, const std::filesystem::path & out_dir,
  std::ostream & log);

/// Runs the convergence study over `ladder` ("M:dt,..." or "M,..."; empty means M/2, M, 2M of
/// the config grid) and writes report.json, report.txt, convergence.csv and manifest.json.
/// Exit 0 iff every equation passes.
int cmd_verify(
  const std::filesystem::path & config_path, const std::string & ladder,
  const std::filesystem::path & out_dir, int workers, std::ostream & log);

/// Runs the cartesian product of `axes` over the config template, one simulation per cell in
/// cell_NNN/, plus sweep.csv and manifest.json. The exit code is the largest cell exit code.
int cmd_sweep(
  const std::filesystem::path & config_path, const std::vector<SweepAxis> & axes,
  const std::filesystem::path & out_dir, int workers, std::ostream & log);

}  // namespace backstep::app

#endif  // BACKSTEP_APP__COMMANDS_HPP_
