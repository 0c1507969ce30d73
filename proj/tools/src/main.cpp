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

#include "backstep/errors.hpp"
#include "backstep/serialization.hpp"
#include "backstep_app/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

int main(int argc, char ** argv)
{
  namespace app = backstep::app;

  CLI::App cli{"Backstepping transformation toolkit for systems with unknown input delay"};
  cli.set_version_flag("--version", backstep::version());
  cli.require_subcommand(1);

  std::string config;
  std::string out;
  std::string ladder;
  std::vector<std::string> grid;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto * simulate = cli.add_subcommand("simulate", "run one closed-loop simulation");
  simulate->add_option("--config", config, "scenario config file")->required()->check(
    CLI::ExistingFile);
  simulate->add_option("--out", out, "output directory");

  auto * verify = cli.add_subcommand("verify", "residual convergence study over a grid ladder");
  verify->add_option("--config", config, "scenario config file")->required()->check(
    CLI::ExistingFile);
  verify->add_option("--ladder", ladder, "rungs as M:dt,... or M,... (default M/2,M,2M)");
  verify->add_option("--out", out, "output directory");
  verify->add_option("--workers", workers, "concurrent rungs")->check(CLI::PositiveNumber);

  auto * sweep = cli.add_subcommand("sweep", "simulate every cell of a parameter grid");
  sweep->add_option("--config", config, "scenario config template")->required()->check(
    CLI::ExistingFile);
  sweep->add_option("--grid", grid, "axis key=v1,v2,... (repeatable)")->required();
  sweep->add_option("--out", out, "output directory");
  sweep->add_option("--workers", workers, "concurrent cells")->check(CLI::PositiveNumber);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = cli.exit(e);
    return code == 0 ? app::kExitOk : app::kExitConfig;
  }

  if (simulate->parsed()) {
    return app::cmd_simulate(config, app::resolve_output_dir(out, "simulate"), std::cout);
  }
  if (verify->parsed()) {
    return app::cmd_verify(
      config, ladder, app::resolve_output_dir(out, "verify"), workers, std::cout);
  }
  std::vector<app::SweepAxis> axes;
  try {
    for (const std::string & g : grid) {
      axes.push_back(app::parse_sweep_axis(g));
    }
  } catch (const backstep::ConfigError & e) {
    std::cerr << "sweep: config error: " << e.what() << '\n';
    return app::kExitConfig;
  }
  return app::cmd_sweep(config, axes, app::resolve_output_dir(out, "sweep"), workers, std::cout);
}
