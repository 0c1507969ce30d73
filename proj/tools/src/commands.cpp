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

#include "backstep_app/commands.hpp"

#include "backstep/closed_loop.hpp"
#include "backstep/errors.hpp"
#include "backstep/parallel.hpp"
#include "backstep/residuals.hpp"
#include "backstep/serialization.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace backstep::app
{
namespace
{

namespace fs = std::filesystem;

using Clock = std::chrono::steady_clock;

class FileIndex
{
public:
  explicit FileIndex(fs::path root) : root_(std::move(root)) {}

  const fs::path & root() const { return root_; }
  const std::vector<std::string> & files() const { return files_; }

  void write(const std::string & relative, const std::function<void(std::ostream &)> & body)
  {
    const fs::path path = root_ / relative;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    body(out);
    out.flush();
    if (!out) {
      throw std::runtime_error("failed writing " + path.string());
    }
    files_.push_back(relative);
  }

  void write_json(const std::string & relative, const nlohmann::json & j)
  {
    write(relative, [&](std::ostream & out) { out << j.dump(2) << '\n'; });
  }

  void adopt(const std::string & prefix, const std::vector<std::string> & files)
  {
    for (const std::string & f : files) {
      files_.push_back(prefix + "/" + f);
    }
  }

private:
  fs::path root_;
  std::vector<std::string> files_;
};

int exit_code_for(RunStatus status)
{
  switch (status) {
    case RunStatus::kOk:
      return kExitOk;
    case RunStatus::kBlowUp:
      return kExitBlowUp;
    case RunStatus::kNumeric:
      return kExitNumeric;
  }
  return kExitFailure;
}

std::string config_error_text(const ConfigError & e)
{
  return e.key().empty() ? std::string(e.what()) : fmt::format("{} (key '{}')", e.what(), e.key());
}

// Result of one simulation written into its own directory.
struct CellOutcome
{
  int exit_code{kExitOk};
  std::string status{"ok"};
  std::string message;
  double failure_time{std::numeric_limits<double>::quiet_NaN()};
  double final_norm{std::numeric_limits<double>::quiet_NaN()};
  double max_control_residual{std::numeric_limits<double>::quiet_NaN()};
  int samples{0};
  int analysed{0};
  ResidualSet residuals;
};

CellOutcome simulate_into(const ScenarioConfig & config, FileIndex & files)
{
  CellOutcome out;
  const SimulationResult sim = run_scenario(config);
  out.exit_code = exit_code_for(sim.status);
  out.status = to_string(sim.status);
  out.message = sim.message;
  out.max_control_residual = sim.max_control_residual;
  out.samples = static_cast<int>(sim.trajectory.size());
  if (sim.status != RunStatus::kOk) {
    out.failure_time = sim.failure_time;
  }
  if (!sim.trajectory.empty()) {
    out.final_norm = sim.trajectory.back().state.lpNorm<Eigen::Infinity>();
  }

  files.write("config.txt", [&](std::ostream & o) { o << to_config_text(config); });
  files.write("trajectory.csv", [&](std::ostream & o) { write_trajectory_csv(o, sim); });

  const Plant plant = make_builtin_plant(config.plant, config.plant_params);
  for (const SnapshotTriplet & tr : sim.triplets) {
    const std::string stem = fmt::format("snapshots/step_{:08d}", tr.center.step);
    files.write(stem + ".csv", [&](std::ostream & o) { write_snapshot_csv(o, tr.center); });
    nlohmann::json j = snapshot_summary_json(tr.center);
    nlohmann::json res;
    for (const auto & [name, r] : evaluate_residuals(plant, tr)) {
      res[name] = {{"max_abs", r.max_abs}, {"l2", r.l2}};
    }
    j["residuals"] = res;
    j["delta"] = tr.delta;
    files.write_json(stem + ".json", j);
  }
  if (sim.status == RunStatus::kOk && !sim.triplets.empty()) {
    const double window = config.delay_upper + config.analysis_margin;
    out.residuals = aggregate_residuals(plant, sim.triplets, window, &out.analysed);
  }
  return out;
}

void finish_manifest(
  RunManifest & manifest, FileIndex & files, const Clock::time_point & start, int exit_code)
{
  manifest.finished_utc = utc_timestamp();
  manifest.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  manifest.exit_code = exit_code;
  manifest.files = files.files();
  manifest.files.push_back("manifest.json");
  const nlohmann::json j = manifest_json(manifest);
  files.write_json("manifest.json", j);
}

// Runs `body`, translating exceptions into exit codes and a log line.
int guarded(const std::string & command, std::ostream & log, const std::function<int()> & body)
{
  try {
    return body();
  } catch (const ConfigError & e) {
    log << command << ": config error: " << config_error_text(e) << '\n';
    return kExitConfig;
  } catch (const BlowUpError & e) {
    log << command << ": blow-up: " << e.what() << '\n';
    return kExitBlowUp;
  } catch (const NumericError & e) {
    log << command << ": numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception & e) {
    log << command << ": error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::string optional_number(double v)
{
  return std::isfinite(v) ? format_number(v) : std::string();
}

}  // namespace

fs::path resolve_output_dir(const std::string & requested, const std::string & command)
{
  if (!requested.empty()) {
    return requested;
  }
  const char * root = std::getenv(kOutputRootVariable);
  if (root != nullptr && *root != '\0') {
    return fs::path(root) / command;
  }
  return fs::path("backstep-out") / command;
}

SweepAxis parse_sweep_axis(const std::string & text)
{
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw ConfigError("sweep axis must look like key=v1,v2,...: '" + text + "'", "grid");
  }
  SweepAxis axis;
  axis.key = text.substr(0, eq);
  std::stringstream values(text.substr(eq + 1));
  std::string item;
  while (std::getline(values, item, ',')) {
    if (item.empty()) {
      throw ConfigError("empty value in sweep axis '" + text + "'", axis.key);
    }
    axis.values.push_back(item);
  }
  // Reject unknown keys and malformed values before anything runs.
  ScenarioConfig probe;
  for (const std::string & v : axis.values) {
    apply_config_value(probe, axis.key, v);
  }
  return axis;
}

int cmd_simulate(const fs::path & config_path, const fs::path & out_dir, std::ostream & log)
{
  return guarded("simulate", log, [&]() {
      const auto start = Clock::now();
      RunManifest manifest;
      manifest.command = "simulate";
      manifest.started_utc = utc_timestamp();
      manifest.config = load_scenario_config(config_path);

      FileIndex files(out_dir);
      const CellOutcome cell = simulate_into(manifest.config, files);
      manifest.runs.push_back(
        {"simulate", cell.status, cell.message, std::isfinite(cell.failure_time) ? cell.failure_time : 0.0});
      finish_manifest(manifest, files, start, cell.exit_code);

      if (cell.exit_code == kExitOk) {
        log << fmt::format(
          "simulate: ok, {} samples, |X(T)|_inf = {:.6g}, max |U - kappa(phat(1))| = {:.3g}\n",
          cell.samples, cell.final_norm, cell.max_control_residual);
      } else {
        log << fmt::format(
          "simulate: {} at t = {:.6g}: {}\n", cell.status, cell.failure_time, cell.message);
      }
      log << fmt::format("simulate: wrote {} files to {}\n", manifest.files.size(), out_dir.string());
      return cell.exit_code;
    });
}

int cmd_verify(
  const fs::path & config_path, const std::string & ladder, const fs::path & out_dir, int workers,
  std::ostream & log)
{
  return guarded("verify", log, [&]() {
      const auto start = Clock::now();
      RunManifest manifest;
      manifest.command = "verify";
      manifest.started_utc = utc_timestamp();
      manifest.config = load_scenario_config(config_path);

      const int g = manifest.config.grid;
      const std::string spec = ladder.empty() ? fmt::format("{},{},{}", g / 2, g, 2 * g) : ladder;
      const std::vector<LadderRung> rungs = parse_ladder(spec, g, manifest.config.dt);
      StudyOptions options;
      options.workers = workers;
      const ResidualReport report = convergence_study(manifest.config, rungs, options);

      int code = report.passed ? kExitOk : kExitVerifyFailed;
      int rung_failure = kExitOk;
      for (const RungResult & r : report.rungs) {
        manifest.runs.push_back(
          {fmt::format("M={} dt={}", r.grid, format_number(r.dt)), to_string(r.status), r.message,
            0.0});
        rung_failure = std::max(rung_failure, exit_code_for(r.status));
      }
      if (rung_failure != kExitOk) {
        code = rung_failure;
      }

      FileIndex files(out_dir);
      files.write_json("report.json", report_json(report));
      files.write("report.txt", [&](std::ostream & o) { write_report_table(o, report); });
      files.write("convergence.csv", [&](std::ostream & o) { write_convergence_csv(o, report); });
      finish_manifest(manifest, files, start, code);

      write_report_table(log, report);
      return code;
    });
}

int cmd_sweep(
  const fs::path & config_path, const std::vector<SweepAxis> & axes, const fs::path & out_dir,
  int workers, std::ostream & log)
{
  return guarded("sweep", log, [&]() {
      const auto start = Clock::now();
      RunManifest manifest;
      manifest.command = "sweep";
      manifest.started_utc = utc_timestamp();
      manifest.config = load_scenario_config(config_path);

      // Cartesian product, last axis fastest.
      std::vector<std::vector<std::string>> cells{{}};
      for (const SweepAxis & axis : axes) {
        std::vector<std::vector<std::string>> grown;
        for (const auto & prefix : cells) {
          for (const std::string & v : axis.values) {
            auto c = prefix;
            c.push_back(v);
            grown.push_back(std::move(c));
          }
        }
        cells = std::move(grown);
      }

      std::vector<CellOutcome> outcomes(cells.size());
      std::vector<std::vector<std::string>> cell_files(cells.size());
      parallel_for(cells.size(), workers, [&](std::size_t i) {
          const std::string name = fmt::format("cell_{:03d}", i);
          const auto cell_start = Clock::now();
          FileIndex files(out_dir / name);
          CellOutcome & out = outcomes[i];
          RunManifest cell_manifest;
          cell_manifest.command = "simulate";
          cell_manifest.started_utc = utc_timestamp();
          cell_manifest.config = manifest.config;
          try {
            for (std::size_t a = 0; a < axes.size(); ++a) {
              apply_config_value(cell_manifest.config, axes[a].key, cells[i][a]);
            }
            cell_manifest.config.validate();
            out = simulate_into(cell_manifest.config, files);
          } catch (const ConfigError & e) {
            out.exit_code = kExitConfig;
            out.status = "config-error";
            out.message = config_error_text(e);
          } catch (const NumericError & e) {
            out.exit_code = kExitNumeric;
            out.status = "numeric";
            out.message = e.what();
          } catch (const BlowUpError & e) {
            out.exit_code = kExitBlowUp;
            out.status = "blow-up";
            out.message = e.what();
          }
          cell_manifest.runs.push_back({name, out.status, out.message,
            std::isfinite(out.failure_time) ? out.failure_time : 0.0});
          finish_manifest(cell_manifest, files, cell_start, out.exit_code);
          cell_files[i] = files.files();
        });

      FileIndex files(out_dir);
      int code = kExitOk;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string name = fmt::format("cell_{:03d}", i);
        files.adopt(name, cell_files[i]);
        const CellOutcome & o = outcomes[i];
        manifest.runs.push_back({name, o.status, o.message,
          std::isfinite(o.failure_time) ? o.failure_time : 0.0});
        code = std::max(code, o.exit_code);
      }

      files.write("sweep.csv", [&](std::ostream & out) {
          out << "cell";
          for (const SweepAxis & axis : axes) {
            out << ',' << csv_field(axis.key);
          }
          out << ",status,exit_code,failure_time,final_state_norm,max_control_residual";
          out << ",analysed_snapshots";
          for (const auto & entry : residual_catalog()) {
            out << ",max_" << entry.first;
          }
          out << ",message\n";
          for (std::size_t i = 0; i < cells.size(); ++i) {
            const CellOutcome & o = outcomes[i];
            out << fmt::format("cell_{:03d}", i);
            for (const std::string & v : cells[i]) {
              out << ',' << csv_field(v);
            }
            out << ',' << o.status << ',' << o.exit_code << ',' << optional_number(o.failure_time)
                << ',' << optional_number(o.final_norm) << ','
                << optional_number(o.max_control_residual) << ',' << o.analysed;
            for (const auto & entry : residual_catalog()) {
              const auto it = o.residuals.find(entry.first);
              out << ',' << (it == o.residuals.end() ? std::string() : format_number(it->second.max_abs));
            }
            out << ',' << csv_field(o.message) << '\n';
          }
        });
      finish_manifest(manifest, files, start, code);

      int ok = 0;
      for (const CellOutcome & o : outcomes) {
        ok += o.exit_code == kExitOk ? 1 : 0;
      }
      log << fmt::format(
        "sweep: {} cells, {} ok, exit {}; aggregate in {}\n", cells.size(), ok, code,
        (out_dir / "sweep.csv").string());
      return code;
    });
}

}  // namespace backstep::app
