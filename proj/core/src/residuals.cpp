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

#include "backstep/residuals.hpp"

#include "backstep/errors.hpp"
#include "backstep/parallel.hpp"
#include "backstep/predictor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace backstep
{
namespace
{

EquationResidual profile_norm(const Eigen::MatrixXd & r, int skip = 0)
{
  const int rows = static_cast<int>(r.rows());
  const double h = 1.0 / (rows - 1);
  EquationResidual out;
  double sum = 0.0;
  for (int i = skip; i < rows - skip; ++i) {
    const double a = r.row(i).cwiseAbs().maxCoeff();
    out.max_abs = std::max(out.max_abs, a);
    sum += r.row(i).squaredNorm();
  }
  out.l2 = std::sqrt(h * sum);
  return out;
}

EquationResidual scalar_norm(double v)
{
  return {std::abs(v), std::abs(v)};
}

Eigen::MatrixXd central(const GridProfile & prev, const GridProfile & next, double delta)
{
  return (next.values() - prev.values()) / (2.0 * delta);
}

Eigen::VectorXd column(const GridProfile & p) { return p.values().col(0); }

Eigen::VectorXd x_minus_one(int intervals)
{
  return Eigen::VectorXd::LinSpaced(intervals + 1, -1.0, 0.0);
}

// Row-vector kernel profile times f_ut, one value per node.
Eigen::VectorXd apply_row(const GridProfile & q, const Vector & f)
{
  return q.values() * f;
}

double boundary_driver(const SystemSnapshot & s)
{
  const int m = s.kernels.q1.intervals();
  return -s.dhat.rate * s.kernels.q1[m] + s.kernels.q2.values().row(m).dot(s.kernels.f_utilde);
}

void require_kernels(const SnapshotTriplet & s)
{
  for (const SystemSnapshot * snap : {&s.prev, &s.center, &s.next}) {
    if (snap->kernels.q1.empty() || snap->kernels.p3.empty()) {
      throw UsageError("residuals: snapshot without kernels");
    }
  }
  if (!(s.delta > 0.0)) {
    throw UsageError("residuals: triplet spacing must be positive");
  }
}

}  // namespace

std::string to_string(ResidualKind kind)
{
  switch (kind) {
    case ResidualKind::kInterior:
      return "interior";
    case ResidualKind::kBoundaryExact:
      return "boundary-exact";
    case ResidualKind::kBoundary:
      return "boundary";
    case ResidualKind::kCrossCheck:
      return "cross-check";
  }
  return "interior";
}

const std::vector<std::pair<std::string, ResidualKind>> & residual_catalog()
{
  static const std::vector<std::pair<std::string, ResidualKind>> catalog = {
    {"state", ResidualKind::kInterior},
    {"transport_u", ResidualKind::kInterior},
    {"transport_uhat", ResidualKind::kInterior},
    {"predictor", ResidualKind::kInterior},
    {"what", ResidualKind::kInterior},
    {"utilde", ResidualKind::kInterior},
    {"utilde_x", ResidualKind::kInterior},
    {"what_x", ResidualKind::kInterior},
    {"what_xx", ResidualKind::kInterior},
    {"bc_what", ResidualKind::kBoundaryExact},
    {"bc_utilde", ResidualKind::kBoundaryExact},
    {"bc_utilde_x", ResidualKind::kBoundary},
    {"bc_what_x", ResidualKind::kBoundary},
    {"bc_what_xx", ResidualKind::kBoundary},
    {"uhat_t", ResidualKind::kCrossCheck},
    {"uhat_xt", ResidualKind::kCrossCheck},
    {"phat_t", ResidualKind::kCrossCheck},
    {"q1_t", ResidualKind::kCrossCheck},
    {"q7", ResidualKind::kCrossCheck},
  };
  return catalog;
}

ResidualSet residual_state_equation(const Plant & plant, const SnapshotTriplet & s)
{
  const SystemSnapshot & c = s.center;
  const Vector xdot = (s.next.state - s.prev.state) / (2.0 * s.delta);
  const double input = c.what.front() + c.utilde.front() + plant.controller->kappa(c.state);
  const Vector r = xdot - plant.model->f(c.state, input);
  const double v = r.cwiseAbs().maxCoeff();
  return {{"state", {v, r.norm()}}};
}

ResidualSet residual_w_system(const SnapshotTriplet & s)
{
  require_kernels(s);
  const SystemSnapshot & c = s.center;
  const KernelSet & k = c.kernels;
  const Eigen::VectorXd r = c.dhat.value * central(s.prev.what, s.next.what, s.delta).col(0) -
    column(c.what_x) - c.dhat.rate * column(k.q1) + apply_row(k.q2, k.f_utilde);
  return {{"what", profile_norm(r)}, {"bc_what", scalar_norm(c.boundary_what())}};
}

ResidualSet residual_utilde_system(const SnapshotTriplet & s)
{
  require_kernels(s);
  const SystemSnapshot & c = s.center;
  const KernelSet & k = c.kernels;
  const double dtilde = c.delay - c.dhat.value;
  const Eigen::VectorXd r = c.delay * central(s.prev.utilde, s.next.utilde, s.delta).col(0) -
    column(c.utilde_x) + dtilde * column(k.p1) + c.dhat.rate * column(k.p2);
  return {{"utilde", profile_norm(r)}, {"bc_utilde", scalar_norm(c.boundary_utilde())}};
}

ResidualSet residual_derivative_systems(const SnapshotTriplet & s)
{
  require_kernels(s);
  const SystemSnapshot & c = s.center;
  const KernelSet & k = c.kernels;
  const int m = c.what.intervals();
  const double dh = c.dhat.value;
  const double rate = c.dhat.rate;
  const double dtilde = c.delay - dh;

  const Eigen::VectorXd r_ux = c.delay * central(s.prev.utilde_x, s.next.utilde_x, s.delta).col(0) -
    column(c.utilde_xx) + dtilde * column(k.p3) + rate * column(k.p4);
  const Eigen::VectorXd r_wx = dh * central(s.prev.what_x, s.next.what_x, s.delta).col(0) -
    column(c.what_xx) - rate * column(k.q3) + apply_row(k.q4, k.f_utilde);
  const Eigen::VectorXd r_wxx = dh * central(s.prev.what_xx, s.next.what_xx, s.delta).col(0) -
    column(c.what_xxx) - rate * column(k.q5) + apply_row(k.q6, k.f_utilde);

  const double q2f = k.q2.values().row(m).dot(k.f_utilde);
  const double q4f = k.q4.values().row(m).dot(k.f_utilde);
  return {
    {"utilde_x", profile_norm(r_ux)},
    {"what_x", profile_norm(r_wx)},
    {"what_xx", profile_norm(r_wxx, 2)},
    {"bc_utilde_x", scalar_norm(c.utilde_x.back() - dtilde * k.p1.back())},
    {"bc_what_x", scalar_norm(c.what_x.back() + rate * k.q1.back() - q2f)},
    {"bc_what_xx", scalar_norm(c.what_xx.back() + rate * k.q3.back() - q4f - dh * k.q7)},
  };
}

ResidualSet residual_transport_systems(const Plant & plant, const SnapshotTriplet & s)
{
  const SystemSnapshot & c = s.center;
  const int m = c.u.intervals();
  const double dh = c.dhat.value;
  const double rate = c.dhat.rate;

  const Eigen::VectorXd r_u =
    c.delay * central(s.prev.u, s.next.u, s.delta).col(0) - column(c.u_x);
  const Eigen::VectorXd r_uhat = dh * central(s.prev.uhat, s.next.uhat, s.delta).col(0) -
    column(c.uhat_x) - rate * x_minus_one(m).cwiseProduct(column(c.uhat_x));

  // Integral term from the sampled fields, with uhat_x by finite differences.
  const int n = c.phat.arity();
  GridProfile h(m, n);
  for (int i = 0; i <= m; ++i) {
    const Vector p = c.phat.at(i);
    h.set(
      i, plant.model->f(p, c.uhat[i]) +
      (c.phat.node(i) - 1.0) * c.uhat_x[i] * plant.model->df_du(p, c.uhat[i]));
  }
  const GridProfile integral = transition_integral(c.phi, h);
  const Vector f_ut = plant.model->f(c.state, c.u.front()) - plant.model->f(c.state, c.uhat.front());
  const GridProfile phat_x = spatial_derivative(c.phat);
  Eigen::MatrixXd r_p = dh * central(s.prev.phat, s.next.phat, s.delta) - phat_x.values() -
    rate * dh * integral.values();
  for (int i = 0; i <= m; ++i) {
    r_p.row(i) -= (dh * c.phi.at(i) * f_ut).transpose();
  }
  return {
    {"transport_u", profile_norm(r_u)},
    {"transport_uhat", profile_norm(r_uhat)},
    {"predictor", profile_norm(r_p)},
  };
}

ResidualSet residual_time_derivatives(const SnapshotTriplet & s)
{
  require_kernels(s);
  const SystemSnapshot & c = s.center;
  const KernelSet & k = c.kernels;
  const int m = c.what.intervals();
  const double two_delta = 2.0 * s.delta;

  const Eigen::MatrixXd r_ut = k.uhat_t.values() - central(s.prev.uhat, s.next.uhat, s.delta);
  const Eigen::MatrixXd r_uxt =
    k.uhat_xt.values() - central(s.prev.uhat_x, s.next.uhat_x, s.delta);
  const Eigen::MatrixXd r_pt = k.phat_t.values() - central(s.prev.phat, s.next.phat, s.delta);
  const double q1_fd = (s.next.kernels.q1[m] - s.prev.kernels.q1[m]) / two_delta;
  const double q7_fd = (boundary_driver(s.next) - boundary_driver(s.prev)) / two_delta;
  return {
    {"uhat_t", profile_norm(r_ut)},
    {"uhat_xt", profile_norm(r_uxt)},
    {"phat_t", profile_norm(r_pt)},
    {"q1_t", scalar_norm(k.q1_t - q1_fd)},
    {"q7", scalar_norm(k.q7 - q7_fd)},
  };
}

ResidualSet evaluate_residuals(const Plant & plant, const SnapshotTriplet & s)
{
  ResidualSet out = residual_state_equation(plant, s);
  for (const ResidualSet & part :
    {residual_transport_systems(plant, s), residual_w_system(s), residual_utilde_system(s),
      residual_derivative_systems(s), residual_time_derivatives(s)})
  {
    out.insert(part.begin(), part.end());
  }
  return out;
}

ResidualSet aggregate_residuals(
  const Plant & plant, const std::vector<SnapshotTriplet> & triplets, double window_start,
  int * used)
{
  ResidualSet out;
  std::map<std::string, double> squares;
  int count = 0;
  for (const SnapshotTriplet & s : triplets) {
    if (s.center.t < window_start) {
      continue;
    }
    ++count;
    for (const auto & [name, r] : evaluate_residuals(plant, s)) {
      EquationResidual & agg = out[name];
      agg.max_abs = std::max(agg.max_abs, r.max_abs);
      squares[name] += r.l2 * r.l2;
    }
  }
  for (auto & [name, agg] : out) {
    agg.l2 = std::sqrt(squares[name] / count);
  }
  if (used != nullptr) {
    *used = count;
  }
  return out;
}

std::vector<LadderRung> parse_ladder(const std::string & text, int base_grid, double base_dt)
{
  std::vector<LadderRung> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    LadderRung rung;
    try {
      std::size_t used = 0;
      const std::string grid_text = item.substr(0, colon);
      rung.grid = std::stoi(grid_text, &used);
      if (used != grid_text.size()) {
        throw std::invalid_argument("trailing characters");
      }
      if (colon == std::string::npos) {
        rung.dt = base_dt * static_cast<double>(base_grid) / rung.grid;
      } else {
        const std::string dt_text = item.substr(colon + 1);
        rung.dt = std::stod(dt_text, &used);
        if (used != dt_text.size()) {
          throw std::invalid_argument("trailing characters");
        }
      }
    } catch (const std::exception &) {
      throw ConfigError("ladder entry '" + item + "' is not 'M' or 'M:dt'", "ladder");
    }
    if (rung.grid < GridProfile::kMinIntervals || !(rung.dt > 0.0)) {
      throw ConfigError("ladder entry '" + item + "' needs M >= 8 and dt > 0", "ladder");
    }
    out.push_back(rung);
  }
  return out;
}

double fitted_order(const std::vector<int> & grids, const std::vector<double> & values)
{
  const std::size_t n = grids.size();
  if (n < 2 || values.size() != n) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(static_cast<double>(grids[i]));
    const double y = std::log(std::max(values[i], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (denom == 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return -(static_cast<double>(n) * sxy - sx * sy) / denom;
}

ResidualReport convergence_study(
  const ScenarioConfig & config, const std::vector<LadderRung> & ladder,
  const StudyOptions & options)
{
  if (ladder.size() < 3) {
    throw ConfigError("a convergence study needs at least 3 ladder rungs", "ladder");
  }
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i].grid <= ladder[i - 1].grid) {
      throw ConfigError("ladder grids must increase", "ladder");
    }
  }
  if (config.effective_stride() <= 0) {
    throw ConfigError("a convergence study needs snapshots (snapshot_stride)", "snapshot_stride");
  }

  ResidualReport report;
  report.config = config;
  report.options = options;
  report.window_start = config.delay_upper + config.analysis_margin;
  report.rungs.resize(ladder.size());

  std::vector<ScenarioConfig> configs;
  for (const LadderRung & rung : ladder) {
    ScenarioConfig c = config;
    c.grid = rung.grid;
    c.dt = rung.dt;
    c.validate();
    configs.push_back(c);
  }
  const Plant plant = make_builtin_plant(config.plant, config.plant_params);

  parallel_for(ladder.size(), options.workers, [&](std::size_t i) {
      const auto start = std::chrono::steady_clock::now();
      const SimulationResult sim = run_scenario(configs[i]);
      RungResult & r = report.rungs[i];
      r.grid = ladder[i].grid;
      r.dt = ladder[i].dt;
      r.delta = configs[i].triplet_spacing * ladder[i].dt;
      r.status = sim.status;
      r.message = sim.message;
      r.max_control_residual = sim.max_control_residual;
      if (sim.status == RunStatus::kOk) {
        r.residuals = aggregate_residuals(plant, sim.triplets, report.window_start, &r.triplets);
      }
      r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

  report.complete = std::all_of(report.rungs.begin(), report.rungs.end(), [](const RungResult & r) {
      return r.status == RunStatus::kOk && r.triplets > 0;
    });
  if (!report.complete) {
    report.passed = false;
    return report;
  }

  std::vector<int> grids;
  for (const RungResult & r : report.rungs) {
    grids.push_back(r.grid);
  }
  bool all = true;
  for (const auto & [name, kind] : residual_catalog()) {
    EquationSummary e;
    e.name = name;
    e.kind = kind;
    for (const RungResult & r : report.rungs) {
      const auto it = r.residuals.find(name);
      e.max_norms.push_back(it == r.residuals.end() ? 0.0 : it->second.max_abs);
      e.l2_norms.push_back(it == r.residuals.end() ? 0.0 : it->second.l2);
    }
    e.exact = std::all_of(e.max_norms.begin(), e.max_norms.end(), [&](double v) {
        return v <= options.exact_floor;
      });
    e.order = e.exact ? std::numeric_limits<double>::quiet_NaN() : fitted_order(grids, e.max_norms);
    e.monotone = true;
    for (std::size_t i = 1; i < e.max_norms.size(); ++i) {
      e.monotone = e.monotone && e.max_norms[i] <= 1.2 * e.max_norms[i - 1];
    }
    const double finest = e.max_norms.back();
    switch (kind) {
      case ResidualKind::kInterior:
      case ResidualKind::kCrossCheck:
        e.cap = options.interior_cap;
        e.passed = e.exact || (e.order >= options.min_order && finest <= e.cap);
        break;
      case ResidualKind::kBoundaryExact:
        e.cap = options.exact_cap;
        e.passed = std::all_of(e.max_norms.begin(), e.max_norms.end(), [&](double v) {
            return v <= e.cap;
          });
        break;
      case ResidualKind::kBoundary:
        e.cap = options.boundary_cap;
        e.passed = e.exact || finest <= e.cap;
        break;
    }
    all = all && e.passed;
    report.equations.push_back(std::move(e));
  }
  report.passed = all;
  return report;
}

}  // namespace backstep
