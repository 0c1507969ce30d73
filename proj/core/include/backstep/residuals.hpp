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

#ifndef BACKSTEP__RESIDUALS_HPP_
#define BACKSTEP__RESIDUALS_HPP_

#include "backstep/closed_loop.hpp"
#include "backstep/plant_model.hpp"
#include "backstep/scenario_config.hpp"

#include <map>
#include <string>
#include <vector>

namespace backstep
{

/// Norms of one residual. For profiles `l2` is the discrete L2 norm over [0, 1]; for scalars
/// and boundary values it equals `max_abs`.
struct EquationResidual
{
  double max_abs{0.0};
  double l2{0.0};
};

using ResidualSet = std::map<std::string, EquationResidual>;

enum class ResidualKind { kInterior, kBoundaryExact, kBoundary, kCrossCheck };

std::string to_string(ResidualKind kind);

/// Name and kind of every residual, in report order.
const std::vector<std::pair<std::string, ResidualKind>> & residual_catalog();

/// State equation: central difference of X against f(X, what(0) + utilde(0) + kappa(X)).
ResidualSet residual_state_equation(const Plant & plant, const SnapshotTriplet & s);

/// Target system for what: Dhat what_t - what_x - Dhat_dot q1 + q2 f_ut, and |what(1)|.
ResidualSet residual_w_system(const SnapshotTriplet & s);

/// Estimation error: D ut_t - ut_x + Dtilde p1 + Dhat_dot p2, and |utilde(1)|.
ResidualSet residual_utilde_system(const SnapshotTriplet & s);

/// Spatial-derivative systems (interior) and their boundary conditions. The what_xx system
/// excludes the two nodes nearest each end.
ResidualSet residual_derivative_systems(const SnapshotTriplet & s);

/// D u_t - u_x, Dhat uhat_t - uhat_x - Dhat_dot (x-1) uhat_x, and the predictor equation
/// Dhat phat_t - phat_x - Phi(x,0) Dhat f_ut - Dhat_dot Dhat I(x).
ResidualSet residual_transport_systems(const Plant & plant, const SnapshotTriplet & s);

/// Analytic uhat_t, uhat_xt, phat_t, q1_t, q7 against central time differences of uhat,
/// uhat_x, phat, q1(1) and -Dhat_dot q1(1) + q2(1) f_ut.
ResidualSet residual_time_derivatives(const SnapshotTriplet & s);

/// Every residual above for one triplet.
ResidualSet evaluate_residuals(const Plant & plant, const SnapshotTriplet & s);

/// Max over triplets whose center lies in [window_start, inf) of each residual; `l2` is the
/// root-mean-square over those triplets. `used` receives the number of triplets.
ResidualSet aggregate_residuals(
  const Plant & plant, const std::vector<SnapshotTriplet> & triplets, double window_start,
  int * used = nullptr);

struct LadderRung
{
  int grid{0};
  double dt{0.0};
};

/// "M:dt,M:dt,..."; a bare M takes dt = base_dt * base_grid / M. Throws ConfigError.
std::vector<LadderRung> parse_ladder(const std::string & text, int base_grid, double base_dt);

struct StudyOptions
{
  double min_order{1.7};
  /// Finest-rung cap for interior and cross-check residuals.
  double interior_cap{1e-3};
  /// Finest-rung cap for the derivative boundary conditions.
  double boundary_cap{1e-6};
  /// Every-rung cap for the algebraic boundary identities what(1) = utilde(1) = 0.
  double exact_cap{1e-12};
  /// Every rung at or below this counts as exactly zero.
  double exact_floor{1e-13};
  /// Rungs run concurrently on up to this many threads.
  int workers{1};
};

struct RungResult
{
  int grid{0};
  double dt{0.0};
  double delta{0.0};
  RunStatus status{RunStatus::kOk};
  std::string message;
  int triplets{0};
  double wall_seconds{0.0};
  double max_control_residual{0.0};
  ResidualSet residuals;
};

struct EquationSummary
{
  std::string name;
  ResidualKind kind{ResidualKind::kInterior};
  std::vector<double> max_norms;
  std::vector<double> l2_norms;
  /// Least-squares slope of log(max norm) against log(M); NaN when exact or undefined.
  double order{0.0};
  bool exact{false};
  /// Each rung at most 1.2 times the previous one.
  bool monotone{false};
  double cap{0.0};
  bool passed{false};
};

struct ResidualReport
{
  ScenarioConfig config;
  double window_start{0.0};
  StudyOptions options;
  std::vector<RungResult> rungs;
  std::vector<EquationSummary> equations;
  /// False when some rung failed; the summary then covers nothing.
  bool complete{false};
  bool passed{false};
};

/// Least-squares slope of log(values) against log(grids).
double fitted_order(const std::vector<int> & grids, const std::vector<double> & values);

/// Runs the scenario once per rung (snapshot settings from `config`), aggregates residuals over
/// t >= delay_upper + analysis_margin and fits orders. Needs at least 3 rungs with increasing
/// grids (ConfigError otherwise). A failing rung aborts the study with a partial report.
ResidualReport convergence_study(
  const ScenarioConfig & config, const std::vector<LadderRung> & ladder,
  const StudyOptions & options = {});

}  // namespace backstep

#endif  // BACKSTEP__RESIDUALS_HPP_
