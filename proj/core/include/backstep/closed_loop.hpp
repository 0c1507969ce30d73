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

#ifndef BACKSTEP__CLOSED_LOOP_HPP_
#define BACKSTEP__CLOSED_LOOP_HPP_

#include "backstep/actuator_history.hpp"
#include "backstep/delay_schedule.hpp"
#include "backstep/grid_profile.hpp"
#include "backstep/kernels.hpp"
#include "backstep/plant_model.hpp"
#include "backstep/predictor.hpp"
#include "backstep/scenario_config.hpp"

#include <string>
#include <vector>

namespace backstep
{

/// Every distributed field and kernel at one time instant.
struct SystemSnapshot
{
  long long step{0};
  double t{0.0};
  Vector state;
  double control{0.0};
  double delay{0.0};
  DelayEstimate dhat;

  GridProfile u;
  GridProfile uhat;
  GridProfile utilde;
  GridProfile u_x;
  GridProfile uhat_x;
  GridProfile utilde_x;
  GridProfile utilde_xx;

  GridProfile phat;
  /// Closed form Dhat f(phat, uhat).
  GridProfile phat_x;

  GridProfile what;
  GridProfile what_x;
  GridProfile what_xx;
  GridProfile what_xxx;

  TransitionField phi;
  KernelSet kernels;

  double boundary_what() const { return what.back(); }
  double boundary_utilde() const { return utilde.back(); }
};

/// Snapshots at steps k - s, k, k + s (s = triplet_spacing), spaced by delta = s * dt.
struct SnapshotTriplet
{
  SystemSnapshot prev;
  SystemSnapshot center;
  SystemSnapshot next;
  double delta{0.0};
};

struct TrajectorySample
{
  double t{0.0};
  Vector state;
  double control{0.0};
  double dhat{0.0};
};

enum class RunStatus { kOk, kBlowUp, kNumeric };

std::string to_string(RunStatus status);

struct SimulationResult
{
  RunStatus status{RunStatus::kOk};
  std::string message;
  /// Time and state where a blow-up or numeric failure was detected.
  double failure_time{0.0};
  Vector failure_state;

  std::vector<TrajectorySample> trajectory;
  std::vector<SnapshotTriplet> triplets;
  /// max_k |U(t_k) - kappa(phat(1, t_k))| over all steps.
  double max_control_residual{0.0};
};

/// Builds the full snapshot at time t from the control history (which must contain U(t)).
SystemSnapshot make_snapshot(
  const Plant & plant, const ControlHistory & history, const DelaySchedule & schedule,
  double delay, long long step, double t, const Vector & state, int intervals);

/// Simulates dX/dt = f(X, U(t - D)) under U(t) = kappa(phat(1, t)) with RK4 steps of size dt.
///
/// Blow-up (non-finite state, |X| above the threshold, predictor escape) and numeric failures
/// are reported in the result, with the trajectory up to the failure. ConfigError is thrown for
/// an invalid configuration; FutureQueryError is never expected and propagates.
SimulationResult run_scenario(const ScenarioConfig & config);

}  // namespace backstep

#endif  // BACKSTEP__CLOSED_LOOP_HPP_
