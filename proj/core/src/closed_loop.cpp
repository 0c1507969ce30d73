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

#include "backstep/closed_loop.hpp"

#include "backstep/backstepping.hpp"
#include "backstep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>

namespace backstep
{
namespace
{

// Relative to |U|: the history feeds third x-derivatives, so solve to roundoff.
constexpr double kControlTolerance = 0.5 * std::numeric_limits<double>::epsilon();
constexpr double kControlStall = std::numeric_limits<double>::epsilon();
constexpr double kControlAccept = 1e-12;
constexpr int kControlIterations = 60;
constexpr double kJumpSnap = 1e-9;

InputSource history_source(const ControlHistory & history, double t, double dhat)
{
  return [&history, t, dhat](double x, bool left) {
      const double theta = t + dhat * (x - 1.0);
      return left ? history.sample_left(theta) : history.sample(theta);
    };
}

// Sample times of the history along the characteristic, as grid coordinates in (0, 1). The
// interpolant is one cubic between consecutive samples, so predictor steps never straddle one.
// Sample 0 doubles as the pre-history jump.
std::vector<double> history_breaks(const ControlHistory & history, double t, double dhat)
{
  const double dt = history.dt();
  const auto first = std::max<std::int64_t>(
    0, static_cast<std::int64_t>(std::ceil((t - dhat) / dt)));
  const auto last = static_cast<std::int64_t>(std::floor(t / dt));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(last - first + 1, 0)));
  for (std::int64_t k = first; k <= last; ++k) {
    const double x = 1.0 + (static_cast<double>(k) * dt - t) / dhat;
    if (x > 0.0 && x < 1.0) {
      out.push_back(x);
    }
  }
  return out;
}

struct ControlSolution
{
  double value{0.0};
  double residual{0.0};
};

// Solves U = kappa(phat(1)) for the newest history sample, which phat depends on through the
// interpolated input near x = 1. Secant iteration on r(U) = kappa(phat(1; U)) - U. On return
// the newest sample holds the accepted value.
ControlSolution solve_control(
  const Plant & plant, ControlHistory & history, double t, double dhat, const Vector & x,
  int intervals, double guess)
{
  const InputSource source = history_source(history, t, dhat);
  const std::vector<double> breaks = history_breaks(history, t, dhat);
  auto residual = [&](double u) {
      history.set_latest(u);
      const PredictorMarch march =
        march_predictor(*plant.model, x, source, dhat, intervals, breaks);
      return plant.controller->kappa(march.phat.at(intervals)) - u;
    };
  auto tolerance = [](double u) { return kControlTolerance * std::abs(u); };

  double u0 = guess;
  double r0 = residual(u0);
  if (std::abs(r0) <= tolerance(u0)) {
    return {u0, std::abs(r0)};
  }
  double u1 = u0 + r0;
  double best_u = u0;
  double best_r = r0;
  for (int it = 0; it < kControlIterations; ++it) {
    const double r1 = residual(u1);
    if (!std::isfinite(r1)) {
      throw BlowUpError("control law produced a non-finite value", t);
    }
    if (std::abs(r1) <= tolerance(u1)) {
      return {u1, std::abs(r1)};
    }
    if (std::abs(r1) < std::abs(best_r)) {
      best_u = u1;
      best_r = r1;
    }
    const double denom = r1 - r0;
    const double next = denom != 0.0 ? u1 - r1 * (u1 - u0) / denom : u1 + r1;
    if (std::abs(next - u1) <= kControlStall * std::abs(u1) || next == u1) {
      break;
    }
    u0 = u1;
    r0 = r1;
    u1 = next;
  }
  const double r = residual(best_u);
  if (std::abs(r) <= kControlAccept * std::max(1.0, std::abs(best_u))) {
    return {best_u, std::abs(r)};
  }
  throw NumericError(
    "control fixed point did not converge at t = " + std::to_string(t) + " (residual " +
    std::to_string(std::abs(r)) + ")");
}

// One RK4 step of dX/dt = f(X, U(t - D)) from t to t + dt, split where the delayed input
// switches on.
Vector plant_step(
  const PlantModel & model, const ControlHistory & history, const Vector & x, double t,
  double dt, double delay)
{
  auto sub = [&](const Vector & y, double a, double b) {
      const double h = b - a;
      const double u1 = history.sample(a - delay);
      const double u2 = history.sample(a + 0.5 * h - delay);
      const double u4 = history.sample_left(b - delay);
      const Vector k1 = model.f(y, u1);
      const Vector k2 = model.f(y + 0.5 * h * k1, u2);
      const Vector k3 = model.f(y + 0.5 * h * k2, u2);
      const Vector k4 = model.f(y + h * k3, u4);
      return Vector(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };
  const double end = t + dt;
  if (t - delay < -kJumpSnap * dt && end - delay > kJumpSnap * dt) {
    return sub(sub(x, t, delay), delay, end);
  }
  return sub(x, t, end);
}

}  // namespace

std::string to_string(RunStatus status)
{
  switch (status) {
    case RunStatus::kOk:
      return "ok";
    case RunStatus::kBlowUp:
      return "blow-up";
    case RunStatus::kNumeric:
      return "numeric";
  }
  return "ok";
}

SystemSnapshot make_snapshot(
  const Plant & plant, const ControlHistory & history, const DelaySchedule & schedule,
  double delay, long long step, double t, const Vector & state, int intervals)
{
  SystemSnapshot s;
  s.step = step;
  s.t = t;
  s.state = state;
  s.control = history.sample(t);
  s.delay = delay;
  s.dhat = schedule.at(t);
  const double dh = s.dhat.value;

  s.u = distributed_true_input(history, t, delay, intervals);
  s.uhat = distributed_estimated_input(history, t, dh, intervals);
  s.utilde = estimation_error_profile(s.u, s.uhat);
  s.u_x = spatial_derivative(s.u);
  s.uhat_x = spatial_derivative(s.uhat);
  s.utilde_x = spatial_derivative(s.utilde);
  s.utilde_xx = spatial_derivative(s.utilde, 2);

  PredictorMarch march = march_predictor(
    *plant.model, state, history_source(history, t, dh), dh, intervals, history_breaks(history, t, dh),
    true);
  s.phat = std::move(march.phat);
  s.phi = std::move(march.phi);
  s.phat_x = predictor_spatial_derivative(*plant.model, s.phat, s.uhat, dh);

  s.what = forward_transform(*plant.controller, s.uhat, s.phat);
  s.what_x = spatial_derivative(s.what);
  s.what_xx = spatial_derivative(s.what, 2);
  s.what_xxx = spatial_derivative(s.what, 3);

  KernelFields f;
  f.state = state;
  f.phat = s.phat;
  f.uhat = s.uhat;
  f.what = s.what;
  f.what_x = s.what_x;
  f.what_xx = s.what_xx;
  f.what_xxx = s.what_xxx;
  f.phi = s.phi;
  f.u0 = s.u[0];
  f.utilde_x0 = s.utilde_x[0];
  f.delay = delay;
  f.dhat = s.dhat;
  s.kernels = evaluate_kernels(*plant.model, *plant.controller, f);
  return s;
}

SimulationResult run_scenario(const ScenarioConfig & config)
{
  config.validate();
  const Plant plant = make_builtin_plant(config.plant, config.plant_params);
  const DelaySchedule schedule(config.schedule, config.bounds());
  const double dt = config.dt;
  const double delay = config.delay;
  const int m = config.grid;
  const long long n_steps = config.steps();
  const long long stride = config.effective_stride();

  ControlHistory history(dt, 2.0 * config.delay_upper + 8.0 * dt);
  SimulationResult result;
  result.trajectory.reserve(static_cast<std::size_t>(n_steps) + 1);

  Vector x = Eigen::Map<const Vector>(config.x0.data(), static_cast<Eigen::Index>(config.x0.size()));
  const long long spacing = config.triplet_spacing;
  // States at steps k - 2 * spacing .. k.
  std::deque<Vector> recent;
  double u_prev = 0.0;
  double u_prev2 = 0.0;

  auto fail = [&](RunStatus status, const std::string & message, double t, const Vector & state) {
      result.status = status;
      result.message = message;
      result.failure_time = t;
      result.failure_state = state;
    };

  for (long long k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double dh = schedule.at(t).value;
    const double guess = k >= 2 ? 2.0 * u_prev - u_prev2 : u_prev;
    history.append(guess);

    ControlSolution control;
    try {
      control = solve_control(plant, history, t, dh, x, m, guess);
    } catch (const BlowUpError & e) {
      fail(RunStatus::kBlowUp, e.what(), t, x);
      return result;
    } catch (const NumericError & e) {
      fail(RunStatus::kNumeric, e.what(), t, x);
      return result;
    }
    result.trajectory.push_back({t, x, control.value, dh});
    result.max_control_residual = std::max(result.max_control_residual, control.residual);
    recent.push_back(x);
    if (static_cast<long long>(recent.size()) > 2 * spacing + 1) {
      recent.pop_front();
    }

    const long long emit = k - spacing;
    if (stride > 0 && emit >= std::max(1LL, spacing) && emit % stride == 0) {
      try {
        SnapshotTriplet triplet;
        triplet.delta = static_cast<double>(spacing) * dt;
        auto snap = [&](long long j) {
            const auto slot = static_cast<std::size_t>(j - (k - 2 * spacing));
            return make_snapshot(
              plant, history, schedule, delay, j, static_cast<double>(j) * dt, recent[slot], m);
          };
        triplet.prev = snap(emit - spacing);
        triplet.center = snap(emit);
        triplet.next = snap(emit + spacing);
        result.triplets.push_back(std::move(triplet));
      } catch (const BlowUpError & e) {
        fail(RunStatus::kBlowUp, e.what(), t, x);
        return result;
      } catch (const NumericError & e) {
        fail(RunStatus::kNumeric, e.what(), t, x);
        return result;
      }
    }

    if (k == n_steps) {
      break;
    }
    u_prev2 = u_prev;
    u_prev = control.value;
    x = plant_step(*plant.model, history, x, t, dt, delay);
    const double t_next = static_cast<double>(k + 1) * dt;
    if (!x.allFinite()) {
      fail(RunStatus::kBlowUp, "plant state became non-finite", t_next, x);
      return result;
    }
    if (x.lpNorm<Eigen::Infinity>() > config.blowup_threshold) {
      fail(RunStatus::kBlowUp, "plant state exceeded the blow-up threshold", t_next, x);
      return result;
    }
  }
  return result;
}

}  // namespace backstep
