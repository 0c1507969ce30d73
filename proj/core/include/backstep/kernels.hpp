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

#ifndef BACKSTEP__KERNELS_HPP_
#define BACKSTEP__KERNELS_HPP_

#include "backstep/delay_schedule.hpp"
#include "backstep/grid_profile.hpp"
#include "backstep/plant_model.hpp"
#include "backstep/predictor.hpp"

namespace backstep
{

/// Distributed fields at one time instant, as needed by the kernel functions.
struct KernelFields
{
  Vector state;
  GridProfile phat;
  GridProfile uhat;
  GridProfile what;
  GridProfile what_x;
  GridProfile what_xx;
  GridProfile what_xxx;
  TransitionField phi;
  /// u(0, t) = U(t - D).
  double u0{0.0};
  /// utilde_x(0, t).
  double utilde_x0{0.0};
  /// True delay D.
  double delay{0.0};
  DelayEstimate dhat;
};

/// Kernel functions of the transformed system. Row-vector kernels (q2, q4, q6) are stored as
/// profiles of arity n, one row per node.
struct KernelSet
{
  GridProfile p1;
  GridProfile p2;
  GridProfile q1;
  GridProfile q2;

  GridProfile p3;
  GridProfile p4;
  GridProfile q3;
  GridProfile q4;
  GridProfile q5;
  GridProfile q6;

  /// f(X, u(0)) - f(X, uhat(0)).
  Vector f_utilde;
  /// df/dX(X, u(0)) - df/dX(X, uhat(0)).
  Matrix f_dp;
  /// df/du(X, u(0)) - df/du(X, uhat(0)).
  Vector f_du;

  GridProfile uhat_t;
  GridProfile uhat_xt;
  GridProfile phat_t;
  double q1_t{0.0};
  double q7{0.0};

  bool all_finite() const;
};

struct UhatTimeDerivatives
{
  GridProfile uhat_t;
  GridProfile uhat_xt;
};

/// p1, p2, q1, q2 and the scalar differences f_utilde, f_dp, f_du. Uses phat, uhat, what_x,
/// phi, state, u0, delay and dhat.
KernelSet eval_first_order_kernels(
  const PlantModel & model, const Controller & controller, const KernelFields & fields);

/// Adds p3 = d/dx p1, p4 = d/dx p2, q3 = d/dx q1, q4 = d/dx q2, q5 = d/dx q3, q6 = d/dx q4,
/// expanded analytically. Additionally uses what_xx and what_xxx.
void eval_derivative_kernels(
  const PlantModel & model, const Controller & controller, const KernelFields & fields,
  KernelSet & kernels);

/// uhat_t and uhat_xt from what_x, what_xx, phat and the delay estimate.
UhatTimeDerivatives eval_uhat_time_derivatives(
  const PlantModel & model, const Controller & controller, const KernelFields & fields);

/// d/dt q1(1, t). Needs uhat_t, uhat_xt and phat_t.
double eval_q1_t(
  const PlantModel & model, const Controller & controller, const KernelFields & fields,
  const GridProfile & uhat_t, const GridProfile & uhat_xt, const GridProfile & phat_t);

/// q7(t) = d/dt what_x(1, t). Needs the first-order kernels, phat_t, uhat_t and q1_t of
/// `kernels`.
double eval_q7(
  const PlantModel & model, const Controller & controller, const KernelFields & fields,
  const KernelSet & kernels);

/// Every kernel, time derivative and scalar above.
KernelSet evaluate_kernels(
  const PlantModel & model, const Controller & controller, const KernelFields & fields);

}  // namespace backstep

#endif  // BACKSTEP__KERNELS_HPP_
