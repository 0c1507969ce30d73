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

#ifndef BACKSTEP__BACKSTEPPING_HPP_
#define BACKSTEP__BACKSTEPPING_HPP_

#include "backstep/actuator_history.hpp"
#include "backstep/grid_profile.hpp"
#include "backstep/plant_model.hpp"

namespace backstep
{

/// what(x_i) = uhat(x_i) - kappa(phat(x_i)).
GridProfile forward_transform(
  const Controller & controller, const GridProfile & uhat, const GridProfile & phat);

struct InverseTransform
{
  GridProfile uhat;
  GridProfile phat;
};

/// Marches dphat/dx = Dhat f(phat, what(x) + kappa(phat)), phat(0) = X, with RK4 (what between
/// nodes by cubic interpolation), then uhat = what + kappa(phat).
/// Throws BlowUpError (location = x) on a non-finite value.
InverseTransform inverse_transform(
  const PlantModel & model, const Controller & controller, const Vector & x0,
  const GridProfile & what, double dhat);

/// |U(t) - kappa(phat(1))|, the residual of the boundary condition what(1, t) = 0.
double boundary_check(
  const ControlHistory & history, const Controller & controller, const GridProfile & phat,
  double t);

}  // namespace backstep

#endif  // BACKSTEP__BACKSTEPPING_HPP_
