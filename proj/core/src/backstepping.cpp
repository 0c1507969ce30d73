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

#include "backstep/backstepping.hpp"

#include "backstep/errors.hpp"

#include <cmath>

namespace backstep
{

GridProfile forward_transform(
  const Controller & controller, const GridProfile & uhat, const GridProfile & phat)
{
  if (uhat.intervals() != phat.intervals()) {
    throw UsageError("forward_transform: grid mismatch");
  }
  GridProfile what(uhat.intervals());
  for (int i = 0; i < uhat.nodes(); ++i) {
    what[i] = uhat[i] - controller.kappa(phat.at(i));
  }
  return what;
}

InverseTransform inverse_transform(
  const PlantModel & model, const Controller & controller, const Vector & x0,
  const GridProfile & what, double dhat)
{
  if (x0.size() != model.dim()) {
    throw UsageError("inverse_transform: state dimension mismatch");
  }
  if (!(dhat > 0.0)) {
    throw UsageError("inverse_transform: delay estimate must be positive");
  }
  const int m = what.intervals();
  const double h = what.spacing();
  auto rhs = [&](const Vector & p, double w) -> Vector {
    return dhat * model.f(p, w + controller.kappa(p));
  };

  InverseTransform out{GridProfile(m), GridProfile(m, model.dim())};
  Vector p = x0;
  out.phat.set(0, p);
  for (int i = 0; i < m; ++i) {
    const double w_mid = what.interpolate(what.node(i) + 0.5 * h);
    const Vector k1 = rhs(p, what[i]);
    const Vector k2 = rhs(p + 0.5 * h * k1, w_mid);
    const Vector k3 = rhs(p + 0.5 * h * k2, w_mid);
    const Vector k4 = rhs(p + h * k3, what[i + 1]);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!p.allFinite()) {
      throw BlowUpError("inverse transform escaped to a non-finite value", what.node(i + 1));
    }
    out.phat.set(i + 1, p);
  }
  for (int i = 0; i <= m; ++i) {
    out.uhat[i] = what[i] + controller.kappa(out.phat.at(i));
  }
  return out;
}

double boundary_check(
  const ControlHistory & history, const Controller & controller, const GridProfile & phat,
  double t)
{
  return std::abs(history.sample(t) - controller.kappa(phat.at(phat.intervals())));
}

}  // namespace backstep
