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

#include "backstep/kernels.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

namespace backstep
{
namespace
{

using testing::fields_from_input;
using testing::max_abs_diff;

Vector state_for(const Plant & p)
{
  Vector x(p.model->dim());
  for (int c = 0; c < x.size(); ++c) {
    x(c) = 0.7 - 0.4 * c;
  }
  return x;
}

GridProfile smooth_input(int m)
{
  return GridProfile::from_function(m, [](double x) { return 0.4 * std::sin(2.0 * x + 0.3) - 0.2; });
}

KernelFields generic_fields(const Plant & p, int m)
{
  return fields_from_input(p, state_for(p), smooth_input(m), 0.62, {0.5, 0.08, -0.05}, 0.1, -0.3);
}

TEST(Kernels, EquilibriumKernelsVanish)
{
  for (const std::string & name : builtin_plant_names()) {
    const Plant p = make_builtin_plant(name);
    const KernelFields f = fields_from_input(
      p, Vector::Zero(p.model->dim()), GridProfile(20), 0.5, {0.45, 0.1, 0.02}, 0.0, 0.0);
    const KernelSet k = evaluate_kernels(*p.model, *p.controller, f);
    for (const GridProfile * g :
      {&k.p1, &k.p2, &k.q1, &k.p3, &k.p4, &k.q3, &k.q5, &k.uhat_t, &k.uhat_xt, &k.phat_t})
    {
      EXPECT_EQ(g->max_abs(), 0.0) << name;
    }
    // q2, q4 and q6 are gains on f_utilde and stay nonzero at rest.
    EXPECT_GT(k.q2.max_abs(), 0.0) << name;
    EXPECT_EQ(k.f_utilde.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(k.q1_t, 0.0);
    EXPECT_EQ(k.q7, 0.0);
  }
}

TEST(Kernels, LinearPlantClosedForms)
{
  const double a = 0.8;
  const double kgain = 1.7;
  const double dh = 0.55;
  const Plant p = make_builtin_plant("linear", {{"a", a}, {"b", 1.3}, {"k", kgain}});
  const KernelFields f =
    fields_from_input(p, Vector::Constant(1, 0.6), smooth_input(100), 0.5, {dh, 0.0, 0.0}, 0.2, 0.0);
  KernelSet k = eval_first_order_kernels(*p.model, *p.controller, f);
  eval_derivative_kernels(*p.model, *p.controller, f, k);
  for (int i = 0; i <= 100; ++i) {
    const double phi = std::exp(a * dh * k.q2.node(i));
    EXPECT_NEAR(k.q2(i, 0), -kgain * dh * phi, 1e-8);
    EXPECT_NEAR(k.q4(i, 0), -kgain * dh * dh * a * phi, 1e-8);
  }
}

TEST(Kernels, MatchedInputGivesZeroDifferences)
{
  for (const std::string & name : builtin_plant_names()) {
    const Plant p = make_builtin_plant(name);
    KernelFields f = generic_fields(p, 30);
    f.u0 = f.uhat[0];
    const KernelSet k = eval_first_order_kernels(*p.model, *p.controller, f);
    EXPECT_EQ(k.f_utilde.cwiseAbs().maxCoeff(), 0.0) << name;
    EXPECT_EQ(k.f_dp.cwiseAbs().maxCoeff(), 0.0) << name;
    EXPECT_EQ(k.f_du.cwiseAbs().maxCoeff(), 0.0) << name;
  }
}

// s = what_x + Dhat dkappa f(phat, uhat); p1 = s / Dhat, p2 = (D / Dhat)(x - 1) s.
TEST(Kernels, InputKernelsFromTransportSpeed)
{
  for (const std::string & name : builtin_plant_names()) {
    const Plant p = make_builtin_plant(name);
    const KernelFields f = generic_fields(p, 40);
    const KernelSet k = eval_first_order_kernels(*p.model, *p.controller, f);
    const double dh = f.dhat.value;
    for (int i = 0; i <= 40; ++i) {
      const Vector ph = f.phat.at(i);
      const double s =
        f.what_x[i] + dh * p.controller->dkappa_dx(ph).dot(p.model->f(ph, f.uhat[i]));
      EXPECT_NEAR(k.p1[i], s / dh, 1e-12) << name;
      EXPECT_NEAR(k.p2[i], (f.delay / dh) * (k.p2.node(i) - 1.0) * s, 1e-12) << name;
    }
  }
}

TEST(Kernels, DerivativePairsAgreeWithGridDerivatives)
{
  const int m = 200;
  const double tol = 50.0 / (m * m);
  for (const char * name : {"linear", "cubic", "double_integrator"}) {
    const Plant p = make_builtin_plant(name);
    const KernelFields f = generic_fields(p, m);
    KernelSet k = eval_first_order_kernels(*p.model, *p.controller, f);
    eval_derivative_kernels(*p.model, *p.controller, f, k);
    EXPECT_LE(max_abs_diff(spatial_derivative(k.p1), k.p3), tol) << name << " p3";
    EXPECT_LE(max_abs_diff(spatial_derivative(k.p2), k.p4), tol) << name << " p4";
    EXPECT_LE(max_abs_diff(spatial_derivative(k.q1), k.q3), tol) << name << " q3";
    EXPECT_LE(max_abs_diff(spatial_derivative(k.q2), k.q4), tol) << name << " q4";
    EXPECT_LE(max_abs_diff(spatial_derivative(k.q3), k.q5), tol) << name << " q5";
    EXPECT_LE(max_abs_diff(spatial_derivative(k.q4), k.q6), tol) << name << " q6";
  }
}

TEST(Kernels, MixedPartialSymmetry)
{
  const Plant p = make_builtin_plant("cubic");
  std::vector<double> hs;
  std::vector<double> err;
  for (const int m : {40, 80, 160}) {
    const KernelFields f = generic_fields(p, m);
    const UhatTimeDerivatives d = eval_uhat_time_derivatives(*p.model, *p.controller, f);
    hs.push_back(1.0 / m);
    err.push_back(max_abs_diff(spatial_derivative(d.uhat_t), d.uhat_xt));
  }
  EXPECT_GE(testing::convergence_order(hs, err), 1.8);
}

TEST(Kernels, UhatTimeDerivativeWithoutRate)
{
  const Plant p = make_builtin_plant("linear");
  KernelFields f = generic_fields(p, 50);
  f.dhat.rate = 0.0;
  const UhatTimeDerivatives d = eval_uhat_time_derivatives(*p.model, *p.controller, f);
  for (int i = 0; i <= 50; ++i) {
    const Vector ph = f.phat.at(i);
    const double ux = f.what_x[i] +
      p.controller->dkappa_dx(ph).dot(predictor_spatial_derivative(*p.model, f.phat, f.uhat,
      f.dhat.value).at(i));
    EXPECT_NEAR(d.uhat_t[i], ux / f.dhat.value, 1e-12);
  }
}

TEST(Kernels, BoundaryRateVanishesForExactConstantDelay)
{
  for (const std::string & name : builtin_plant_names()) {
    const Plant p = make_builtin_plant(name);
    KernelFields f = generic_fields(p, 40);
    f.delay = f.dhat.value;
    f.dhat.rate = 0.0;
    f.dhat.accel = 0.0;
    f.u0 = f.uhat[0];
    f.utilde_x0 = 0.0;
    const KernelSet k = evaluate_kernels(*p.model, *p.controller, f);
    EXPECT_NEAR(k.q7, 0.0, 1e-14) << name;
  }
}

// f = u, kappa = -k X: Phi = I and the Hessian vanishes, so
// q1_t = k Dhat_dot I(1) + k Dhat int_0^1 (uhat_t + (y - 1) uhat_xt) dy with
// I(1) = int_0^1 (uhat + (y - 1) s) dy and s = what_x - Dhat k uhat.
TEST(Kernels, IntegratorQ1TimeDerivativeHandReduction)
{
  const double kgain = 1.4;
  const Plant p = make_builtin_plant("integrator", {{"k", kgain}});
  const int m = 64;
  const KernelFields f = fields_from_input(
    p, Vector::Constant(1, 0.3), smooth_input(m), 0.6, {0.5, 0.11, 0.0}, 0.0, 0.0);
  const GridProfile ut = GridProfile::from_function(m, [](double x) { return std::cos(x); });
  const GridProfile uxt = GridProfile::from_function(m, [](double x) { return x * x - 0.5; });
  const GridProfile pt = GridProfile::from_function(m, [](double x) { return 3.0 * x; });
  const double got = eval_q1_t(*p.model, *p.controller, f, ut, uxt, pt);

  auto trapezoid = [m](const std::function<double(int)> & g) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        acc += 0.5 * (g(i) + g(i + 1)) / m;
      }
      return acc;
    };
  const double dh = f.dhat.value;
  const double i1 = trapezoid([&](int i) {
      const double s = f.what_x[i] - dh * kgain * f.uhat[i];
      return f.uhat[i] + (f.uhat.node(i) - 1.0) * s;
    });
  const double j1 = trapezoid([&](int i) { return ut[i] + (ut.node(i) - 1.0) * uxt[i]; });
  EXPECT_NEAR(got, kgain * f.dhat.rate * i1 + kgain * dh * j1, 1e-12);
}

TEST(Kernels, GenericKernelsAreFinite)
{
  for (const std::string & name : builtin_plant_names()) {
    const Plant p = make_builtin_plant(name);
    EXPECT_TRUE(evaluate_kernels(*p.model, *p.controller, generic_fields(p, 24)).all_finite());
  }
}

}  // namespace
}  // namespace backstep
