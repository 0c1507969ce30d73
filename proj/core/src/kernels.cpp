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

#include "backstep/errors.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace backstep
{
namespace
{

// Pointwise quantities along the grid. g = f(phat, uhat), s = uhat_x.
struct Local
{
  Vector g;
  Matrix a;
  Vector b;
  Matrix c;
  Vector e;
  RowVector k;
  Matrix hess;
  double s{0.0};
  Vector h;
};

// x-derivatives of the pointwise quantities.
struct LocalX
{
  Vector g_x;
  double s_x{0.0};
  Matrix a_x;
  Vector b_x;
  Vector g_xx;
  double s_xx{0.0};
  RowVector r;
  RowVector r_x;
  Vector h_x;
};

void check_fields(const PlantModel & model, const KernelFields & f)
{
  const int m = f.phat.intervals();
  if (f.phat.arity() != model.dim() || f.uhat.intervals() != m || f.what_x.intervals() != m) {
    throw UsageError("kernel fields: grid or dimension mismatch");
  }
  if (f.phi.empty() || f.phi.intervals() != m) {
    throw UsageError("kernel fields: transition field missing or on another grid");
  }
  if (!(f.dhat.value > 0.0)) {
    throw UsageError("kernel fields: delay estimate must be positive");
  }
}

std::vector<Local> base_terms(
  const PlantModel & model, const Controller & controller, const KernelFields & f)
{
  const double dh = f.dhat.value;
  std::vector<Local> out(static_cast<std::size_t>(f.phat.nodes()));
  for (int i = 0; i < f.phat.nodes(); ++i) {
    const Vector p = f.phat.at(i);
    const double u = f.uhat[i];
    Local & l = out[static_cast<std::size_t>(i)];
    l.g = model.f(p, u);
    l.a = model.df_dx(p, u);
    l.b = model.df_du(p, u);
    l.c = model.d2f_dudx(p, u);
    l.e = model.d2f_du2(p, u);
    l.k = controller.dkappa_dx(p);
    l.hess = controller.d2kappa_dx2(p);
    l.s = f.what_x[i] + dh * l.k.dot(l.g);
    l.h = l.g + (f.phat.node(i) - 1.0) * l.s * l.b;
  }
  return out;
}

std::vector<LocalX> spatial_terms(
  const PlantModel & model, const Controller & controller, const KernelFields & f,
  const std::vector<Local> & base)
{
  if (f.what_xx.intervals() != f.phat.intervals() ||
    f.what_xxx.intervals() != f.phat.intervals())
  {
    throw UsageError("kernel fields: what_xx / what_xxx missing or on another grid");
  }
  const double dh = f.dhat.value;
  std::vector<LocalX> out(base.size());
  for (int i = 0; i < f.phat.nodes(); ++i) {
    const Local & l = base[static_cast<std::size_t>(i)];
    LocalX & d = out[static_cast<std::size_t>(i)];
    const Vector p = f.phat.at(i);
    const double u = f.uhat[i];
    const double xm1 = f.phat.node(i) - 1.0;
    const Matrix t3 = controller.d3kappa_dx3(p, l.g);
    const RowVector g_t = l.g.transpose();

    d.g_x = dh * l.a * l.g + l.b * l.s;
    d.s_x = f.what_xx[i] + dh * dh * l.g.dot(l.hess * l.g) + dh * l.k.dot(d.g_x);
    d.a_x = dh * model.d2f_dx2(p, u, l.g) + l.c * l.s;
    d.b_x = dh * l.c * l.g + l.e * l.s;
    d.g_xx = dh * d.a_x * l.g + dh * l.a * d.g_x + d.b_x * l.s + l.b * d.s_x;
    d.s_xx = f.what_xxx[i] + 3.0 * dh * dh * d.g_x.dot(l.hess * l.g) +
      dh * dh * dh * l.g.dot(t3 * l.g) + dh * l.k.dot(d.g_xx);
    d.r = g_t * l.hess + l.k * l.a;
    d.r_x = d.g_x.transpose() * l.hess + dh * g_t * t3 + dh * g_t * l.hess * l.a + l.k * d.a_x;
    d.h_x = d.g_x + l.b * l.s + xm1 * (d.b_x * l.s + l.b * d.s_x);
  }
  return out;
}

GridProfile h_profile(const KernelFields & f, const std::vector<Local> & base)
{
  GridProfile h(f.phat.intervals(), f.phat.arity());
  for (int i = 0; i < h.nodes(); ++i) {
    h.set(i, base[static_cast<std::size_t>(i)].h);
  }
  return h;
}

void first_order(
  const PlantModel & model, const KernelFields & f, const std::vector<Local> & base,
  const GridProfile & integral, KernelSet & ks)
{
  const int m = f.phat.intervals();
  const int n = f.phat.arity();
  const double dh = f.dhat.value;
  const double ratio = f.delay / dh;
  ks.p1 = GridProfile(m);
  ks.p2 = GridProfile(m);
  ks.q1 = GridProfile(m);
  ks.q2 = GridProfile(m, n);
  for (int i = 0; i <= m; ++i) {
    const Local & l = base[static_cast<std::size_t>(i)];
    const double xm1 = f.phat.node(i) - 1.0;
    ks.p1[i] = l.s / dh;
    ks.p2[i] = ratio * xm1 * l.s;
    ks.q1[i] = xm1 * l.s - dh * l.k.dot(integral.at(i));
    ks.q2.values().row(i) = dh * l.k * f.phi.at(i);
  }
  const double uhat0 = f.uhat[0];
  ks.f_utilde = model.f(f.state, f.u0) - model.f(f.state, uhat0);
  ks.f_dp = model.df_dx(f.state, f.u0) - model.df_dx(f.state, uhat0);
  ks.f_du = model.df_du(f.state, f.u0) - model.df_du(f.state, uhat0);
}

void derivative_kernels(
  const KernelFields & f, const std::vector<Local> & base, const std::vector<LocalX> & dx,
  const GridProfile & integral, KernelSet & ks)
{
  const int m = f.phat.intervals();
  const int n = f.phat.arity();
  const double dh = f.dhat.value;
  const double dh2 = dh * dh;
  const double ratio = f.delay / dh;
  ks.p3 = GridProfile(m);
  ks.p4 = GridProfile(m);
  ks.q3 = GridProfile(m);
  ks.q4 = GridProfile(m, n);
  ks.q5 = GridProfile(m);
  ks.q6 = GridProfile(m, n);
  for (int i = 0; i <= m; ++i) {
    const Local & l = base[static_cast<std::size_t>(i)];
    const LocalX & d = dx[static_cast<std::size_t>(i)];
    const double xm1 = f.phat.node(i) - 1.0;
    const Vector in = integral.at(i);
    const Matrix & phi = f.phi.at(i);

    ks.p3[i] = d.s_x / dh;
    ks.p4[i] = ratio * (l.s + xm1 * d.s_x);
    ks.q3[i] = l.s + xm1 * d.s_x - dh * l.k.dot(l.h) - dh2 * d.r.dot(in);
    ks.q4.values().row(i) = dh2 * d.r * phi;
    ks.q5[i] = 2.0 * d.s_x + xm1 * d.s_xx -
      dh * (dh * l.g.dot(l.hess * l.h) + l.k.dot(d.h_x)) -
      dh2 * (d.r_x.dot(in) + d.r.dot(l.h + dh * l.a * in));
    ks.q6.values().row(i) = dh2 * (d.r_x * phi + dh * d.r * l.a * phi);
  }
}

UhatTimeDerivatives uhat_time(
  const KernelFields & f, const std::vector<Local> & base, const std::vector<LocalX> & dx)
{
  const int m = f.phat.intervals();
  const double dh = f.dhat.value;
  const double rate = f.dhat.rate;
  UhatTimeDerivatives out{GridProfile(m), GridProfile(m)};
  for (int i = 0; i <= m; ++i) {
    const double s = base[static_cast<std::size_t>(i)].s;
    const double s_x = dx[static_cast<std::size_t>(i)].s_x;
    const double stretch = 1.0 + rate * (f.phat.node(i) - 1.0);
    out.uhat_t[i] = stretch * s / dh;
    out.uhat_xt[i] = (rate * s + stretch * s_x) / dh;
  }
  return out;
}

// G = Dhat_dot df/dX + Dhat d/dt df/dX along the grid.
std::vector<Matrix> generator_rate(
  const PlantModel & model, const KernelFields & f, const std::vector<Local> & base,
  const GridProfile & uhat_t, const GridProfile & phat_t)
{
  std::vector<Matrix> out(base.size());
  for (int i = 0; i < f.phat.nodes(); ++i) {
    const Local & l = base[static_cast<std::size_t>(i)];
    const Vector pt = phat_t.at(i);
    const Matrix a_t = model.d2f_dx2(f.phat.at(i), f.uhat[i], pt) + l.c * uhat_t[i];
    out[static_cast<std::size_t>(i)] = f.dhat.rate * l.a + f.dhat.value * a_t;
  }
  return out;
}

double q1_time_derivative(
  const KernelFields & f, const std::vector<Local> & base, const GridProfile & integral,
  const std::vector<Matrix> & gen, const GridProfile & uhat_t, const GridProfile & uhat_xt,
  const GridProfile & phat_t)
{
  const int m = f.phat.intervals();
  const int n = f.phat.arity();
  GridProfile h_t(m, n);
  GridProfile gi(m, n);
  for (int i = 0; i <= m; ++i) {
    const Local & l = base[static_cast<std::size_t>(i)];
    const Vector pt = phat_t.at(i);
    const Vector b_t = l.c * pt + l.e * uhat_t[i];
    const double xm1 = f.phat.node(i) - 1.0;
    h_t.set(i, l.a * pt + l.b * uhat_t[i] + xm1 * (b_t * l.s + l.b * uhat_xt[i]));
    gi.set(i, gen[static_cast<std::size_t>(i)] * integral.at(i));
  }
  const Vector j1 = transition_integral(f.phi, h_t).at(m);
  const Vector j2 = transition_integral(f.phi, gi).at(m);

  const Local & end = base[static_cast<std::size_t>(m)];
  const Vector i1 = integral.at(m);
  const double dh = f.dhat.value;
  return -f.dhat.rate * end.k.dot(i1) - dh * (end.hess * phat_t.at(m)).dot(i1) -
    dh * end.k.dot(j1 + j2);
}

// d/dt Phi(1, 0) = int_0^1 Phi(1, z) G(z) Phi(z, 0) dz, trapezoid rule.
Matrix transition_rate_end(const KernelFields & f, const std::vector<Matrix> & gen)
{
  const int m = f.phat.intervals();
  Matrix acc = Matrix::Zero(f.phat.arity(), f.phat.arity());
  for (int i = 0; i <= m; ++i) {
    const double w = (i == 0 || i == m) ? 0.5 : 1.0;
    acc += w * f.phi.inverse(i) * gen[static_cast<std::size_t>(i)] * f.phi.at(i);
  }
  return f.phi.at(m) * (acc * f.phat.spacing());
}

double q7_value(
  const PlantModel & model, const KernelFields & f, const std::vector<Local> & base,
  const std::vector<Matrix> & gen, const KernelSet & ks)
{
  const int m = f.phat.intervals();
  const double dh = f.dhat.value;
  const double rate = f.dhat.rate;
  const Local & end = base[static_cast<std::size_t>(m)];
  const Matrix & phi1 = f.phi.at(m);
  const Matrix phi1_t = transition_rate_end(f, gen);

  const RowVector q2_t = rate * end.k * phi1 +
    dh * (end.hess * ks.phat_t.at(m)).transpose() * phi1 + dh * end.k * phi1_t;

  const double dtilde = f.delay - dh;
  const double uhat0 = f.uhat[0];
  const Vector xdot = model.f(f.state, f.u0);
  const double u_t0 = (f.utilde_x0 + base[0].s) / f.delay;
  const double utilde_t0 = (f.utilde_x0 - dtilde * ks.p1[0] - rate * ks.p2[0]) / f.delay;
  const Vector f_utilde_t =
    ks.f_dp * xdot + ks.f_du * u_t0 + model.df_du(f.state, uhat0) * utilde_t0;

  return -f.dhat.accel * ks.q1[m] - rate * ks.q1_t + q2_t.dot(ks.f_utilde) +
    ks.q2.values().row(m).dot(f_utilde_t);
}

}  // namespace

bool KernelSet::all_finite() const
{
  for (const GridProfile * p :
    {&p1, &p2, &q1, &q2, &p3, &p4, &q3, &q4, &q5, &q6, &uhat_t, &uhat_xt, &phat_t})
  {
    if (!p->empty() && !p->all_finite()) {
      return false;
    }
  }
  return f_utilde.allFinite() && f_dp.allFinite() && f_du.allFinite() &&
         std::isfinite(q1_t) && std::isfinite(q7);
}

KernelSet eval_first_order_kernels(
  const PlantModel & model, const Controller & controller, const KernelFields & fields)
{
  check_fields(model, fields);
  const auto base = base_terms(model, controller, fields);
  const GridProfile integral = transition_integral(fields.phi, h_profile(fields, base));
  KernelSet ks;
  first_order(model, fields, base, integral, ks);
  return ks;
}

void eval_derivative_kernels(
  const PlantModel & model, const Controller & controller, const KernelFields & fields,
  KernelSet & kernels)
{
  check_fields(model, fields);
  const auto base = base_terms(model, controller, fields);
  const auto dx = spatial_terms(model, controller, fields, base);
  const GridProfile integral = transition_integral(fields.phi, h_profile(fields, base));
  derivative_kernels(fields, base, dx, integral, kernels);
}

UhatTimeDerivatives eval_uhat_time_derivatives(
  const PlantModel & model, const Controller & controller, const KernelFields & fields)
{
  check_fields(model, fields);
  const auto base = base_terms(model, controller, fields);
  const auto dx = spatial_terms(model, controller, fields, base);
  return uhat_time(fields, base, dx);
}

double eval_q1_t(
  const PlantModel & model, const Controller & controller, const KernelFields & fields,
  const GridProfile & uhat_t, const GridProfile & uhat_xt, const GridProfile & phat_t)
{
  check_fields(model, fields);
  const auto base = base_terms(model, controller, fields);
  const GridProfile integral = transition_integral(fields.phi, h_profile(fields, base));
  const auto gen = generator_rate(model, fields, base, uhat_t, phat_t);
  return q1_time_derivative(fields, base, integral, gen, uhat_t, uhat_xt, phat_t);
}

double eval_q7(
  const PlantModel & model, const Controller & controller, const KernelFields & fields,
  const KernelSet & kernels)
{
  check_fields(model, fields);
  if (kernels.phat_t.empty() || kernels.uhat_t.empty() || kernels.q1.empty()) {
    throw UsageError("eval_q7: first-order kernels and time derivatives required");
  }
  const auto base = base_terms(model, controller, fields);
  const auto gen = generator_rate(model, fields, base, kernels.uhat_t, kernels.phat_t);
  return q7_value(model, fields, base, gen, kernels);
}

KernelSet evaluate_kernels(
  const PlantModel & model, const Controller & controller, const KernelFields & fields)
{
  check_fields(model, fields);
  const auto base = base_terms(model, controller, fields);
  const auto dx = spatial_terms(model, controller, fields, base);
  const GridProfile integral = transition_integral(fields.phi, h_profile(fields, base));

  KernelSet ks;
  first_order(model, fields, base, integral, ks);
  derivative_kernels(fields, base, dx, integral, ks);

  UhatTimeDerivatives ut = uhat_time(fields, base, dx);
  ks.uhat_t = std::move(ut.uhat_t);
  ks.uhat_xt = std::move(ut.uhat_xt);
  ks.phat_t = compute_predictor_time_derivative(
    model, controller, fields.phat, fields.uhat, fields.what_x, fields.phi, fields.dhat.value,
    fields.dhat.rate, ks.f_utilde);

  const auto gen = generator_rate(model, fields, base, ks.uhat_t, ks.phat_t);
  ks.q1_t = q1_time_derivative(fields, base, integral, gen, ks.uhat_t, ks.uhat_xt, ks.phat_t);
  ks.q7 = q7_value(model, fields, base, gen, ks);
  return ks;
}

}  // namespace backstep
