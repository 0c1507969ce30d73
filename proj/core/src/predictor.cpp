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

#include "backstep/predictor.hpp"

#include "backstep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace backstep
{
namespace
{

constexpr double kBreakTolerance = 1e-12;

double condition_number(const Matrix & m)
{
  if (m.rows() == 1) {
    return m(0, 0) == 0.0 ? INFINITY : 1.0;
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto & sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  return smallest == 0.0 ? INFINITY : sv(0) / smallest;
}

void check_inputs(const PlantModel & model, const Vector & x0, double dhat, int intervals)
{
  if (x0.size() != model.dim()) {
    throw UsageError(
      "predictor: state has dimension " + std::to_string(x0.size()) + ", plant expects " +
      std::to_string(model.dim()));
  }
  if (!(dhat > 0.0)) {
    throw UsageError("predictor: delay estimate must be positive");
  }
  if (intervals < GridProfile::kMinIntervals) {
    throw UsageError("predictor: grid needs at least 8 intervals");
  }
}

}  // namespace

TransitionField::TransitionField(std::vector<Matrix> from_origin)
: phi_(std::move(from_origin))
{
  inv_.reserve(phi_.size());
  for (std::size_t i = 0; i < phi_.size(); ++i) {
    const double cond = condition_number(phi_[i]);
    if (!(cond <= kMaxCondition)) {
      throw NumericError(
        "transition matrix at node " + std::to_string(i) + " is ill-conditioned (condition " +
        std::to_string(cond) + ")");
    }
    max_condition_ = std::max(max_condition_, cond);
    inv_.push_back(phi_[i].inverse());
  }
}

PredictorMarch march_predictor(
  const PlantModel & model, const Vector & x0, const InputSource & uhat, double dhat,
  int intervals, const std::vector<double> & breaks, bool with_transition)
{
  check_inputs(model, x0, dhat, intervals);
  const int n = model.dim();

  std::vector<double> cuts(breaks);
  std::sort(cuts.begin(), cuts.end());

  PredictorMarch out;
  out.phat = GridProfile(intervals, n);
  out.phat.set(0, x0);
  std::vector<Matrix> phis;
  if (with_transition) {
    phis.reserve(static_cast<std::size_t>(intervals) + 1);
    phis.push_back(Matrix::Identity(n, n));
  }

  Vector p = x0;
  Vector carry = Vector::Zero(n);
  Matrix phi = Matrix::Identity(n, n);

  auto step = [&](double s, double e) {
    const double hs = e - s;
    const double u1 = uhat(s, false);
    const double u2 = uhat(s + 0.5 * hs, false);
    const double u4 = uhat(e, true);

    const Vector k1 = dhat * model.f(p, u1);
    const Vector p2 = p + 0.5 * hs * k1;
    const Vector k2 = dhat * model.f(p2, u2);
    const Vector p3 = p + 0.5 * hs * k2;
    const Vector k3 = dhat * model.f(p3, u2);
    const Vector p4 = p + hs * k3;
    const Vector k4 = dhat * model.f(p4, u4);

    if (with_transition) {
      const Matrix c1 = dhat * model.df_dx(p, u1) * phi;
      const Matrix c2 = dhat * model.df_dx(p2, u2) * (phi + 0.5 * hs * c1);
      const Matrix c3 = dhat * model.df_dx(p3, u2) * (phi + 0.5 * hs * c2);
      const Matrix c4 = dhat * model.df_dx(p4, u4) * (phi + hs * c3);
      phi += (hs / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
    }
    // Compensated sum: thousands of pieces per march.
    const Vector y = (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4) - carry;
    const Vector sum = p + y;
    carry = (sum - p) - y;
    p = sum;
  };

  std::size_t next_cut = 0;
  for (int i = 0; i < intervals; ++i) {
    const double a = out.phat.node(i);
    const double b = out.phat.node(i + 1);
    double s = a;
    for (; next_cut < cuts.size() && cuts[next_cut] < b - kBreakTolerance; ++next_cut) {
      if (cuts[next_cut] > s + kBreakTolerance) {
        step(s, cuts[next_cut]);
        s = cuts[next_cut];
      }
    }
    step(s, b);
    if (!p.allFinite() || (with_transition && !phi.allFinite())) {
      throw BlowUpError("predictor escaped to a non-finite value", b);
    }
    out.phat.set(i + 1, p);
    if (with_transition) {
      phis.push_back(phi);
    }
  }
  if (with_transition) {
    out.phi = TransitionField(std::move(phis));
  }
  return out;
}

GridProfile compute_predictor(
  const PlantModel & model, const Vector & x0, const GridProfile & uhat, double dhat)
{
  const InputSource source = [&uhat](double x, bool) { return uhat.interpolate(x); };
  return march_predictor(model, x0, source, dhat, uhat.intervals()).phat;
}

GridProfile predictor_spatial_derivative(
  const PlantModel & model, const GridProfile & phat, const GridProfile & uhat, double dhat)
{
  if (phat.intervals() != uhat.intervals()) {
    throw UsageError("predictor_spatial_derivative: grid mismatch");
  }
  GridProfile out(phat.intervals(), phat.arity());
  for (int i = 0; i < phat.nodes(); ++i) {
    out.set(i, dhat * model.f(phat.at(i), uhat[i]));
  }
  return out;
}

TransitionField compute_transition_field(
  const PlantModel & model, const GridProfile & phat, const GridProfile & uhat, double dhat)
{
  if (phat.intervals() != uhat.intervals() || phat.arity() != model.dim()) {
    throw UsageError("compute_transition_field: grid or dimension mismatch");
  }
  if (!(dhat > 0.0)) {
    throw UsageError("compute_transition_field: delay estimate must be positive");
  }
  const int n = model.dim();
  const int m = phat.intervals();
  auto p_at = [&](double x) {
    Vector v(n);
    for (int c = 0; c < n; ++c) {
      v(c) = phat.interpolate(x, c);
    }
    return v;
  };
  auto a_at = [&](int i) { return model.df_dx(phat.at(i), uhat[i]); };

  std::vector<Matrix> phis;
  phis.reserve(static_cast<std::size_t>(m) + 1);
  Matrix phi = Matrix::Identity(n, n);
  phis.push_back(phi);
  const double h = phat.spacing();
  for (int i = 0; i < m; ++i) {
    const double xm = phat.node(i) + 0.5 * h;
    const Matrix a_mid = model.df_dx(p_at(xm), uhat.interpolate(xm));
    const Matrix c1 = dhat * a_at(i) * phi;
    const Matrix c2 = dhat * a_mid * (phi + 0.5 * h * c1);
    const Matrix c3 = dhat * a_mid * (phi + 0.5 * h * c2);
    const Matrix c4 = dhat * a_at(i + 1) * (phi + h * c3);
    phi += (h / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
    if (!phi.allFinite()) {
      throw BlowUpError("transition matrix escaped to a non-finite value", phat.node(i + 1));
    }
    phis.push_back(phi);
  }
  return TransitionField(std::move(phis));
}

Matrix transition_between(const TransitionField & field, int i, int j)
{
  return field.at(i) * field.inverse(j);
}

GridProfile transition_integral(const TransitionField & field, const GridProfile & h)
{
  if (field.intervals() != h.intervals() || field.dim() != h.arity()) {
    throw UsageError("transition_integral: grid or dimension mismatch");
  }
  GridProfile out(h.intervals(), h.arity());
  const double half = 0.5 * h.spacing();
  Vector acc = Vector::Zero(h.arity());
  Vector prev = field.inverse(0) * h.at(0);
  for (int i = 1; i < h.nodes(); ++i) {
    const Vector cur = field.inverse(i) * h.at(i);
    acc += half * (prev + cur);
    out.set(i, field.at(i) * acc);
    prev = cur;
  }
  return out;
}

GridProfile compute_predictor_time_derivative(
  const PlantModel & model, const Controller & controller, const GridProfile & phat,
  const GridProfile & uhat, const GridProfile & what_x, const TransitionField & phi, double dhat,
  double dhat_dot, const Vector & f_utilde)
{
  require_same_grid(uhat, what_x, "compute_predictor_time_derivative");
  const int n = phat.arity();
  GridProfile g(phat.intervals(), n);
  GridProfile h(phat.intervals(), n);
  for (int i = 0; i < phat.nodes(); ++i) {
    const Vector p = phat.at(i);
    const Vector gi = model.f(p, uhat[i]);
    const double s = what_x[i] + dhat * controller.dkappa_dx(p).dot(gi);
    g.set(i, gi);
    h.set(i, gi + (phat.node(i) - 1.0) * s * model.df_du(p, uhat[i]));
  }
  const GridProfile integral = transition_integral(phi, h);
  GridProfile out(phat.intervals(), n);
  for (int i = 0; i < phat.nodes(); ++i) {
    out.set(i, g.at(i) + phi.at(i) * f_utilde + dhat_dot * integral.at(i));
  }
  return out;
}

}  // namespace backstep
