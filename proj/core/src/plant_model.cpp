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

#include "backstep/plant_model.hpp"

#include "backstep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace backstep
{

LyapunovCertificate::LyapunovCertificate(double lambda, double c1, double c2)
: lambda_(lambda), c1_(c1), c2_(c2)
{
  if (!(lambda > 0.0) || !(c1 > 0.0) || !(c2 > 0.0)) {
    throw UsageError("Lyapunov certificate constants must be positive");
  }
}

QuadraticCertificate::QuadraticCertificate(Matrix weight, double lambda, double c1, double c2)
: LyapunovCertificate(lambda, c1, c2), weight_(std::move(weight))
{
  if (weight_.rows() != weight_.cols()) {
    throw UsageError("quadratic certificate weight must be square");
  }
}

double QuadraticCertificate::value(const Vector & x) const
{
  return x.dot(weight_ * x);
}

RowVector QuadraticCertificate::gradient(const Vector & x) const
{
  return ((weight_ + weight_.transpose()) * x).transpose();
}

void DelayBounds::validate() const
{
  if (!(lower > 0.0)) {
    throw ConfigError("delay lower bound must be positive", "delay_lower");
  }
  if (!(upper >= lower)) {
    throw ConfigError("delay upper bound must not be below the lower bound", "delay_upper");
  }
  if (!(true_delay >= lower && true_delay <= upper)) {
    throw ConfigError("true delay must lie within [delay_lower, delay_upper]", "delay");
  }
}

Vector eval_f(const PlantModel & model, const Vector & x, double u)
{
  if (x.size() != model.dim()) {
    throw UsageError(
      "state has dimension " + std::to_string(x.size()) + ", plant '" + model.name() +
      "' expects " + std::to_string(model.dim()));
  }
  Vector out = model.f(x, u);
  if (!out.allFinite()) {
    throw BlowUpError("plant vector field is not finite", 0.0);
  }
  return out;
}

namespace
{

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct ErrorTracker
{
  double step;
  double constant;
  bool passed{true};
  std::map<std::string, double> max_error;

  // Central differences carry h^2 truncation and eps * |F| / h cancellation error.
  void record(const std::string & name, double analytic, double numeric, double scale)
  {
    const double err = std::abs(analytic - numeric);
    double & slot = max_error[name];
    slot = std::max(slot, err);
    const double tol = constant * step * step + 64.0 * kEps * (1.0 + scale) / step;
    if (!(err <= tol)) {
      passed = false;
    }
  }
};

}  // namespace

DerivativeCheckReport check_derivative_consistency(
  const PlantModel & model, const Controller & controller,
  const std::vector<DerivativeSample> & samples, double step, double constant)
{
  ErrorTracker tracker{step, constant, true, {}};
  const int n = model.dim();
  const double h = step;

  for (const auto & s : samples) {
    const Vector & x = s.x;
    const double u = s.u;

    const Matrix a = model.df_dx(x, u);
    const Vector b = model.df_du(x, u);
    const Matrix c = model.d2f_dudx(x, u);
    const Vector e = model.d2f_du2(x, u);
    const RowVector k = controller.dkappa_dx(x);
    const Matrix hk = controller.d2kappa_dx2(x);

    {
      const Vector fp = model.f(x, u + h);
      const Vector fm = model.f(x, u - h);
      const Vector bp = model.df_du(x, u + h);
      const Vector bm = model.df_du(x, u - h);
      const double fscale = std::max(fp.cwiseAbs().maxCoeff(), fm.cwiseAbs().maxCoeff());
      const double bscale = std::max(bp.cwiseAbs().maxCoeff(), bm.cwiseAbs().maxCoeff());
      for (int i = 0; i < n; ++i) {
        tracker.record("df_du", b(i), (fp(i) - fm(i)) / (2 * h), fscale);
        tracker.record("d2f_du2", e(i), (bp(i) - bm(i)) / (2 * h), bscale);
      }
    }

    for (int j = 0; j < n; ++j) {
      Vector xp = x;
      Vector xm = x;
      xp(j) += h;
      xm(j) -= h;

      const Vector fp = model.f(xp, u);
      const Vector fm = model.f(xm, u);
      const Vector bp = model.df_du(xp, u);
      const Vector bm = model.df_du(xm, u);
      const Matrix ap = model.df_dx(xp, u);
      const Matrix am = model.df_dx(xm, u);
      const double fscale = std::max(fp.cwiseAbs().maxCoeff(), fm.cwiseAbs().maxCoeff());
      const double bscale = std::max(bp.cwiseAbs().maxCoeff(), bm.cwiseAbs().maxCoeff());
      const double ascale = std::max(ap.cwiseAbs().maxCoeff(), am.cwiseAbs().maxCoeff());

      Vector unit = Vector::Zero(n);
      unit(j) = 1.0;
      const Matrix a2 = model.d2f_dx2(x, u, unit);
      for (int i = 0; i < n; ++i) {
        tracker.record("df_dx", a(i, j), (fp(i) - fm(i)) / (2 * h), fscale);
        tracker.record("d2f_dudx", c(i, j), (bp(i) - bm(i)) / (2 * h), bscale);
        for (int m = 0; m < n; ++m) {
          tracker.record("d2f_dx2", a2(i, m), (ap(i, m) - am(i, m)) / (2 * h), ascale);
        }
      }

      const double kp = controller.kappa(xp);
      const double km = controller.kappa(xm);
      tracker.record(
        "dkappa_dx", k(j), (kp - km) / (2 * h), std::max(std::abs(kp), std::abs(km)));

      const RowVector gp = controller.dkappa_dx(xp);
      const RowVector gm = controller.dkappa_dx(xm);
      const Matrix hp = controller.d2kappa_dx2(xp);
      const Matrix hm = controller.d2kappa_dx2(xm);
      const Matrix h3 = controller.d3kappa_dx3(x, unit);
      const double gscale = std::max(gp.cwiseAbs().maxCoeff(), gm.cwiseAbs().maxCoeff());
      const double hscale = std::max(hp.cwiseAbs().maxCoeff(), hm.cwiseAbs().maxCoeff());
      for (int i = 0; i < n; ++i) {
        tracker.record("d2kappa_dx2", hk(i, j), (gp(i) - gm(i)) / (2 * h), gscale);
        for (int m = 0; m < n; ++m) {
          tracker.record("d3kappa_dx3", h3(i, m), (hp(i, m) - hm(i, m)) / (2 * h), hscale);
        }
      }
    }
  }

  DerivativeCheckReport report;
  report.step = step;
  report.tolerance = constant * step * step;
  report.max_error = std::move(tracker.max_error);
  report.passed = tracker.passed;
  return report;
}

LyapunovCheckReport check_lyapunov(
  const LyapunovCertificate & certificate, const PlantModel & model,
  const Controller & controller, const std::vector<Vector> & samples)
{
  constexpr double kTol = 1e-12;
  LyapunovCheckReport report;
  report.lower_bound_slack = -std::numeric_limits<double>::infinity();
  report.upper_bound_slack = -std::numeric_limits<double>::infinity();
  report.gradient_slack = -std::numeric_limits<double>::infinity();
  report.decay_slack = -std::numeric_limits<double>::infinity();
  report.passed = true;

  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vector & x = samples[i];
    const double norm2 = x.squaredNorm();
    const double v = certificate.value(x);
    const RowVector dv = certificate.gradient(x);
    const double vdot = (dv * model.f(x, controller.kappa(x))).value();

    const double lower = norm2 - v;
    const double upper = v - certificate.c1() * norm2;
    const double grad = dv.norm() - certificate.c2() * std::sqrt(norm2);
    const double decay = vdot + certificate.lambda() * v;

    report.lower_bound_slack = std::max(report.lower_bound_slack, lower);
    report.upper_bound_slack = std::max(report.upper_bound_slack, upper);
    report.gradient_slack = std::max(report.gradient_slack, grad);
    report.decay_slack = std::max(report.decay_slack, decay);

    const double sample_worst = std::max({lower, upper, grad, decay});
    if (sample_worst > worst) {
      worst = sample_worst;
      report.worst_sample = static_cast<int>(i);
    }
    if (sample_worst > kTol) {
      report.passed = false;
    }
  }
  return report;
}

}  // namespace backstep
