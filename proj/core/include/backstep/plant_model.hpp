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

#ifndef BACKSTEP__PLANT_MODEL_HPP_
#define BACKSTEP__PLANT_MODEL_HPP_

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace backstep
{

using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;

/// Plant dynamics dX/dt = f(X, u) with a scalar input and the analytic derivatives the
/// transformation kernels need.
///
/// Layout conventions for an n-dimensional plant:
///   df_dx(X,u)          n x n, entry (i,j) = d f_i / d X_j
///   df_du(X,u)          n,     entry i     = d f_i / d u
///   d2f_dudx(X,u)       n x n, entry (i,j) = d^2 f_i / (d u d X_j)
///   d2f_du2(X,u)        n,     entry i     = d^2 f_i / d u^2
///   d2f_dx2(X,u,v)      n x n, entry (i,j) = sum_k d^2 f_i / (d X_j d X_k) v_k
///
/// Implementations must satisfy f(0, 0) = 0 and be pure.
class PlantModel
{
public:
  virtual ~PlantModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;

  virtual Vector f(const Vector & x, double u) const = 0;
  virtual Matrix df_dx(const Vector & x, double u) const = 0;
  virtual Vector df_du(const Vector & x, double u) const = 0;
  virtual Matrix d2f_dudx(const Vector & x, double u) const = 0;
  virtual Vector d2f_du2(const Vector & x, double u) const = 0;
  virtual Matrix d2f_dx2(const Vector & x, double u, const Vector & direction) const = 0;

  /// Declared, not verified: the open-loop plant has no finite escape time.
  virtual bool forward_complete_declared() const { return true; }
};

/// Nominal feedback u = kappa(X) with kappa(0) = 0.
///   dkappa_dx(X)        1 x n
///   d2kappa_dx2(X)      n x n (symmetric Hessian)
///   d3kappa_dx3(X,v)    n x n, entry (i,j) = sum_k d^3 kappa / (d X_i d X_j d X_k) v_k
class Controller
{
public:
  virtual ~Controller() = default;

  virtual double kappa(const Vector & x) const = 0;
  virtual RowVector dkappa_dx(const Vector & x) const = 0;
  virtual Matrix d2kappa_dx2(const Vector & x) const = 0;
  virtual Matrix d3kappa_dx3(const Vector & x, const Vector & direction) const = 0;
};

/// Exponential-stability certificate of the delay-free closed loop:
///   |X|^2 <= V(X) <= c1 |X|^2,  |dV/dX| <= c2 |X|,  dV/dX f(X, kappa(X)) <= -lambda V(X).
class LyapunovCertificate
{
public:
  LyapunovCertificate(double lambda, double c1, double c2);
  virtual ~LyapunovCertificate() = default;

  virtual double value(const Vector & x) const = 0;
  virtual RowVector gradient(const Vector & x) const = 0;

  double lambda() const noexcept { return lambda_; }
  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }

private:
  double lambda_;
  double c1_;
  double c2_;
};

/// V(X) = X^T P X.
class QuadraticCertificate final : public LyapunovCertificate
{
public:
  QuadraticCertificate(Matrix weight, double lambda, double c1, double c2);

  double value(const Vector & x) const override;
  RowVector gradient(const Vector & x) const override;

private:
  Matrix weight_;
};

struct DelayBounds
{
  double lower{0.0};
  double upper{0.0};
  double true_delay{0.0};

  /// Throws ConfigError unless 0 < lower <= true_delay <= upper.
  void validate() const;
};

/// A plant together with its nominal controller and optional certificate.
struct Plant
{
  std::shared_ptr<const PlantModel> model;
  std::shared_ptr<const Controller> controller;
  std::shared_ptr<const LyapunovCertificate> certificate;
};

using PlantParameters = std::map<std::string, double>;

/// Built-in plants, selected by name:
///   "integrator"         f = u,                 kappa = -k X         (k default 1)
///   "linear"             f = a X + b u,         kappa = -k X         (a=1, b=1, k=2)
///   "cubic"              f = -X^3 + u,          kappa = X^3 - X
///   "double_integrator"  f = A X + B u (planar), kappa = -k1 x1 - k2 x2 (k1=1, k2=2)
/// Certificates are attached where the closed loop admits the stated quadratic V.
Plant make_builtin_plant(const std::string & name, const PlantParameters & params = {});

std::vector<std::string> builtin_plant_names();

/// f(X, u) with dimension checking. Throws UsageError on mismatch and BlowUpError when the
/// result is not finite.
Vector eval_f(const PlantModel & model, const Vector & x, double u);

struct DerivativeSample
{
  Vector x;
  double u{0.0};
};

struct DerivativeCheckReport
{
  double step{0.0};
  double tolerance{0.0};
  /// Max absolute deviation from the central-difference estimate, per derivative name.
  std::map<std::string, double> max_error;
  bool passed{false};
};

/// Compares every analytic derivative of `model` and `controller` against central finite
/// differences with step h. Passes iff each deviation <= constant * h^2 * (1 + scale), where
/// scale is the magnitude of the differentiated quantity at that sample.
DerivativeCheckReport check_derivative_consistency(
  const PlantModel & model, const Controller & controller,
  const std::vector<DerivativeSample> & samples, double step = 1e-4, double constant = 10.0);

struct LyapunovCheckReport
{
  /// Worst slack of each inequality (positive = violated by that amount).
  double lower_bound_slack{0.0};
  double upper_bound_slack{0.0};
  double gradient_slack{0.0};
  double decay_slack{0.0};
  int worst_sample{-1};
  bool passed{false};
};

/// Evaluates the three certificate inequalities at every sample with 1e-12 absolute tolerance.
LyapunovCheckReport check_lyapunov(
  const LyapunovCertificate & certificate, const PlantModel & model,
  const Controller & controller, const std::vector<Vector> & samples);

}  // namespace backstep

#endif  // BACKSTEP__PLANT_MODEL_HPP_
