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

#include "backstep/errors.hpp"
#include "backstep/plant_model.hpp"

#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace backstep
{
namespace
{

double param(const PlantParameters & params, const std::string & key, double fallback)
{
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown(
  const std::string & plant, const PlantParameters & params, const std::set<std::string> & known)
{
  for (const auto & [key, value] : params) {
    (void)value;
    if (known.count(key) == 0) {
      throw ConfigError("plant '" + plant + "' has no parameter '" + key + "'", "plant." + key);
    }
  }
}

// f = A x + B u on R^n.
class LinearPlant final : public PlantModel
{
public:
  LinearPlant(std::string name, Matrix a, Vector b)
  : name_(std::move(name)), a_(std::move(a)), b_(std::move(b)) {}

  std::string name() const override { return name_; }
  int dim() const override { return static_cast<int>(b_.size()); }

  Vector f(const Vector & x, double u) const override { return a_ * x + b_ * u; }
  Matrix df_dx(const Vector &, double) const override { return a_; }
  Vector df_du(const Vector &, double) const override { return b_; }
  Matrix d2f_dudx(const Vector &, double) const override { return Matrix::Zero(dim(), dim()); }
  Vector d2f_du2(const Vector &, double) const override { return Vector::Zero(dim()); }
  Matrix d2f_dx2(const Vector &, double, const Vector &) const override
  {
    return Matrix::Zero(dim(), dim());
  }

private:
  std::string name_;
  Matrix a_;
  Vector b_;
};

// u = -K x.
class LinearController final : public Controller
{
public:
  explicit LinearController(RowVector gain) : gain_(std::move(gain)) {}

  double kappa(const Vector & x) const override { return -(gain_ * x).value(); }
  RowVector dkappa_dx(const Vector &) const override { return -gain_; }
  Matrix d2kappa_dx2(const Vector &) const override
  {
    return Matrix::Zero(gain_.size(), gain_.size());
  }
  Matrix d3kappa_dx3(const Vector &, const Vector &) const override
  {
    return Matrix::Zero(gain_.size(), gain_.size());
  }

private:
  RowVector gain_;
};

// f = -x^3 + u. The cubic damping dominates any bounded input, so there is no escape.
class CubicPlant final : public PlantModel
{
public:
  std::string name() const override { return "cubic"; }
  int dim() const override { return 1; }

  Vector f(const Vector & x, double u) const override
  {
    Vector out(1);
    out(0) = -x(0) * x(0) * x(0) + u;
    return out;
  }
  Matrix df_dx(const Vector & x, double) const override
  {
    return Matrix::Constant(1, 1, -3.0 * x(0) * x(0));
  }
  Vector df_du(const Vector &, double) const override { return Vector::Ones(1); }
  Matrix d2f_dudx(const Vector &, double) const override { return Matrix::Zero(1, 1); }
  Vector d2f_du2(const Vector &, double) const override { return Vector::Zero(1); }
  Matrix d2f_dx2(const Vector & x, double, const Vector & v) const override
  {
    return Matrix::Constant(1, 1, -6.0 * x(0) * v(0));
  }
};

// kappa = x^3 - x cancels the cubic term: closed loop dx/dt = -x.
class CubicController final : public Controller
{
public:
  double kappa(const Vector & x) const override { return x(0) * x(0) * x(0) - x(0); }
  RowVector dkappa_dx(const Vector & x) const override
  {
    return RowVector::Constant(1, 3.0 * x(0) * x(0) - 1.0);
  }
  Matrix d2kappa_dx2(const Vector & x) const override
  {
    return Matrix::Constant(1, 1, 6.0 * x(0));
  }
  Matrix d3kappa_dx3(const Vector &, const Vector & v) const override
  {
    return Matrix::Constant(1, 1, 6.0 * v(0));
  }
};

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Plant make_integrator(const PlantParameters & params)
{
  reject_unknown("integrator", params, {"k"});
  const double k = param(params, "k", 1.0);
  if (!(k > 0.0)) {
    throw ConfigError("integrator gain k must be positive", "plant.k");
  }
  Plant p;
  p.model = std::make_shared<LinearPlant>("integrator", scalar(0.0), Vector::Ones(1));
  p.controller = std::make_shared<LinearController>(RowVector::Constant(1, k));
  // V = x^2, dV/dt = -2k x^2.
  p.certificate = std::make_shared<QuadraticCertificate>(scalar(1.0), 2.0 * k, 1.0, 2.0);
  return p;
}

Plant make_linear(const PlantParameters & params)
{
  reject_unknown("linear", params, {"a", "b", "k"});
  const double a = param(params, "a", 1.0);
  const double b = param(params, "b", 1.0);
  const double k = param(params, "k", 2.0);
  Plant p;
  p.model = std::make_shared<LinearPlant>("linear", scalar(a), Vector::Constant(1, b));
  p.controller = std::make_shared<LinearController>(RowVector::Constant(1, k));
  const double rate = 2.0 * (b * k - a);
  if (rate > 0.0) {
    p.certificate = std::make_shared<QuadraticCertificate>(scalar(1.0), rate, 1.0, 2.0);
  }
  return p;
}

Plant make_cubic(const PlantParameters & params)
{
  reject_unknown("cubic", params, {});
  Plant p;
  p.model = std::make_shared<CubicPlant>();
  p.controller = std::make_shared<CubicController>();
  p.certificate = std::make_shared<QuadraticCertificate>(scalar(1.0), 2.0, 1.0, 2.0);
  return p;
}

Plant make_double_integrator(const PlantParameters & params)
{
  reject_unknown("double_integrator", params, {"k1", "k2"});
  const double k1 = param(params, "k1", 1.0);
  const double k2 = param(params, "k2", 2.0);
  Matrix a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  Vector b(2);
  b << 0.0, 1.0;
  RowVector gain(2);
  gain << k1, k2;

  Plant p;
  p.model = std::make_shared<LinearPlant>("double_integrator", a, b);
  p.controller = std::make_shared<LinearController>(gain);

  if (k1 == 1.0 && k2 == 2.0) {
    // Closed loop [[0,1],[-1,-2]] solves A^T P + P A = -I with P = [[1.5,0.5],[0.5,0.5]].
    // Rescaled so that lambda_min(P) = 1; then c1 = lambda_max / lambda_min = 3 + 2 sqrt 2,
    // lambda = 2 - sqrt 2 and c2 = 2 c1. Declared constants carry a small margin.
    const double root2 = std::sqrt(2.0);
    Matrix weight(2, 2);
    weight << 1.5, 0.5, 0.5, 0.5;
    weight *= 2.0 + root2;
    p.certificate = std::make_shared<QuadraticCertificate>(
      weight, (2.0 - root2) * (1.0 - 1e-6), (3.0 + 2.0 * root2) * (1.0 + 1e-6),
      2.0 * (3.0 + 2.0 * root2) * (1.0 + 1e-6));
  }
  return p;
}

}  // namespace

std::vector<std::string> builtin_plant_names()
{
  return {"integrator", "linear", "cubic", "double_integrator"};
}

Plant make_builtin_plant(const std::string & name, const PlantParameters & params)
{
  if (name == "integrator") {
    return make_integrator(params);
  }
  if (name == "linear") {
    return make_linear(params);
  }
  if (name == "cubic") {
    return make_cubic(params);
  }
  if (name == "double_integrator") {
    return make_double_integrator(params);
  }
  throw ConfigError("unknown plant '" + name + "'", "plant");
}

}  // namespace backstep
