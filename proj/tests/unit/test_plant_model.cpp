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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace backstep
{
namespace
{

Vector vec(std::initializer_list<double> v)
{
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double x : v) {
    out(i++) = x;
  }
  return out;
}

std::vector<DerivativeSample> sample_cloud(int dim, int count, double radius, unsigned seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-radius, radius);
  std::vector<DerivativeSample> out;
  for (int i = 0; i < count; ++i) {
    DerivativeSample s;
    s.x = Vector(dim);
    for (int c = 0; c < dim; ++c) {
      s.x(c) = d(rng);
    }
    s.u = d(rng);
    out.push_back(s);
  }
  return out;
}

// df/du scaled by 1.1 on top of the linear plant.
class CorruptedPlant final : public PlantModel
{
public:
  explicit CorruptedPlant(std::shared_ptr<const PlantModel> base) : base_(std::move(base)) {}
  std::string name() const override { return "corrupted"; }
  int dim() const override { return base_->dim(); }
  Vector f(const Vector & x, double u) const override { return base_->f(x, u); }
  Matrix df_dx(const Vector & x, double u) const override { return base_->df_dx(x, u); }
  Vector df_du(const Vector & x, double u) const override { return 1.1 * base_->df_du(x, u); }
  Matrix d2f_dudx(const Vector & x, double u) const override { return base_->d2f_dudx(x, u); }
  Vector d2f_du2(const Vector & x, double u) const override { return base_->d2f_du2(x, u); }
  Matrix d2f_dx2(const Vector & x, double u, const Vector & v) const override
  {
    return base_->d2f_dx2(x, u, v);
  }

private:
  std::shared_ptr<const PlantModel> base_;
};

TEST(PlantModel, EvalFExamples)
{
  const Plant integrator = make_builtin_plant("integrator");
  EXPECT_EQ(eval_f(*integrator.model, vec({0.0}), 0.0)(0), 0.0);
  const Plant linear = make_builtin_plant("linear", {{"a", 1.0}, {"b", 1.0}});
  EXPECT_EQ(eval_f(*linear.model, vec({2.0}), 3.0)(0), 5.0);
  const Plant cubic = make_builtin_plant("cubic");
  EXPECT_EQ(eval_f(*cubic.model, vec({2.0}), 0.0)(0), -8.0);
}

TEST(PlantModel, EvalFRejectsWrongDimension)
{
  const Plant planar = make_builtin_plant("double_integrator");
  EXPECT_THROW(eval_f(*planar.model, vec({1.0}), 0.0), UsageError);
}

TEST(PlantModel, OriginIsEquilibriumForEveryBuiltin)
{
  for (const std::string & name : builtin_plant_names()) {
    const Plant p = make_builtin_plant(name);
    const Vector zero = Vector::Zero(p.model->dim());
    EXPECT_EQ(p.model->f(zero, 0.0).cwiseAbs().maxCoeff(), 0.0) << name;
    EXPECT_EQ(p.controller->kappa(zero), 0.0) << name;
  }
}

TEST(PlantModel, DoubleIntegratorClosedLoopEigenvalues)
{
  const Plant p = make_builtin_plant("double_integrator");
  const Matrix closed = p.model->df_dx(Vector::Zero(2), 0.0) +
    p.model->df_du(Vector::Zero(2), 0.0) * p.controller->dkappa_dx(Vector::Zero(2));
  const Eigen::VectorXcd ev = closed.eigenvalues();
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(ev(i).real(), -1.0, 1e-6);
    EXPECT_NEAR(ev(i).imag(), 0.0, 1e-6);
  }
}

TEST(PlantModel, LinearDerivativesAreExact)
{
  const Plant p = make_builtin_plant("linear");
  const DerivativeCheckReport r =
    check_derivative_consistency(*p.model, *p.controller, sample_cloud(1, 20, 3.0, 1));
  EXPECT_TRUE(r.passed);
  for (const auto & [name, err] : r.max_error) {
    EXPECT_LE(err, 1e-9) << name;
  }
}

TEST(PlantModel, CubicJacobianAgainstCentralDifference)
{
  const Plant p = make_builtin_plant("cubic");
  const double h = 1e-4;
  const double x = 1.0;
  const double fd = ((-(x + h) * (x + h) * (x + h)) - (-(x - h) * (x - h) * (x - h))) / (2 * h);
  EXPECT_LE(std::abs(p.model->df_dx(vec({x}), 0.0)(0, 0) - fd), 1e-6);
  const DerivativeCheckReport r =
    check_derivative_consistency(*p.model, *p.controller, {{vec({1.0}), 0.0}}, h);
  EXPECT_LE(r.max_error.at("df_dx"), 1e-6);
}

TEST(PlantModel, EveryBuiltinPassesDerivativeCheckAtTwoSteps)
{
  for (const std::string & name : builtin_plant_names()) {
    const Plant p = make_builtin_plant(name);
    for (const double h : {1e-3, 1e-4}) {
      const DerivativeCheckReport r = check_derivative_consistency(
        *p.model, *p.controller, sample_cloud(p.model->dim(), 25, 2.0, 7), h);
      EXPECT_TRUE(r.passed) << name << " h=" << h;
    }
  }
}

TEST(PlantModel, CorruptedInputDerivativeIsFlagged)
{
  const Plant p = make_builtin_plant("linear");
  const CorruptedPlant bad(p.model);
  const DerivativeCheckReport r =
    check_derivative_consistency(bad, *p.controller, sample_cloud(1, 5, 1.0, 3));
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_error.at("df_du"), 0.05);
}

TEST(PlantModel, LyapunovLinearExample)
{
  const Plant p = make_builtin_plant("linear", {{"a", 1.0}, {"b", 1.0}, {"k", 2.0}});
  // V = X^2 with lambda = 1, c1 = 1, c2 = 2; dV/dt = -2 X^2.
  const QuadraticCertificate cert(Matrix::Identity(1, 1), 1.0, 1.0, 2.0);
  std::vector<Vector> pts;
  for (const double x : {-3.0, -1.0, -0.5, 0.5, 1.0, 3.0}) {
    pts.push_back(vec({x}));
  }
  EXPECT_TRUE(check_lyapunov(cert, *p.model, *p.controller, pts).passed);
  EXPECT_TRUE(check_lyapunov(cert, *p.model, *p.controller, {vec({0.0})}).passed);

  const QuadraticCertificate wrong(Matrix::Identity(1, 1), 3.0, 1.0, 2.0);
  const LyapunovCheckReport r = check_lyapunov(wrong, *p.model, *p.controller, {vec({1.0})});
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.decay_slack, 1.0, 1e-12);
}

TEST(PlantModel, BuiltinCertificatesHoldOnBall)
{
  for (const std::string & name : builtin_plant_names()) {
    const Plant p = make_builtin_plant(name);
    if (!p.certificate) {
      continue;
    }
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> r(0.0, 1.0);
    std::vector<Vector> pts;
    const int n = p.model->dim();
    for (int i = 0; i < 100; ++i) {
      Vector v(n);
      for (int c = 0; c < n; ++c) {
        v(c) = g(rng);
      }
      pts.push_back(v.normalized() * 10.0 * std::pow(r(rng), 1.0 / n));
    }
    EXPECT_TRUE(check_lyapunov(*p.certificate, *p.model, *p.controller, pts).passed) << name;
  }
}

TEST(PlantModel, UnknownPlantAndParameterAreConfigErrors)
{
  EXPECT_THROW(make_builtin_plant("pendulum"), ConfigError);
  try {
    make_builtin_plant("linear", {{"c", 1.0}});
    FAIL();
  } catch (const ConfigError & e) {
    EXPECT_EQ(e.key().rfind("plant", 0), 0U);
  }
}

TEST(PlantModel, DelayBoundsValidation)
{
  EXPECT_NO_THROW((DelayBounds{0.3, 0.8, 0.5}.validate()));
  EXPECT_THROW((DelayBounds{0.0, 0.8, 0.5}.validate()), ConfigError);
  EXPECT_THROW((DelayBounds{0.5, 0.4, 0.45}.validate()), ConfigError);
  EXPECT_THROW((DelayBounds{0.3, 0.8, 0.9}.validate()), ConfigError);
}

}  // namespace
}  // namespace backstep
