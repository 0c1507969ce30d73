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

#include "backstep/actuator_history.hpp"
#include "backstep/errors.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

namespace backstep
{
namespace
{

ControlHistory filled(double dt, double t_end, const std::function<double(double)> & u,
  double retention = 100.0)
{
  ControlHistory h(dt, retention);
  const auto n = static_cast<long>(std::llround(t_end / dt));
  for (long k = 0; k <= n; ++k) {
    h.append(u(static_cast<double>(k) * dt));
  }
  return h;
}

TEST(ControlHistory, ConstantSignalInterpolatesToConstant)
{
  const ControlHistory h = filled(0.1, 2.0, [](double) { return 1.75; });
  for (const double theta : {0.0, 0.01, 0.05, 0.15, 0.333, 1.0, 1.99, 2.0}) {
    EXPECT_NEAR(h.sample(theta), 1.75, 1e-14) << theta;
  }
}

TEST(ControlHistory, RampIsReproduced)
{
  const ControlHistory h = filled(0.1, 1.0, [](double t) { return t; });
  EXPECT_NEAR(h.sample(0.35), 0.35, 1e-12);
  EXPECT_NEAR(h.sample(0.05), 0.05, 1e-12);
  EXPECT_NEAR(h.sample(0.97), 0.97, 1e-12);
}

TEST(ControlHistory, ExactAtSamples)
{
  const ControlHistory h = filled(0.01, 1.0, [](double t) { return std::sin(7 * t); });
  for (int k = 0; k <= 100; k += 7) {
    EXPECT_EQ(h.sample(k * 0.01), std::sin(7 * (k * 0.01))) << k;
  }
}

TEST(ControlHistory, ZeroBeforeTimeZero)
{
  const ControlHistory h = filled(0.1, 1.0, [](double) { return 3.0; });
  EXPECT_EQ(h.sample(-1.0), 0.0);
  EXPECT_EQ(h.sample(-1e-6), 0.0);
  EXPECT_EQ(h.sample(0.0), 3.0);
  EXPECT_EQ(h.sample_left(0.0), 0.0);
  EXPECT_EQ(h.sample_left(0.5), h.sample(0.5));
}

TEST(ControlHistory, FutureQueryThrows)
{
  const ControlHistory h = filled(0.1, 1.0, [](double t) { return t; });
  EXPECT_THROW(h.sample(1.05), FutureQueryError);
  EXPECT_NO_THROW(h.sample(1.0));
}

TEST(ControlHistory, CubicAccuracyIsFourthOrder)
{
  std::vector<double> hs;
  std::vector<double> err;
  for (const double dt : {0.04, 0.02, 0.01}) {
    const ControlHistory h = filled(dt, 2.0, [](double t) { return std::cos(3 * t); });
    double e = 0.0;
    for (double theta = 0.5; theta < 1.9; theta += 0.0173) {
      e = std::max(e, std::abs(h.sample(theta) - std::cos(3 * theta)));
    }
    hs.push_back(dt);
    err.push_back(e);
  }
  EXPECT_GE(testing::convergence_order(hs, err), 3.7);
}

TEST(ControlHistory, AppendingNeverChangesThePast)
{
  ControlHistory h(0.1, 10.0);
  std::vector<double> probes;
  std::vector<double> before;
  for (int k = 0; k < 30; ++k) {
    h.append(std::sin(0.3 * k) + 0.1 * k);
    const double theta = (k - 1) * 0.1 + 0.037;
    if (k >= 3) {
      probes.push_back(theta);
      before.push_back(h.sample(theta));
    }
  }
  for (std::size_t i = 0; i < probes.size(); ++i) {
    EXPECT_EQ(h.sample(probes[i]), before[i]) << probes[i];
  }
}

TEST(ControlHistory, FirstIntervalsAreCubicOnceSamplesExist)
{
  auto cubic = [](double t) { return 1.0 - t + 2.0 * t * t - 3.0 * t * t * t; };
  ControlHistory h(0.1, 10.0);
  for (int k = 0; k < 4; ++k) {
    h.append(cubic(0.1 * k));
  }
  for (const double theta : {0.01, 0.05, 0.13, 0.26}) {
    EXPECT_NEAR(h.sample(theta), cubic(theta), 1e-14) << theta;
  }
}

TEST(ControlHistory, SetLatestOverwritesNewest)
{
  ControlHistory h(0.1, 1.0);
  h.append(1.0);
  h.append(2.0);
  h.set_latest(5.0);
  EXPECT_EQ(h.latest(), 5.0);
  EXPECT_EQ(h.sample(0.1), 5.0);
  EXPECT_EQ(h.count(), 2);
}

TEST(ControlHistory, RetentionTrimsLazilyButKeepsWindow)
{
  const ControlHistory h = filled(0.001, 20.0, [](double t) { return t; }, 1.6);
  EXPECT_GT(h.t_min(), 0.0);
  EXPECT_LE(h.t_min(), h.t_now() - 1.6);
  EXPECT_NEAR(h.sample(h.t_now() - 1.6), h.t_now() - 1.6, 1e-12);
  EXPECT_THROW(h.sample(h.t_min() - 0.01), UsageError);
}

TEST(DistributedInput, ConstantHistory)
{
  const ControlHistory h = filled(0.01, 2.0, [](double) { return -0.4; });
  const GridProfile u = distributed_true_input(h, 2.0, 0.7, 20);
  for (int i = 0; i <= 20; ++i) {
    EXPECT_NEAR(u[i], -0.4, 1e-14);
  }
}

TEST(DistributedInput, RampClosedForms)
{
  const ControlHistory h = filled(0.01, 2.0, [](double t) { return t; });
  const GridProfile u = distributed_true_input(h, 2.0, 1.0, 20);
  const GridProfile uh = distributed_estimated_input(h, 2.0, 0.5, 20);
  const GridProfile ut = estimation_error_profile(u, uh);
  for (int i = 0; i <= 20; ++i) {
    const double x = u.node(i);
    EXPECT_NEAR(u[i], 1.0 + x, 1e-12);
    EXPECT_NEAR(ut[i], 0.5 * (x - 1.0), 1e-12);
  }
}

TEST(DistributedInput, EqualDelaysGiveIdenticalProfiles)
{
  const ControlHistory h = filled(0.01, 3.0, [](double t) { return std::sin(t); });
  const GridProfile u = distributed_true_input(h, 3.0, 0.5, 40);
  const GridProfile uh = distributed_estimated_input(h, 3.0, 0.5, 40);
  EXPECT_EQ(testing::max_abs_diff(u, uh), 0.0);
  const DelaySchedule constant({ScheduleKind::kConstant, 0.5}, {0.3, 0.8, 0.5});
  EXPECT_EQ(testing::max_abs_diff(u, distributed_estimated_input(h, 3.0, constant, 40)), 0.0);
  EXPECT_NEAR(uh.front(), std::sin(2.5), 1e-12);
}

TEST(DistributedInput, BoundaryEqualsCurrentControl)
{
  const ControlHistory h = filled(0.003, 2.1, [](double t) { return std::exp(-t) * t; });
  for (const double d : {0.31, 0.5, 0.77}) {
    EXPECT_EQ(distributed_estimated_input(h, h.t_now(), d, 33).back(), h.sample(h.t_now()));
  }
}

// D u_t - u_x and Dhat uhat_t - uhat_x - Dhat_dot (x - 1) uhat_x from three snapshots.
TEST(DistributedInput, TransportIdentitiesConvergeAtSecondOrder)
{
  const DelaySchedule schedule(
    {ScheduleKind::kSinusoid, 0.0, 0.0, 0.0, 0.5, 0.1, 1.0}, {0.3, 0.8, 0.5});
  const double t = 2.3;
  std::vector<double> hs;
  std::vector<double> true_err;
  std::vector<double> est_err;
  for (const int m : {25, 50, 100}) {
    const double dt = 0.1 / m;
    const ControlHistory h = filled(dt, t + dt, [](double s) { return std::sin(2 * s) + s; });
    const GridProfile um = distributed_true_input(h, t - dt, 0.5, m);
    const GridProfile up = distributed_true_input(h, t + dt, 0.5, m);
    const GridProfile u = distributed_true_input(h, t, 0.5, m);
    const GridProfile r_true = (0.5 / (2 * dt)) * (up - um) - spatial_derivative(u);
    const GridProfile wm = distributed_estimated_input(h, t - dt, schedule, m);
    const GridProfile wp = distributed_estimated_input(h, t + dt, schedule, m);
    const GridProfile w = distributed_estimated_input(h, t, schedule, m);
    const DelayEstimate e = schedule.at(t);
    const GridProfile wx = spatial_derivative(w);
    GridProfile r_est = (e.value / (2 * dt)) * (wp - wm) - wx;
    for (int i = 0; i <= m; ++i) {
      r_est[i] -= e.rate * (w.node(i) - 1.0) * wx[i];
    }
    hs.push_back(1.0 / m);
    true_err.push_back(r_true.max_abs());
    est_err.push_back(r_est.max_abs());
  }
  EXPECT_GE(testing::convergence_order(hs, true_err), 1.8);
  EXPECT_GE(testing::convergence_order(hs, est_err), 1.8);
  EXPECT_LE(est_err.back(), 1e-3);
}

}  // namespace
}  // namespace backstep
