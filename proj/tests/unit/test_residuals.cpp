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
#include "backstep/residuals.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <string>

namespace backstep
{
namespace
{

double state_residual(int spacing)
{
  ScenarioConfig c = testing::linear_sinusoid(160, 5e-4, 3.0);
  c.snapshot_interval = 0.5;
  c.triplet_spacing = spacing;
  const SimulationResult r = run_scenario(c);
  const Plant plant = make_builtin_plant(c.plant, c.plant_params);
  return aggregate_residuals(plant, r.triplets, 2.0).at("state").max_abs;
}

const EquationSummary & summary(const ResidualReport & report, const std::string & name)
{
  for (const EquationSummary & e : report.equations) {
    if (e.name == name) {
      return e;
    }
  }
  throw std::runtime_error("missing residual " + name);
}

TEST(Residuals, CatalogCoversEveryEvaluatedResidual)
{
  ScenarioConfig c = testing::linear_sinusoid(20, 0.01, 1.0);
  c.snapshot_interval = 0.5;
  const SimulationResult r = run_scenario(c);
  ASSERT_FALSE(r.triplets.empty());
  const Plant plant = make_builtin_plant(c.plant, c.plant_params);
  const ResidualSet set = evaluate_residuals(plant, r.triplets.front());
  EXPECT_EQ(set.size(), residual_catalog().size());
  for (const auto & [name, kind] : residual_catalog()) {
    EXPECT_EQ(set.count(name), 1U) << name;
  }
}

TEST(Residuals, EquilibriumIsExact)
{
  ScenarioConfig c = testing::linear_sinusoid(20, 0.01, 3.0);
  c.x0 = {0.0};
  c.snapshot_interval = 0.5;
  const SimulationResult r = run_scenario(c);
  const Plant plant = make_builtin_plant(c.plant, c.plant_params);
  for (const SnapshotTriplet & tr : r.triplets) {
    for (const auto & [name, value] : evaluate_residuals(plant, tr)) {
      EXPECT_EQ(value.max_abs, 0.0) << name;
    }
  }
}

TEST(Residuals, StateEquationSmallAtFineStep)
{
  ScenarioConfig c = testing::linear_sinusoid(100, 1e-3, 3.0);
  c.snapshot_interval = 0.25;
  const SimulationResult r = run_scenario(c);
  const Plant plant = make_builtin_plant(c.plant, c.plant_params);
  int used = 0;
  const ResidualSet agg = aggregate_residuals(plant, r.triplets, 1.6, &used);
  EXPECT_GT(used, 4);
  EXPECT_LE(agg.at("state").max_abs, 1e-5);
  EXPECT_LE(agg.at("bc_what").max_abs, 1e-12);
  EXPECT_LE(agg.at("bc_utilde").max_abs, 1e-12);
}

TEST(Residuals, StateResidualIsSecondOrderInDelta)
{
  const double e16 = state_residual(16);
  const double e8 = state_residual(8);
  const double e4 = state_residual(4);
  const double order = testing::convergence_order({16.0, 8.0, 4.0}, {e16, e8, e4});
  EXPECT_GE(order, 1.8);
  EXPECT_LE(order, 2.2);
}

TEST(Residuals, ExactDelayHasZeroErrorResidual)
{
  ScenarioConfig c;
  c.plant = "cubic";
  c.x0 = {1.0};
  c.delay = 0.4;
  c.delay_lower = 0.2;
  c.delay_upper = 0.6;
  c.schedule = {ScheduleKind::kConstant, 0.4};
  c.grid = 40;
  c.dt = 0.004;
  c.horizon = 2.0;
  c.snapshot_interval = 0.4;
  const SimulationResult r = run_scenario(c);
  const Plant plant = make_builtin_plant(c.plant, c.plant_params);
  ASSERT_FALSE(r.triplets.empty());
  for (const SnapshotTriplet & tr : r.triplets) {
    const ResidualSet u = residual_utilde_system(tr);
    EXPECT_EQ(u.at("utilde").max_abs, 0.0);
    EXPECT_EQ(u.at("bc_utilde").max_abs, 0.0);
  }
}

TEST(Residuals, RampScheduleCrossChecksAreSecondOrderInDelta)
{
  std::vector<double> deltas;
  std::map<std::string, std::vector<double>> err;
  for (const int spacing : {40, 20, 10}) {
    ScenarioConfig c = testing::linear_sinusoid(100, 5e-4, 5.4);
    c.schedule = {ScheduleKind::kRamp};
    c.schedule.initial = 0.4;
    c.schedule.rate = 0.05;
    c.snapshot_interval = 0.5;
    c.triplet_spacing = spacing;
    const SimulationResult r = run_scenario(c);
    const Plant plant = make_builtin_plant(c.plant, c.plant_params);
    const ResidualSet agg = aggregate_residuals(plant, r.triplets, 4.8);
    deltas.push_back(spacing * c.dt);
    for (const char * name : {"uhat_t", "uhat_xt", "phat_t", "q1_t", "state"}) {
      err[name].push_back(agg.at(name).max_abs);
    }
  }
  for (const auto & [name, values] : err) {
    EXPECT_GE(testing::convergence_order(deltas, values), 1.8) << name;
  }
}

TEST(Residuals, ParseLadder)
{
  const std::vector<LadderRung> explicit_rungs = parse_ladder("50:0.002, 100:0.001", 100, 1e-3);
  ASSERT_EQ(explicit_rungs.size(), 2U);
  EXPECT_EQ(explicit_rungs[0].grid, 50);
  EXPECT_EQ(explicit_rungs[1].dt, 0.001);

  const std::vector<LadderRung> bare = parse_ladder("50,100,200", 100, 1e-3);
  ASSERT_EQ(bare.size(), 3U);
  EXPECT_DOUBLE_EQ(bare[0].dt, 2e-3);
  EXPECT_DOUBLE_EQ(bare[2].dt, 5e-4);

  EXPECT_TRUE(parse_ladder("", 100, 1e-3).empty());
  for (const char * bad : {"x", "4:0.1", "50:-1", "50:0.1:2", "50,,100"}) {
    EXPECT_THROW(parse_ladder(bad, 100, 1e-3), ConfigError) << bad;
  }
}

TEST(Residuals, FittedOrderOfPowerLaw)
{
  EXPECT_NEAR(fitted_order({10, 20, 40, 80}, {3.0e-2, 7.5e-3, 1.875e-3, 4.6875e-4}), 2.0, 1e-12);
  EXPECT_NEAR(fitted_order({10, 100}, {1.0, 1e-3}), 3.0, 1e-12);
  EXPECT_TRUE(std::isnan(fitted_order({10}, {1.0})));
}

TEST(Residuals, StudyNeedsThreeIncreasingRungs)
{
  ScenarioConfig c = testing::linear_sinusoid(20, 0.01, 1.0);
  c.snapshot_interval = 0.5;
  try {
    convergence_study(c, {{20, 0.01}, {40, 0.005}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError & e) {
    EXPECT_EQ(e.key(), "ladder");
  }
  EXPECT_THROW(convergence_study(c, {{40, 0.01}, {20, 0.01}, {80, 0.01}}), ConfigError);
  c.snapshot_interval = 0.0;
  EXPECT_THROW(convergence_study(c, {{20, 0.01}, {40, 0.005}, {80, 0.0025}}), ConfigError);
}

TEST(Residuals, LinearStudyIsSecondOrder)
{
  ScenarioConfig c = testing::linear_sinusoid(100, 1e-3, 7.0);
  c.snapshot_interval = 0.25;
  c.analysis_margin = 4.0;
  c.triplet_spacing = 2;
  StudyOptions options;
  options.workers = 3;
  const ResidualReport report =
    convergence_study(c, {{50, 2e-3}, {100, 1e-3}, {200, 5e-4}}, options);
  ASSERT_TRUE(report.complete);
  EXPECT_TRUE(report.passed);
  for (const char * name : {"state", "transport_u", "transport_uhat", "what", "utilde"}) {
    const EquationSummary & e = summary(report, name);
    EXPECT_GE(e.order, 1.7) << name;
    EXPECT_LE(e.order, 2.5) << name;
    EXPECT_TRUE(e.monotone) << name;
  }
  for (const char * name : {"bc_what", "bc_utilde"}) {
    EXPECT_LE(summary(report, name).max_norms.back(), 1e-12) << name;
  }
}

TEST(Residuals, CubicStudyConverges)
{
  ScenarioConfig c;
  c.plant = "cubic";
  c.x0 = {1.0};
  c.delay = 0.4;
  c.delay_lower = 0.3;
  c.delay_upper = 0.6;
  c.schedule = {ScheduleKind::kSinusoid};
  c.schedule.center = 0.45;
  c.schedule.amplitude = 0.05;
  c.schedule.frequency = 1.0;
  c.horizon = 3.0;
  c.analysis_margin = 1.0;
  c.snapshot_interval = 0.25;
  StudyOptions options;
  options.workers = 3;
  const ResidualReport report =
    convergence_study(c, {{50, 2e-3}, {100, 1e-3}, {200, 5e-4}}, options);
  ASSERT_TRUE(report.complete);
  for (const char * name : {"state", "transport_u", "transport_uhat", "predictor", "what", "utilde"}) {
    EXPECT_GE(summary(report, name).order, 1.7) << name;
  }
}

}  // namespace
}  // namespace backstep
