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
#include "backstep/scenario_config.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <string>

namespace backstep
{
namespace
{

ScenarioConfig parse(const std::string & text)
{
  std::istringstream in(text);
  return parse_scenario_config(in);
}

std::string key_of(const std::string & text)
{
  try {
    parse(text);
  } catch (const ConfigError & e) {
    return e.key();
  }
  return "<no error>";
}

TEST(ScenarioConfig, ParsesAssignmentsAndComments)
{
  const ScenarioConfig c = parse(
    "# comment\n"
    "plant = double_integrator\n"
    "plant.k1 = 2   # trailing\n"
    "x0 = 1, -0.5\n"
    "\n"
    "delay = 0.6\n"
    "schedule = sinusoid\n"
    "schedule.center = 0.5\n"
    "schedule.amplitude = 0.1\n"
    "grid = 64\n"
    "dt = 0.002\n"
    "horizon = 4\n"
    "snapshot_interval = 0.5\n"
    "triplet_spacing = 2\n");
  EXPECT_EQ(c.plant, "double_integrator");
  EXPECT_EQ(c.plant_params.at("k1"), 2.0);
  ASSERT_EQ(c.x0.size(), 2U);
  EXPECT_EQ(c.x0[1], -0.5);
  EXPECT_EQ(c.schedule.kind, ScheduleKind::kSinusoid);
  EXPECT_EQ(c.grid, 64);
  EXPECT_EQ(c.steps(), 2000);
  EXPECT_EQ(c.effective_stride(), 250);
  EXPECT_EQ(c.triplet_spacing, 2);
}

TEST(ScenarioConfig, DefaultsAreValid)
{
  const ScenarioConfig c = parse("");
  EXPECT_EQ(c.plant, "linear");
  EXPECT_EQ(c.grid, 100);
  EXPECT_EQ(c.effective_stride(), 0);
  EXPECT_NO_THROW(c.validate());
}

TEST(ScenarioConfig, ErrorsNameTheKey)
{
  EXPECT_EQ(key_of("colour = red\n"), "colour");
  EXPECT_EQ(key_of("dt = 0\n"), "dt");
  EXPECT_EQ(key_of("dt = -1e-3\n"), "dt");
  EXPECT_EQ(key_of("grid = 4\n"), "grid");
  EXPECT_EQ(key_of("grid = 1.5\n"), "grid");
  EXPECT_EQ(key_of("horizon = abc\n"), "horizon");
  EXPECT_EQ(key_of("plant = pendulum\n"), "plant");
  EXPECT_EQ(key_of("x0 = 1, 2\n"), "x0");
  EXPECT_EQ(key_of("delay = 2\n"), "delay");
  EXPECT_EQ(key_of("delay_upper = 0.1\n"), "delay_upper");
  EXPECT_EQ(key_of("triplet_spacing = 0\n"), "triplet_spacing");
  EXPECT_EQ(key_of("schedule = wobble\n"), "schedule");
  EXPECT_THROW(parse("just words\n"), ConfigError);
}

TEST(ScenarioConfig, TextFormRoundTrips)
{
  ScenarioConfig c;
  c.plant = "linear";
  c.plant_params = {{"k", 1.25}};
  c.x0 = {0.1 + 0.2};
  c.delay = 0.45;
  c.schedule.kind = ScheduleKind::kRamp;
  c.schedule.initial = 0.35;
  c.schedule.rate = 1.0 / 3.0;
  c.dt = 1.0 / 700.0;
  c.snapshot_stride = 7;
  c.analysis_margin = 0.3;
  const ScenarioConfig back = parse(to_config_text(c));
  EXPECT_EQ(to_config_text(back), to_config_text(c));
  EXPECT_EQ(back.x0[0], c.x0[0]);
  EXPECT_EQ(back.dt, c.dt);
  EXPECT_EQ(back.schedule.rate, c.schedule.rate);
  EXPECT_EQ(back.plant_params.at("k"), 1.25);
}

TEST(ScenarioConfig, ApplyValueUpdatesOneField)
{
  ScenarioConfig c;
  apply_config_value(c, "schedule.offset", "0.05");
  EXPECT_EQ(c.schedule.offset, 0.05);
  EXPECT_THROW(apply_config_value(c, "grid", "many"), ConfigError);
}

TEST(ScenarioConfig, MissingFileIsConfigError)
{
  EXPECT_THROW(load_scenario_config("/nonexistent/scenario.cfg"), ConfigError);
}

}  // namespace
}  // namespace backstep
