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
#include "backstep/closed_loop.hpp"
#include "backstep/delay_schedule.hpp"
#include "backstep/predictor.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace
{

using namespace backstep;

void BM_PredictorMarch(benchmark::State & state)
{
  const Plant plant = make_builtin_plant("cubic");
  const int m = static_cast<int>(state.range(0));
  const bool with_phi = state.range(1) != 0;
  const InputSource source = [](double x, bool) { return 0.3 * std::sin(3.0 * x); };
  const Vector x0 = Vector::Constant(1, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(march_predictor(*plant.model, x0, source, 0.5, m, {}, with_phi));
  }
  state.SetComplexityN(m);
}
BENCHMARK(BM_PredictorMarch)->ArgsProduct({{50, 100, 200, 400}, {0, 1}})->Complexity();

void BM_Snapshot(benchmark::State & state)
{
  const std::string name = state.range(1) == 0 ? "linear" : "double_integrator";
  const Plant plant = make_builtin_plant(name);
  const int m = static_cast<int>(state.range(0));
  const double dt = 1e-3;
  ControlHistory history(dt, 2.0);
  for (int k = 0; k <= 2000; ++k) {
    history.append(std::sin(k * dt));
  }
  ScheduleSpec spec{ScheduleKind::kSinusoid};
  spec.center = 0.5;
  spec.amplitude = 0.1;
  const DelaySchedule schedule(spec, {0.3, 0.8, 0.5});
  const Vector x = Vector::Constant(plant.model->dim(), 0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(make_snapshot(plant, history, schedule, 0.5, 2000, 2.0, x, m));
  }
  state.SetLabel(name);
}
BENCHMARK(BM_Snapshot)->ArgsProduct({{50, 100, 200}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_ClosedLoopSteps(benchmark::State & state)
{
  ScenarioConfig c;
  c.schedule = {ScheduleKind::kSinusoid};
  c.schedule.center = 0.5;
  c.schedule.amplitude = 0.1;
  c.grid = static_cast<int>(state.range(0));
  c.dt = 1e-3;
  c.horizon = 0.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(c));
  }
  state.SetItemsProcessed(state.iterations() * c.steps());
}
BENCHMARK(BM_ClosedLoopSteps)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
