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

#ifndef BACKSTEP__DELAY_SCHEDULE_HPP_
#define BACKSTEP__DELAY_SCHEDULE_HPP_

#include "backstep/plant_model.hpp"

#include <string>

namespace backstep
{

/// Delay estimate and its first two time derivatives at one instant.
struct DelayEstimate
{
  double value{0.0};
  double rate{0.0};
  double accel{0.0};
};

enum class ScheduleKind { kConstant, kRamp, kSinusoid };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string & name);

/// Raw schedule, before saturation:
///   constant  value
///   ramp      initial + rate * t
///   sinusoid  center + amplitude * sin(frequency * t + phase)
/// `offset` is added to each of them.
struct ScheduleSpec
{
  ScheduleKind kind{ScheduleKind::kConstant};
  double value{0.0};
  double initial{0.0};
  double rate{0.0};
  double center{0.0};
  double amplitude{0.0};
  double frequency{1.0};
  double phase{0.0};
  double offset{0.0};
};

/// Prescribed delay estimate Dhat(t) with analytic derivatives.
///
/// Ramp and sinusoid schedules pass through a C^2 saturation onto [lower, upper]: identity on
/// [lower + w, upper - w] with w = (upper - lower) / 10, and tanh-shaped approach to the bound
/// outside it. Constant schedules are not saturated.
class DelaySchedule
{
public:
  /// Throws ConfigError when the schedule starts outside the bounds or the constant value is
  /// outside them.
  DelaySchedule(ScheduleSpec spec, DelayBounds bounds);

  DelayEstimate at(double t) const;

  const ScheduleSpec & spec() const noexcept { return spec_; }
  const DelayBounds & bounds() const noexcept { return bounds_; }

private:
  ScheduleSpec spec_;
  DelayBounds bounds_;
};

/// Free-function form of DelaySchedule::at.
DelayEstimate eval_delay_schedule(const DelaySchedule & schedule, double t);

}  // namespace backstep

#endif  // BACKSTEP__DELAY_SCHEDULE_HPP_
