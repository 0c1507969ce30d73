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

#include "backstep/delay_schedule.hpp"

#include "backstep/errors.hpp"

#include <cmath>

namespace backstep
{

std::string to_string(ScheduleKind kind)
{
  switch (kind) {
    case ScheduleKind::kConstant:
      return "constant";
    case ScheduleKind::kRamp:
      return "ramp";
    case ScheduleKind::kSinusoid:
      return "sinusoid";
  }
  return "constant";
}

ScheduleKind schedule_kind_from_string(const std::string & name)
{
  if (name == "constant") {
    return ScheduleKind::kConstant;
  }
  if (name == "ramp") {
    return ScheduleKind::kRamp;
  }
  if (name == "sinusoid") {
    return ScheduleKind::kSinusoid;
  }
  throw ConfigError("unknown delay schedule '" + name + "'", "schedule");
}

namespace
{

DelayEstimate raw(const ScheduleSpec & s, double t)
{
  switch (s.kind) {
    case ScheduleKind::kConstant:
      return {s.value + s.offset, 0.0, 0.0};
    case ScheduleKind::kRamp:
      return {s.initial + s.offset + s.rate * t, s.rate, 0.0};
    case ScheduleKind::kSinusoid: {
      const double arg = s.frequency * t + s.phase;
      const double w = s.frequency;
      return {
        s.center + s.offset + s.amplitude * std::sin(arg), s.amplitude * w * std::cos(arg),
        -s.amplitude * w * w * std::sin(arg)};
    }
  }
  return {};
}

// sat(z) = knee + w tanh((z - knee) / w) beyond the knee; matches value, slope and curvature
// of the identity at the knee.
DelayEstimate saturate(const DelayEstimate & z, double lower, double upper)
{
  const double width = 0.1 * (upper - lower);
  if (width <= 0.0) {
    return {lower, 0.0, 0.0};
  }
  const double hi_knee = upper - width;
  const double lo_knee = lower + width;
  double sign;
  double knee;
  if (z.value > hi_knee) {
    sign = 1.0;
    knee = hi_knee;
  } else if (z.value < lo_knee) {
    sign = -1.0;
    knee = lo_knee;
  } else {
    return z;
  }
  const double s = sign * (z.value - knee) / width;
  const double th = std::tanh(s);
  const double sech2 = 1.0 - th * th;
  const double d1 = sech2;
  const double d2 = sign * (-2.0 * th * sech2) / width;
  return {knee + sign * width * th, d1 * z.rate, d2 * z.rate * z.rate + d1 * z.accel};
}

}  // namespace

DelaySchedule::DelaySchedule(ScheduleSpec spec, DelayBounds bounds)
: spec_(spec), bounds_(bounds)
{
  bounds_.validate();
  const double start = raw(spec_, 0.0).value;
  if (!(start >= bounds_.lower && start <= bounds_.upper)) {
    const char * key = spec_.kind == ScheduleKind::kConstant ? "schedule.value"
                       : spec_.kind == ScheduleKind::kRamp   ? "schedule.initial"
                                                             : "schedule.center";
    throw ConfigError("delay schedule starts outside [delay_lower, delay_upper]", key);
  }
  if (spec_.kind == ScheduleKind::kSinusoid && !(spec_.frequency >= 0.0)) {
    throw ConfigError("sinusoid frequency must be non-negative", "schedule.frequency");
  }
}

DelayEstimate DelaySchedule::at(double t) const
{
  const DelayEstimate z = raw(spec_, t);
  if (spec_.kind == ScheduleKind::kConstant) {
    return z;
  }
  return saturate(z, bounds_.lower, bounds_.upper);
}

DelayEstimate eval_delay_schedule(const DelaySchedule & schedule, double t)
{
  return schedule.at(t);
}

}  // namespace backstep
