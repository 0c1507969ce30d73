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

#include <algorithm>
#include <cmath>
#include <string>

namespace backstep
{
namespace
{

// Relative distance (in samples) under which a query snaps onto a sample time.
constexpr double kSnap = 1e-9;
constexpr std::int64_t kTrimChunk = 1024;

}  // namespace

ControlHistory::ControlHistory(double dt, double retention)
: dt_(dt), retention_(retention)
{
  if (!(dt > 0.0)) {
    throw UsageError("control history needs a positive sample spacing");
  }
  if (!(retention >= 0.0)) {
    throw UsageError("control history retention must be non-negative");
  }
}

double ControlHistory::t_now() const
{
  if (empty()) {
    throw UsageError("control history is empty");
  }
  return static_cast<double>(count() - 1) * dt_;
}

double ControlHistory::latest() const
{
  if (empty()) {
    throw UsageError("control history is empty");
  }
  return samples_.back();
}

double ControlHistory::t_min() const
{
  return static_cast<double>(first_index_) * dt_;
}

void ControlHistory::append(double u)
{
  samples_.push_back(u);
  trim();
}

void ControlHistory::set_latest(double u)
{
  if (empty()) {
    throw UsageError("control history is empty");
  }
  samples_.back() = u;
}

double ControlHistory::value(std::int64_t k) const
{
  if (k < 0) {
    return 0.0;
  }
  if (k < first_index_) {
    throw UsageError(
      "control history sample " + std::to_string(k) + " was trimmed (retention too short)");
  }
  return samples_[static_cast<std::size_t>(k - first_index_)];
}

double ControlHistory::sample(double theta) const
{
  if (empty()) {
    throw UsageError("control history is empty");
  }
  const std::int64_t newest = count() - 1;
  const double s = theta / dt_;
  if (s > static_cast<double>(newest) + kSnap) {
    throw FutureQueryError(
      "control history queried at " + std::to_string(theta) + " beyond t_now = " +
      std::to_string(t_now()));
  }
  if (s < -kSnap) {
    return 0.0;
  }
  const auto nearest = static_cast<std::int64_t>(std::llround(s));
  if (std::abs(s - static_cast<double>(nearest)) <= kSnap) {
    return value(std::max<std::int64_t>(nearest, 0));
  }
  return interpolate(s, newest);
}

double ControlHistory::sample_left(double theta) const
{
  if (theta / dt_ <= kSnap) {
    return 0.0;
  }
  return sample(theta);
}

double ControlHistory::interpolate(double s, std::int64_t newest) const
{
  const auto j = static_cast<std::int64_t>(std::floor(s));
  // Near theta = 0 take samples to the right once they exist, keeping the degree at three.
  const std::int64_t hi = std::min(std::max<std::int64_t>(j + 1, 3), newest);
  const std::int64_t lo = std::max<std::int64_t>(hi - 3, 0);

  double result = 0.0;
  for (std::int64_t a = lo; a <= hi; ++a) {
    double w = 1.0;
    for (std::int64_t b = lo; b <= hi; ++b) {
      if (b != a) {
        w *= (s - static_cast<double>(b)) / static_cast<double>(a - b);
      }
    }
    result += w * value(a);
  }
  return result;
}

void ControlHistory::trim()
{
  const auto keep = static_cast<std::int64_t>(std::ceil(retention_ / dt_)) + 4;
  const auto size = static_cast<std::int64_t>(samples_.size());
  if (size > keep + kTrimChunk) {
    const std::int64_t drop = size - keep;
    samples_.erase(samples_.begin(), samples_.begin() + drop);
    first_index_ += drop;
  }
}

GridProfile distributed_true_input(
  const ControlHistory & history, double t, double delay, int intervals)
{
  GridProfile u(intervals);
  for (int i = 0; i <= intervals; ++i) {
    u[i] = history.sample(t + delay * (u.node(i) - 1.0));
  }
  return u;
}

GridProfile distributed_estimated_input(
  const ControlHistory & history, double t, double dhat, int intervals)
{
  return distributed_true_input(history, t, dhat, intervals);
}

GridProfile distributed_estimated_input(
  const ControlHistory & history, double t, const DelaySchedule & schedule, int intervals)
{
  return distributed_true_input(history, t, schedule.at(t).value, intervals);
}

}  // namespace backstep
