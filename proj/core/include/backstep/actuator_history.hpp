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

#ifndef BACKSTEP__ACTUATOR_HISTORY_HPP_
#define BACKSTEP__ACTUATOR_HISTORY_HPP_

#include "backstep/delay_schedule.hpp"
#include "backstep/grid_profile.hpp"

#include <cstdint>
#include <deque>

namespace backstep
{

/// Uniformly sampled record of the scalar control U, with U(theta) = 0 for theta < 0.
///
/// Sample k lives at t_k = k * dt. Between samples the signal is the cubic through the four
/// samples k-2..k+1 bracketing [t_k, t_{k+1}]. On the first intervals the stencil is samples
/// 0..3, cut down to whatever exists; past that the interpolant on an interval is fixed once
/// its right sample exists.
///
/// Single writer; concurrent reads are safe while nobody appends.
class ControlHistory
{
public:
  /// `retention` is the span kept behind the newest sample (at least 2 * d_upper for the
  /// closed loop). Throws UsageError unless dt > 0 and retention >= 0.
  ControlHistory(double dt, double retention);

  double dt() const noexcept { return dt_; }
  /// Number of samples appended so far (including trimmed ones).
  std::int64_t count() const noexcept { return first_index_ + static_cast<std::int64_t>(samples_.size()); }
  bool empty() const noexcept { return count() == 0; }
  /// Time of the newest sample. Throws UsageError when empty.
  double t_now() const;
  double latest() const;
  /// Oldest time that can still be queried.
  double t_min() const;

  void append(double u);
  /// Overwrites the newest sample; used while solving for the current control value.
  void set_latest(double u);

  /// U(theta), right-continuous at theta = 0. Throws FutureQueryError for theta > t_now.
  double sample(double theta) const;
  /// Left limit U(theta-); differs from sample() only at theta = 0 where it is 0.
  double sample_left(double theta) const;

private:
  double interpolate(double s, std::int64_t newest) const;
  double value(std::int64_t k) const;
  void trim();

  double dt_;
  double retention_;
  std::int64_t first_index_{0};
  std::deque<double> samples_;
};

/// u(x_i, t) = U(t + D (x_i - 1)): the actuator state of the transport representation.
GridProfile distributed_true_input(const ControlHistory & history, double t, double delay, int intervals);

/// uhat(x_i, t) = U(t + Dhat(t) (x_i - 1)).
GridProfile distributed_estimated_input(
  const ControlHistory & history, double t, double dhat, int intervals);
GridProfile distributed_estimated_input(
  const ControlHistory & history, double t, const DelaySchedule & schedule, int intervals);

}  // namespace backstep

#endif  // BACKSTEP__ACTUATOR_HISTORY_HPP_
