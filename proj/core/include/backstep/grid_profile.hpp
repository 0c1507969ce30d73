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

#ifndef BACKSTEP__GRID_PROFILE_HPP_
#define BACKSTEP__GRID_PROFILE_HPP_

#include "backstep/plant_model.hpp"

#include <Eigen/Dense>

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace backstep
{

/// Samples of a scalar or vector field at the nodes x_i = i / M, i = 0..M, of [0, 1].
/// Row i holds the value at x_i; the number of columns is the value arity.
class GridProfile
{
public:
  static constexpr int kMinIntervals = 8;

  GridProfile() = default;
  /// Zero profile. Throws UsageError if intervals < 8 or arity < 1.
  explicit GridProfile(int intervals, int arity = 1);

  static GridProfile from_function(int intervals, const std::function<double(double)> & fn);

  int intervals() const noexcept { return intervals_; }
  int nodes() const noexcept { return intervals_ + 1; }
  int arity() const noexcept { return static_cast<int>(values_.cols()); }
  double spacing() const noexcept { return 1.0 / intervals_; }
  double node(int i) const noexcept { return static_cast<double>(i) / intervals_; }
  bool empty() const noexcept { return intervals_ == 0; }

  /// Scalar access (arity 1).
  double & operator[](int i) { return values_(i, 0); }
  double operator[](int i) const { return values_(i, 0); }

  double & operator()(int i, int c) { return values_(i, c); }
  double operator()(int i, int c) const { return values_(i, c); }

  Vector at(int i) const { return values_.row(i).transpose(); }
  void set(int i, const Vector & v) { values_.row(i) = v.transpose(); }

  double front() const { return values_(0, 0); }
  double back() const { return values_(intervals_, 0); }

  const Eigen::MatrixXd & values() const noexcept { return values_; }
  Eigen::MatrixXd & values() noexcept { return values_; }

  bool all_finite() const { return values_.allFinite(); }
  double max_abs() const;

  /// Cubic (four-point Lagrange) interpolation of column `c` at x in [0, 1].
  double interpolate(double x, int c = 0) const;

  GridProfile & operator+=(const GridProfile & other);
  GridProfile & operator-=(const GridProfile & other);
  GridProfile & operator*=(double s);

private:
  int intervals_{0};
  Eigen::MatrixXd values_;
};

GridProfile operator+(GridProfile a, const GridProfile & b);
GridProfile operator-(GridProfile a, const GridProfile & b);
GridProfile operator*(double s, GridProfile a);

/// Throws UsageError unless both profiles share grid and arity.
void require_same_grid(const GridProfile & a, const GridProfile & b, const char * context);

/// Nodewise difference u - uhat (the distributed input estimation error).
GridProfile estimation_error_profile(const GridProfile & u, const GridProfile & uhat);

/// First x-derivative, fourth order at every node: five-point central differences inside,
/// five-point one-sided windows next to x = 0 and x = 1.
GridProfile spatial_derivative(const GridProfile & p);

/// Derivative of order 1..3, fourth order at every node: central stencils inside, shifted
/// windows of order + 4 points near the ends.
GridProfile spatial_derivative(const GridProfile & p, int order);

/// Finite-difference weights for the derivative of `order` at offset 0 from the stencil
/// offsets (in units of the grid spacing).
std::vector<double> finite_difference_weights(const std::vector<double> & offsets, int order);

/// CSV with a header row `x,<name>` (or `x,<name>_1,...` for vector profiles).
void write_profile_csv(std::ostream & out, const GridProfile & p, const std::string & name);

}  // namespace backstep

#endif  // BACKSTEP__GRID_PROFILE_HPP_
