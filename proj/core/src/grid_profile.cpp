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

#include "backstep/grid_profile.hpp"

#include "backstep/errors.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace backstep
{

GridProfile::GridProfile(int intervals, int arity)
: intervals_(intervals)
{
  if (intervals < kMinIntervals) {
    throw UsageError(
      "grid needs at least " + std::to_string(kMinIntervals) + " intervals, got " +
      std::to_string(intervals));
  }
  if (arity < 1) {
    throw UsageError("profile arity must be at least 1");
  }
  values_ = Eigen::MatrixXd::Zero(intervals + 1, arity);
}

GridProfile GridProfile::from_function(int intervals, const std::function<double(double)> & fn)
{
  GridProfile p(intervals);
  for (int i = 0; i <= intervals; ++i) {
    p[i] = fn(p.node(i));
  }
  return p;
}

double GridProfile::max_abs() const
{
  return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff();
}

double GridProfile::interpolate(double x, int c) const
{
  const double s = x * intervals_;
  int j = static_cast<int>(std::floor(s));
  j = std::clamp(j, 0, intervals_ - 1);
  const int start = std::clamp(j - 1, 0, intervals_ - 3);
  const double local = s - start;

  double result = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) {
        w *= (local - b) / static_cast<double>(a - b);
      }
    }
    result += w * values_(start + a, c);
  }
  return result;
}

GridProfile & GridProfile::operator+=(const GridProfile & other)
{
  require_same_grid(*this, other, "profile addition");
  values_ += other.values_;
  return *this;
}

GridProfile & GridProfile::operator-=(const GridProfile & other)
{
  require_same_grid(*this, other, "profile subtraction");
  values_ -= other.values_;
  return *this;
}

GridProfile & GridProfile::operator*=(double s)
{
  values_ *= s;
  return *this;
}

GridProfile operator+(GridProfile a, const GridProfile & b) { return a += b; }
GridProfile operator-(GridProfile a, const GridProfile & b) { return a -= b; }
GridProfile operator*(double s, GridProfile a) { return a *= s; }

void require_same_grid(const GridProfile & a, const GridProfile & b, const char * context)
{
  if (a.intervals() != b.intervals() || a.arity() != b.arity()) {
    throw UsageError(
      std::string(context) + ": grid mismatch (" + std::to_string(a.intervals()) + "x" +
      std::to_string(a.arity()) + " vs " + std::to_string(b.intervals()) + "x" +
      std::to_string(b.arity()) + ")");
  }
}

GridProfile estimation_error_profile(const GridProfile & u, const GridProfile & uhat)
{
  return u - uhat;
}

std::vector<double> finite_difference_weights(const std::vector<double> & offsets, int order)
{
  // Fornberg's recursion, evaluated at z = 0.
  const int n = static_cast<int>(offsets.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = offsets[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = offsets[i] - offsets[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) {
    w[j] = c[j][order];
  }
  return w;
}

GridProfile spatial_derivative(const GridProfile & p)
{
  return spatial_derivative(p, 1);
}

GridProfile spatial_derivative(const GridProfile & p, int order)
{
  if (order < 1 || order > 3) {
    throw UsageError("spatial_derivative supports orders 1 to 3");
  }
  const int m = p.intervals();
  const int half = order == 3 ? 3 : 2;
  const int one_sided = order + 4;
  const double scale = std::pow(static_cast<double>(m), order);

  GridProfile out(m, p.arity());
  std::vector<double> offsets;
  for (int i = 0; i <= m; ++i) {
    int start;
    int width;
    if (i - half >= 0 && i + half <= m) {
      start = i - half;
      width = 2 * half + 1;
    } else {
      width = one_sided;
      start = i - half < 0 ? 0 : m - width + 1;
    }
    offsets.resize(width);
    for (int k = 0; k < width; ++k) {
      offsets[k] = static_cast<double>(start + k - i);
    }
    const std::vector<double> w = finite_difference_weights(offsets, order);
    for (int c = 0; c < p.arity(); ++c) {
      double acc = 0.0;
      for (int k = 0; k < width; ++k) {
        acc += w[k] * p(start + k, c);
      }
      out(i, c) = acc * scale;
    }
  }
  return out;
}

void write_profile_csv(std::ostream & out, const GridProfile & p, const std::string & name)
{
  out << "x";
  if (p.arity() == 1) {
    out << ',' << name;
  } else {
    for (int c = 0; c < p.arity(); ++c) {
      out << ',' << name << '_' << (c + 1);
    }
  }
  out << '\n';
  for (int i = 0; i < p.nodes(); ++i) {
    out << fmt::format("{:.17g}", p.node(i));
    for (int c = 0; c < p.arity(); ++c) {
      out << ',' << fmt::format("{:.17g}", p(i, c));
    }
    out << '\n';
  }
}

}  // namespace backstep
