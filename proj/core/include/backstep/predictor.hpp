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

#ifndef BACKSTEP__PREDICTOR_HPP_
#define BACKSTEP__PREDICTOR_HPP_

#include "backstep/grid_profile.hpp"
#include "backstep/plant_model.hpp"

#include <functional>
#include <vector>

namespace backstep
{

/// Input along the predictor characteristic, uhat(x). With `left_limit` set the source returns
/// the limit from the left, which only matters at jump locations.
using InputSource = std::function<double(double x, bool left_limit)>;

/// Transition matrices Phi(x_i, 0) of dr/dx = Dhat * df/dX(phat(x), uhat(x)) * r, with their
/// inverses cached for composition.
class TransitionField
{
public:
  static constexpr double kMaxCondition = 1e12;

  TransitionField() = default;
  /// Throws NumericError if some matrix has condition number above kMaxCondition.
  explicit TransitionField(std::vector<Matrix> from_origin);

  int intervals() const noexcept { return static_cast<int>(phi_.size()) - 1; }
  int dim() const noexcept { return phi_.empty() ? 0 : static_cast<int>(phi_.front().rows()); }
  bool empty() const noexcept { return phi_.empty(); }

  /// Phi(x_i, 0).
  const Matrix & at(int i) const { return phi_.at(static_cast<std::size_t>(i)); }
  /// Phi(x_i, 0)^{-1} = Phi(0, x_i).
  const Matrix & inverse(int i) const { return inv_.at(static_cast<std::size_t>(i)); }
  double max_condition() const noexcept { return max_condition_; }

private:
  std::vector<Matrix> phi_;
  std::vector<Matrix> inv_;
  double max_condition_{1.0};
};

struct PredictorMarch
{
  GridProfile phat;
  /// Empty unless requested.
  TransitionField phi;
};

/// Classical RK4 march of dphat/dx = Dhat f(phat, uhat(x)), phat(0) = X, over the M-interval
/// grid, one step per cell. Cells containing entries of `breaks` are split there. With `with_transition` the transition matrix is marched along (the phat
/// values are unaffected). Throws BlowUpError (location = x) on a non-finite value.
PredictorMarch march_predictor(
  const PlantModel & model, const Vector & x0, const InputSource & uhat, double dhat,
  int intervals, const std::vector<double> & breaks = {}, bool with_transition = false);

/// Predictor from a sampled uhat profile (cubic interpolation between nodes).
GridProfile compute_predictor(
  const PlantModel & model, const Vector & x0, const GridProfile & uhat, double dhat);

/// phat_x = Dhat f(phat, uhat), nodewise.
GridProfile predictor_spatial_derivative(
  const PlantModel & model, const GridProfile & phat, const GridProfile & uhat, double dhat);

/// Phi(x_i, 0) from sampled phat and uhat (cubic interpolation between nodes).
TransitionField compute_transition_field(
  const PlantModel & model, const GridProfile & phat, const GridProfile & uhat, double dhat);

/// Phi(x_i, x_j) = Phi(x_i, 0) Phi(x_j, 0)^{-1}.
Matrix transition_between(const TransitionField & field, int i, int j);

/// J(x_i) = int_0^{x_i} Phi(x_i, y) h(y) dy by the composite trapezoid rule on the nodes.
GridProfile transition_integral(const TransitionField & field, const GridProfile & h);

/// phat_t = (phat_x + Phi(x,0) Dhat f_ut + Dhat_dot Dhat I(x)) / Dhat with
/// I(x) = int_0^x Phi(x,y) [f(phat,uhat) + (y-1) df/du uhat_x] dy and
/// uhat_x = what_x + Dhat dkappa(phat) f(phat,uhat).
GridProfile compute_predictor_time_derivative(
  const PlantModel & model, const Controller & controller, const GridProfile & phat,
  const GridProfile & uhat, const GridProfile & what_x, const TransitionField & phi, double dhat,
  double dhat_dot, const Vector & f_utilde);

}  // namespace backstep

#endif  // BACKSTEP__PREDICTOR_HPP_
