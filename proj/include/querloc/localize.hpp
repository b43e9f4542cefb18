// Copyright 2026 The QuERLoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "querloc/model.hpp"

namespace querloc::localize {

/// Weighted linear system L x ~ h with diagonal weights.
struct LinearSystem {
  Eigen::MatrixXd L;          // m x d, row k = u_k^T = 2 sum_i w_{i,k} a_i^T
  Eigen::VectorXd h;          // h_k = sum_i w_{i,k} a_i^T a_i - lambda_k
  Eigen::VectorXd weights;    // lambda_k^{-2}, clamped

  std::size_t rows() const { return static_cast<std::size_t>(L.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(L.cols()); }
};

/// Relative floor on |lambda| when forming lambda^{-2} weights.
inline constexpr double kWeightFloor = 1e-6;

/// lambda^{-2} weights, capped at (kWeightFloor * median|lambda|)^{-2}. When
/// every |lambda| is below 1e-12 * length_scale^2 the weights are all one.
Eigen::VectorXd readout_weights(std::span<const double> lambdas, double length_scale = 1.0);

LinearSystem build_linear_system(const AnchorSet& anchors, std::span<const ProbeScheme> schemes,
                                 std::span<const double> lambdas, double length_scale = 1.0);

/// ||sqrt(W)(L x - h)||^2
double wls_objective(const LinearSystem& sys, const Vec& x);

enum class SolverId { kWls, kMultilateration, kGradientDescent, kTdoaChan };

const char* to_string(SolverId id);

struct Estimate {
  Position x_hat;
  SolverId solver = SolverId::kWls;
  std::size_t iterations = 0;  // 0 for closed-form solvers
  double solve_time = 0.0;     // seconds
  /// TDoA only: estimated distance to the reference anchor (unconstrained sign).
  std::optional<double> reference_range;
};

/// Minimizer of ||sqrt(W)(L x - h)||^2 by column-pivoted Householder QR.
/// Throws Error(kSingularGeometry) when m < d, rank(L) < d or cond(L) > 1e12.
Estimate wls_solve(const LinearSystem& sys);

/// Condition number above which a geometry is treated as singular.
inline constexpr double kMaxCondition = 1e12;

struct MultilaterationOptions {
  /// With fewer than d+1 anchors, return the minimum-norm solution (about the
  /// first anchor) of the underdetermined linear stage instead of throwing.
  bool allow_underdetermined = false;
};

/// Linearized multilateration: subtracting the first anchor's squared range
/// equation gives 2(a_i - a_1)^T x = d_1^2 - d_i^2 + |a_i|^2 - |a_1|^2,
/// solved by least squares.
Estimate multilateration_init(std::span<const Position> anchors, std::span<const double> ranges,
                              MultilaterationOptions opts = {});

struct GdOptions {
  std::size_t max_iters = 500;
  double grad_tol = 1e-7;
  double initial_step = 1.0;
  /// Anchor-collision nudges are 1e-9 * length_scale.
  double length_scale = 100.0;

  /// Defaults tied to the sensor bound: grad_tol = 1e-9 * kappa_s.
  static GdOptions for_scale(double kappa_s);
};

/// f(x) = sum_i (||x - a_i|| - d_i)^2
double range_objective(const Vec& x, std::span<const Position> anchors, std::span<const double> ranges);
Vec range_objective_gradient(const Vec& x, std::span<const Position> anchors, std::span<const double> ranges);

/// Gradient descent on range_objective with Armijo backtracking (halving from
/// initial_step). Never returns a point worse than x0.
Estimate gd_refine(const Position& x0, std::span<const Position> anchors, std::span<const double> ranges,
                   const GdOptions& opts);

struct TdoaOptions {
  bool second_stage = true;
  /// With exactly d+1 anchors, solve the minimal case with the range
  /// constraint d_1^2 = |x - a_1|^2 (smallest non-negative root); with fewer,
  /// return the minimum-norm linear-stage solution. Otherwise these throw.
  bool allow_underdetermined = false;
};

/// Chan-style pseudo-linear TDoA solver. `range_differences[i-2]` is
/// r_i = d_i - d_1 for anchors i = 2..m, with anchors[0] the reference.
Estimate tdoa_chan_solve(std::span<const Position> anchors, std::span<const double> range_differences,
                         TdoaOptions opts = {});

}  // namespace querloc::localize
