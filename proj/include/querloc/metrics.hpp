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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "querloc/localize.hpp"
#include "querloc/model.hpp"

namespace querloc::metrics {

struct TrialRecord {
  std::size_t trial = 0;
  Position truth;
  Position estimate;
  double error = 0.0;  // ||estimate - truth||
  double solve_time = 0.0;
  std::string method;
  double rho = 0.0;
  std::size_t m_rangings = 0;
  bool failed = false;

  /// Builds a successful record, computing the error from the positions.
  static TrialRecord success(std::size_t trial, Position truth, Position estimate, double solve_time,
                             std::string method, double rho, std::size_t m);
  static TrialRecord failure(std::size_t trial, Position truth, std::string method, double rho, std::size_t m);
};

/// sqrt(mean error^2) over successful records.
double rmse(std::span<const TrialRecord> records);
/// Standard error of rmse() by the delta method on mean(error^2).
double rmse_standard_error(std::span<const TrialRecord> records);

/// Fraction of successful records with error <= g, for each g in the grid.
std::vector<std::pair<double, double>> error_cdf(std::span<const TrialRecord> records,
                                                 std::span<const double> grid);

/// ((1 + 3 rho^2) / rho^2) L^T W L, with the system's (clamped) weights.
Eigen::MatrixXd fisher_matrix(const localize::LinearSystem& sys, double rho);

/// sqrt(mean_t tr(F_t^{-1})) over per-trial systems.
double crlb_rmse_bound(std::span<const localize::LinearSystem> systems, double rho);

/// tr(F^{-1}) for one system; throws Error(kSingularGeometry) if F is singular.
double crlb_trace(const localize::LinearSystem& sys, double rho);

}  // namespace querloc::metrics
