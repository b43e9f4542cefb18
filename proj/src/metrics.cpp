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

#include "querloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "querloc/error.hpp"

namespace querloc::metrics {

TrialRecord TrialRecord::success(std::size_t trial, Position truth, Position estimate, double solve_time,
                                 std::string method, double rho, std::size_t m) {
  TrialRecord r;
  r.trial = trial;
  r.error = distance(estimate, truth);
  r.truth = std::move(truth);
  r.estimate = std::move(estimate);
  r.solve_time = solve_time;
  r.method = std::move(method);
  r.rho = rho;
  r.m_rangings = m;
  return r;
}

TrialRecord TrialRecord::failure(std::size_t trial, Position truth, std::string method, double rho,
                                 std::size_t m) {
  TrialRecord r;
  r.trial = trial;
  r.truth = std::move(truth);
  r.method = std::move(method);
  r.rho = rho;
  r.m_rangings = m;
  r.failed = true;
  r.error = std::numeric_limits<double>::quiet_NaN();
  return r;
}

namespace {

std::vector<double> squared_errors(std::span<const TrialRecord> records) {
  std::vector<double> sq;
  sq.reserve(records.size());
  for (const auto& r : records) {
    if (!r.failed) sq.push_back(r.error * r.error);
  }
  if (sq.empty()) throw Error(ErrorKind::kEmptyInput, "no successful trial records");
  return sq;
}

}  // namespace

double rmse(std::span<const TrialRecord> records) {
  const auto sq = squared_errors(records);
  double sum = 0.0;
  for (double v : sq) sum += v;
  return std::sqrt(sum / static_cast<double>(sq.size()));
}

double rmse_standard_error(std::span<const TrialRecord> records) {
  const auto sq = squared_errors(records);
  const double n = static_cast<double>(sq.size());
  double mean = 0.0;
  for (double v : sq) mean += v;
  mean /= n;
  if (sq.size() < 2 || mean == 0.0) return 0.0;
  double var = 0.0;
  for (double v : sq) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  return std::sqrt(var / n) / (2.0 * std::sqrt(mean));
}

std::vector<std::pair<double, double>> error_cdf(std::span<const TrialRecord> records,
                                                 std::span<const double> grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw Error(ErrorKind::kInvalidArgument, "CDF grid must be sorted");
  }
  std::vector<double> errors;
  for (const auto& r : records) {
    if (!r.failed) errors.push_back(r.error);
  }
  if (errors.empty()) throw Error(ErrorKind::kEmptyInput, "no successful trial records");
  std::sort(errors.begin(), errors.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  const double n = static_cast<double>(errors.size());
  for (double g : grid) {
    const auto count = std::upper_bound(errors.begin(), errors.end(), g) - errors.begin();
    out.emplace_back(g, static_cast<double>(count) / n);
  }
  return out;
}

Eigen::MatrixXd fisher_matrix(const localize::LinearSystem& sys, double rho) {
  if (!(rho > 0.0)) {
    throw Error(ErrorKind::kUndefinedInformation, "Fisher information is undefined at rho = 0");
  }
  const double scale = (1.0 + 3.0 * rho * rho) / (rho * rho);
  const Eigen::MatrixXd info = sys.L.transpose() * sys.weights.asDiagonal() * sys.L;
  return scale * info;
}

double crlb_trace(const localize::LinearSystem& sys, double rho) {
  const Eigen::MatrixXd f = fisher_matrix(sys, rho);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f);
  const auto& ev = eig.eigenvalues();
  if (ev.size() == 0 || !(ev(0) > 1e-14 * ev(ev.size() - 1))) {
    throw Error(ErrorKind::kSingularGeometry, "Fisher information matrix is singular");
  }
  return ev.cwiseInverse().sum();
}

double crlb_rmse_bound(std::span<const localize::LinearSystem> systems, double rho) {
  if (systems.empty()) throw Error(ErrorKind::kEmptyInput, "no systems");
  double total = 0.0;
  for (const auto& sys : systems) total += crlb_trace(sys, rho);
  return std::sqrt(total / static_cast<double>(systems.size()));
}

}  // namespace querloc::metrics
