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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "querloc/localize.hpp"
#include "querloc/metrics.hpp"
#include "querloc/model.hpp"
#include "querloc/qdynamics.hpp"
#include "querloc/rng.hpp"

namespace querloc::experiment {

enum class ExperimentKind { kMain, kSameAnchor, kMimic, kDynamics, kBench };
enum class Method { kQuerLoc, kMultilaterationGd, kTdoaChan, kQuerLocSim };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(Method method);
std::optional<ExperimentKind> parse_kind(std::string_view name);
std::optional<Method> parse_method(std::string_view name);

std::vector<Method> default_methods(ExperimentKind kind);

/// {0, step, 2 step, ..., max}
std::vector<double> make_rho_grid(double rho_max, double rho_step);

struct ExperimentConfig {
  std::size_t d = 3;
  double kappa_s = 100.0;
  double kappa_a_ratio = 0.5;
  std::size_t n = 10;
  /// "table1" or "literal" (then `anchor_list` holds the coordinates).
  std::string anchor_topology = "table1";
  std::vector<Position> anchor_list;
  std::vector<std::size_t> m_list{3, 4, 5};
  std::vector<double> rho_grid = make_rho_grid(0.05, 0.005);
  std::size_t trials = 10000;
  std::optional<std::uint64_t> seed;
  /// Empty means default_methods(kind).
  std::vector<Method> methods;
  ExperimentKind kind = ExperimentKind::kMain;
  PhysicalConstants constants;

  double kappa_a() const { return kappa_a_ratio * kappa_s; }
  AnchorSet anchors() const;
  Scenario scenario() const;
  std::vector<Method> active_methods() const;
  std::uint64_t require_seed() const;

  /// Throws Error(kConfig) describing the first inconsistency.
  void validate() const;
};

/// r positions uniform in [0, kappa_s]^d.
std::vector<Position> sample_positions(const ExperimentConfig& config, Rng& rng);

/// The ground-truth sequence shared by every method of a campaign.
std::vector<Position> campaign_truths(const ExperimentConfig& config);

/// RMSE lower bound for QuERLoc with the default schemes over anchors 1..2m.
/// Each position's Fisher information uses the weights of its noisy readouts,
/// drawn from the same streams as run_campaign, so the value matches the
/// campaign's crlb column for the same seed.
double quer_crlb(const ExperimentConfig& config, std::size_t m, double rho, std::span<const Position> truths);

struct TrialOutcome {
  metrics::TrialRecord record;
  /// QuERLoc / QuERLoc-sim: the solved system, for CRLB aggregation.
  std::optional<localize::LinearSystem> system;
};

/// Generates one method's noisy measurements for `truth`, solves, and records
/// the error and the solve time (system build + estimator). Solver errors
/// become failed records.
TrialOutcome run_trial(const ExperimentConfig& config, Method method, std::size_t m, double rho,
                       const Position& truth, std::size_t trial, Rng& rng);

/// Per-trial stream keyed by (seed, method, m, rho, trial). Keying on the rho
/// value rather than its grid position keeps a cell's draws independent of
/// the rest of the grid.
Rng trial_stream(std::uint64_t seed, Method method, std::size_t m, double rho, std::size_t trial);

struct ResultRow {
  std::string experiment;
  std::string method;
  std::size_t m = 0;
  double rho = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::optional<double> rmse;
  std::optional<double> crlb;
  std::optional<double> mean_solve_time;
};

struct Cell {
  ResultRow row;
  std::vector<metrics::TrialRecord> records;
};

struct CampaignResult {
  std::string experiment;
  std::vector<Cell> cells;

  std::size_t total_trials() const;
  std::size_t total_failures() const;
  const Cell* find(Method method, std::size_t m, double rho) const;
};

struct RunOptions {
  std::size_t workers = 1;
  /// Solve times are wall-clock and differ between runs; they are left out
  /// of the results unless requested.
  bool record_timing = false;
};

CampaignResult run_campaign(const ExperimentConfig& config, const RunOptions& opts = {});

void write_results_csv(std::ostream& os, const CampaignResult& result);
void write_errors_csv(std::ostream& os, const CampaignResult& result);

struct TimingRow {
  std::string method;
  std::size_t m = 0;
  double rho = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double mean_solve_time = 0.0;
};

/// Mean solve time per method at m = max(m_list), rho = max(rho_grid).
std::vector<TimingRow> bench_timing(const ExperimentConfig& config, std::size_t workers = 1);

void write_timing_csv(std::ostream& os, const std::vector<TimingRow>& rows);

struct DynamicsSettings {
  double nu_over_hbar = 1e10;
  double gamma = 1e3;
  double omega0 = 1e-2;
  /// Scan [0, t_max]; 0 picks t_max with gamma t_max^2 = 1e-4 rad.
  double t_max = 0.0;
  std::size_t points = 100000;
  /// 0 picks sqrt((1 - tau) / (tau^2 + tau)).
  double filter_eps = 0.0;
  /// Steps for the RK4 cross-check; 0 disables it.
  std::size_t ode_steps = 0;
};

struct DynamicsResult {
  qdynamics::ScanReport scan;
  double filter_eps = 0.0;
  double t_max = 0.0;
  /// Max componentwise |closed form - RK4| over the integrated trajectory.
  std::optional<double> ode_max_deviation;
  std::optional<double> ode_unitarity_drift;
};

DynamicsResult run_dynamics(const DynamicsSettings& settings);

}  // namespace querloc::experiment
