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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "querloc/cli.hpp"
#include "querloc/experiment.hpp"
#include "querloc/metrics.hpp"
#include "querloc/qsim.hpp"

namespace {

using namespace querloc;
using experiment::ExperimentConfig;
using experiment::ExperimentKind;
using experiment::Method;

constexpr std::uint64_t kSeed = 42;

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig base_config(ExperimentKind kind, std::size_t trials) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.trials = trials;
  cfg.seed = kSeed;
  return cfg;
}

double cell_rmse(const experiment::CampaignResult& r, Method method, std::size_t m, double rho) {
  const auto* cell = r.find(method, m, rho);
  if (cell == nullptr || !cell->row.rmse) return std::numeric_limits<double>::quiet_NaN();
  return *cell->row.rmse;
}

Verdict zero_noise_exactness() {
  const auto start = std::chrono::steady_clock::now();
  auto cfg = base_config(ExperimentKind::kMain, 1000);
  cfg.m_list = {3};
  cfg.rho_grid = {0.0};
  cfg.methods = {Method::kQuerLoc};
  const auto r = experiment::run_campaign(cfg, {.workers = workers()});
  const double elapsed = seconds_since(start);
  const auto& records = r.cells.at(0).records;
  double worst = 0.0;
  bool any_failed = false;
  for (const auto& rec : records) {
    any_failed = any_failed || rec.failed;
    worst = std::max(worst, rec.error);
  }
  const bool pass = !any_failed && records.size() == 1000 && worst <= 1e-9 * cfg.kappa_s && elapsed < 5.0;
  return {pass, fmt("max error %.3e (limit %.1e), failures %zu, %.2f s", worst, 1e-9 * cfg.kappa_s,
                    r.total_failures(), elapsed)};
}

Verdict crlb_saturation() {
  const auto start = std::chrono::steady_clock::now();
  auto cfg = base_config(ExperimentKind::kMain, 10000);
  cfg.m_list = {5};
  cfg.rho_grid = {0.01};
  cfg.methods = {Method::kQuerLoc};
  const auto r = experiment::run_campaign(cfg, {.workers = workers()});
  const double elapsed = seconds_since(start);
  const auto& cell = r.cells.at(0);
  const double rmse = cell.row.rmse.value_or(std::numeric_limits<double>::quiet_NaN());
  const double bound = cell.row.crlb.value_or(std::numeric_limits<double>::quiet_NaN());
  const double se = metrics::rmse_standard_error(cell.records);
  const double upper = 1.05 * bound + 3.0 * se;
  const bool pass = rmse >= bound && rmse <= upper && elapsed < 60.0;
  return {pass, fmt("rmse %.6g in [%.6g, %.6g] (se %.3g), %.2f s", rmse, bound, upper, se, elapsed)};
}

Verdict baseline_dominance() {
  const auto start = std::chrono::steady_clock::now();
  auto cfg = base_config(ExperimentKind::kMain, 10000);
  cfg.rho_grid = {0.05};
  const auto r = experiment::run_campaign(cfg, {.workers = workers()});
  const double elapsed = seconds_since(start);
  bool pass = elapsed < 300.0;
  std::string detail;
  for (std::size_t m : cfg.m_list) {
    const double q = cell_rmse(r, Method::kQuerLoc, m, 0.05);
    const double best = std::min(cell_rmse(r, Method::kMultilaterationGd, m, 0.05), cell_rmse(r, Method::kTdoaChan, m, 0.05));
    const double ratio = q / best;
    pass = pass && ratio <= 0.35;
    detail += fmt("m=%zu ratio %.3f; ", m, ratio);
  }
  return {pass, detail + fmt("%.2f s", elapsed)};
}

Verdict same_anchor() {
  auto cfg = base_config(ExperimentKind::kSameAnchor, 10000);
  cfg.m_list = {5};
  cfg.rho_grid = {0.05};
  cfg.methods = {Method::kQuerLoc, Method::kMultilaterationGd};
  const auto r = experiment::run_campaign(cfg, {.workers = workers()});
  const double q = cell_rmse(r, Method::kQuerLoc, 5, 0.05);
  const double b = cell_rmse(r, Method::kMultilaterationGd, 5, 0.05);
  return {q <= 0.5 * b, fmt("QuERLoc %.4g vs Multilateration+GD %.4g (ratio %.3f)", q, b, q / b)};
}

Verdict mimic_degradation() {
  auto cfg = base_config(ExperimentKind::kMimic, 10000);
  cfg.rho_grid = experiment::make_rho_grid(0.05, 0.005);
  cfg.rho_grid.erase(cfg.rho_grid.begin());  // the grid starts at 0.5%
  const auto r = experiment::run_campaign(cfg, {.workers = workers()});
  bool pass = true;
  double worst_ratio = std::numeric_limits<double>::infinity();
  std::string at_max;
  for (std::size_t m : cfg.m_list) {
    for (double rho : cfg.rho_grid) {
      const double ratio = cell_rmse(r, Method::kQuerLocSim, m, rho) / cell_rmse(r, Method::kQuerLoc, m, rho);
      pass = pass && ratio > 1.0;
      worst_ratio = std::min(worst_ratio, ratio);
      if (rho == cfg.rho_grid.back()) {
        pass = pass && ratio >= 1.2;
        at_max += fmt("m=%zu %.3f; ", m, ratio);
      }
    }
  }
  return {pass, fmt("min sim/QuERLoc ratio %.3f; at 5%%: ", worst_ratio) + at_max};
}

Verdict phase_approximation() {
  const auto start = std::chrono::steady_clock::now();
  const auto res = experiment::run_dynamics({});
  const double elapsed = seconds_since(start);
  const double disc = res.scan.max_unfiltered_discrepancy;
  const double frac = res.scan.filtered_fraction();
  const bool pass = res.scan.points.size() == 100000 && disc <= 5e-10 && frac <= 1e-4 && elapsed < 10.0;
  return {pass, fmt("max discrepancy %.3e, filtered fraction %.2e, %.2f s", disc, frac, elapsed)};
}

Verdict dynamics_oracle() {
  experiment::DynamicsSettings s;
  s.nu_over_hbar = 50.0;
  s.gamma = 1.0;
  s.omega0 = 1.0;
  s.t_max = 1.0;
  s.points = 1000;
  s.ode_steps = 100000;
  const auto res = experiment::run_dynamics(s);
  const double dev = res.ode_max_deviation.value_or(std::numeric_limits<double>::infinity());
  const double drift = res.ode_unitarity_drift.value_or(std::numeric_limits<double>::infinity());
  return {dev <= 1e-6 && drift <= 1e-9, fmt("max deviation %.3e, unitarity drift %.3e", dev, drift)};
}

Verdict quantum_oracle() {
  qsim::VerificationOptions opts;
  opts.instances = 1000;
  opts.max_qubits = 6;
  opts.estimator_runs = 100;
  opts.shots = 1000000;
  const auto rep = qsim::run_verification(opts);
  return {rep.passed() && rep.instances == 1000,
          fmt("phase %.2e, povm %.2e, norm %.2e, estimator %zu/%zu in band", rep.max_phase_deviation,
              rep.max_povm_deviation, rep.max_norm_deviation, rep.estimator_within_band, rep.estimator_runs)};
}

Verdict timing_ordering() {
  auto cfg = base_config(ExperimentKind::kBench, 10000);
  cfg.rho_grid = {0.05};
  const auto rows = experiment::bench_timing(cfg, 1);
  double quer = 0.0, ml = 0.0, fastest_other = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    if (row.method == experiment::to_string(Method::kQuerLoc)) {
      quer = row.mean_solve_time;
    } else {
      fastest_other = std::min(fastest_other, row.mean_solve_time);
      if (row.method == experiment::to_string(Method::kMultilaterationGd)) ml = row.mean_solve_time;
    }
  }
  const bool pass = quer > 0.0 && ml > 0.0 && quer < fastest_other && quer <= 0.2 * ml;
  return {pass, fmt("QuERLoc %.3g s, fastest baseline %.3g s, Multilateration+GD %.3g s (ratio %.3f)", quer,
                    fastest_other, ml, quer / ml)};
}

Verdict determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "querloc_acceptance_determinism";
  fs::remove_all(root);
  auto run = [&](const std::string& sub, std::size_t w) {
    const std::string dir = (root / sub).string();
    const std::string wstr = std::to_string(w);
    const char* argv[] = {"querloc", "simulate", "--experiment", "main", "--seed", "42",
                          "--out-dir", dir.c_str(), "--workers", wstr.c_str()};
    std::ostringstream out, err;
    return querloc::cli::run(static_cast<int>(std::size(argv)), argv, out, err);
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::size_t many = std::max<std::size_t>(workers(), 3);
  const int c1 = run("a", 1);
  const int c2 = run("b", many);
  const auto ra = slurp(root / "a" / "results.csv"), rb = slurp(root / "b" / "results.csv");
  const auto ea = slurp(root / "a" / "errors.csv"), eb = slurp(root / "b" / "errors.csv");
  fs::remove_all(root);
  const bool pass = c1 == 0 && c2 == 0 && !ra.empty() && !ea.empty() && ra == rb && ea == eb;
  return {pass, fmt("workers 1 vs %zu: results %s, errors %s (%zu bytes)", many, ra == rb ? "identical" : "differ",
                    ea == eb ? "identical" : "differ", ea.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"zero-noise exactness", zero_noise_exactness},
      {"CRLB saturation", crlb_saturation},
      {"baseline dominance", baseline_dominance},
      {"same-anchor advantage", same_anchor},
      {"mimic degradation", mimic_degradation},
      {"phase approximation", phase_approximation},
      {"dynamics oracle", dynamics_oracle},
      {"quantum oracle", quantum_oracle},
      {"timing ordering", timing_ordering},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
