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

#include "querloc/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

#include "querloc/csv.hpp"
#include "querloc/error.hpp"
#include "querloc/ranging.hpp"

namespace querloc::experiment {

namespace {

constexpr std::uint64_t kTruthStream = 0x7275746800000000ULL;

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kMain: return "main";
    case ExperimentKind::kSameAnchor: return "same-anchor";
    case ExperimentKind::kMimic: return "mimic";
    case ExperimentKind::kDynamics: return "dynamics";
    case ExperimentKind::kBench: return "bench";
  }
  return "unknown";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kQuerLoc: return "QuERLoc";
    case Method::kMultilaterationGd: return "Multilateration+GD";
    case Method::kTdoaChan: return "TDoA-Chan";
    case Method::kQuerLocSim: return "QuERLoc-sim";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) {
  for (auto k : {ExperimentKind::kMain, ExperimentKind::kSameAnchor, ExperimentKind::kMimic,
                 ExperimentKind::kDynamics, ExperimentKind::kBench}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view name) {
  for (auto m : {Method::kQuerLoc, Method::kMultilaterationGd, Method::kTdoaChan, Method::kQuerLocSim}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<Method> default_methods(ExperimentKind kind) {
  if (kind == ExperimentKind::kMimic) return {Method::kQuerLoc, Method::kQuerLocSim};
  return {Method::kQuerLoc, Method::kMultilaterationGd, Method::kTdoaChan};
}

std::vector<double> make_rho_grid(double rho_max, double rho_step) {
  if (!(rho_step > 0.0) || !(rho_max >= 0.0)) {
    throw Error(ErrorKind::kConfig, "rho grid needs rho_max >= 0 and rho_step > 0");
  }
  const auto steps = static_cast<std::size_t>(std::floor(rho_max / rho_step + 1e-9));
  std::vector<double> grid;
  grid.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) grid.push_back(static_cast<double>(k) * rho_step);
  return grid;
}

AnchorSet ExperimentConfig::anchors() const {
  if (anchor_topology == "table1") return table1_anchors(kappa_a());
  return AnchorSet(anchor_list);
}

Scenario ExperimentConfig::scenario() const { return Scenario(anchors(), kappa_s, kappa_a()); }

std::vector<Method> ExperimentConfig::active_methods() const {
  return methods.empty() ? default_methods(kind) : methods;
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) throw Error(ErrorKind::kConfig, "a seed is required");
  return *seed;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kConfig, msg); };
  if (d != 2 && d != 3) fail("d must be 2 or 3");
  if (!(kappa_s > 0.0)) fail("kappa_s must be positive");
  if (!(kappa_a_ratio > 0.0)) fail("kappa_a_ratio must be positive");
  if (anchor_topology == "table1") {
    if (d != 3) fail("the table1 anchor topology is three-dimensional");
    if (n != 10) fail("the table1 anchor topology has n = 10 anchors");
  } else if (anchor_topology == "literal") {
    if (anchor_list.size() != n) fail("anchor list length differs from n");
    for (const auto& a : anchor_list) {
      if (a.dim() != d) fail("anchor dimension differs from d");
    }
  } else {
    fail("unknown anchor topology '" + anchor_topology + "'");
  }
  if (m_list.empty()) fail("m list is empty");
  if (trials == 0) fail("trials must be positive");
  for (double rho : rho_grid) {
    if (!(rho >= 0.0 && rho < 1.0)) fail("rho values must lie in [0, 1)");
  }
  if (rho_grid.empty()) fail("rho grid is empty");
  try {
    (void)scenario();
  } catch (const Error& e) {
    fail(e.what());
  }
  const bool same_anchor = kind == ExperimentKind::kSameAnchor;
  for (std::size_t m : m_list) {
    if (m == 0) fail("m must be positive");
    for (Method method : active_methods()) {
      const bool pairwise = method == Method::kQuerLoc || method == Method::kQuerLocSim;
      const std::size_t need = (pairwise || same_anchor) ? 2 * m : m;
      if (need > n) {
        fail("method " + std::string(to_string(method)) + " with m = " + std::to_string(m) + " needs " +
             std::to_string(need) + " anchors, have " + std::to_string(n));
      }
    }
  }
}

std::vector<Position> sample_positions(const ExperimentConfig& config, Rng& rng) {
  std::vector<Position> out;
  out.reserve(config.trials);
  const auto d = static_cast<Eigen::Index>(config.d);
  for (std::size_t t = 0; t < config.trials; ++t) {
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.uniform(0.0, config.kappa_s);
    out.emplace_back(v);
  }
  return out;
}

std::vector<Position> campaign_truths(const ExperimentConfig& config) {
  Rng rng = Rng::derive(config.require_seed(), {kTruthStream});
  return sample_positions(config, rng);
}

Rng trial_stream(std::uint64_t seed, Method method, std::size_t m, double rho, std::size_t trial) {
  return Rng::derive(seed, {static_cast<std::uint64_t>(method) + 1, m, std::bit_cast<std::uint64_t>(rho), trial});
}

namespace {

// Everything a trial needs that does not change between trials of a cell.
struct CellContext {
  const ExperimentConfig& config;
  AnchorSet anchors;
  std::vector<ProbeScheme> schemes;
  localize::GdOptions gd;
};

std::vector<double> quer_readouts(const CellContext& ctx, Method method, const Position& truth,
                                  const ranging::NoiseModel& noise, Rng& rng) {
  std::vector<double> lambdas;
  lambdas.reserve(ctx.schemes.size());
  for (const auto& scheme : ctx.schemes) {
    if (method == Method::kQuerLoc) {
      lambdas.push_back(ranging::perturb_lambda(ranging::quer_lambda(truth, ctx.anchors, scheme), noise, rng));
    } else {
      lambdas.push_back(ranging::mimic_classical_lambda(truth, ctx.anchors, scheme, noise, rng));
    }
  }
  return lambdas;
}

TrialOutcome run_trial_in(const CellContext& ctx, Method method, std::size_t m, double rho,
                          const Position& truth, std::size_t trial, Rng& rng) {
  const ExperimentConfig& config = ctx.config;
  const ranging::NoiseModel noise(rho);
  const std::string name(to_string(method));
  const std::size_t baseline_anchors = config.kind == ExperimentKind::kSameAnchor ? 2 * m : m;

  try {
    switch (method) {
      case Method::kQuerLoc:
      case Method::kQuerLocSim: {
        const auto lambdas = quer_readouts(ctx, method, truth, noise, rng);
        const auto start = std::chrono::steady_clock::now();
        auto sys = localize::build_linear_system(ctx.anchors, ctx.schemes, lambdas, config.kappa_s);
        const auto est = localize::wls_solve(sys);
        const double elapsed = seconds_since(start);
        return {metrics::TrialRecord::success(trial, truth, est.x_hat, elapsed, name, rho, m), std::move(sys)};
      }
      case Method::kMultilaterationGd: {
        const auto used = ctx.anchors.first(baseline_anchors);
        std::vector<double> ranges;
        ranges.reserve(used.size());
        for (const auto& a : used) ranges.push_back(ranging::perturb_distance(distance(truth, a), noise, rng));
        const auto start = std::chrono::steady_clock::now();
        const auto init = localize::multilateration_init(used, ranges, {.allow_underdetermined = true});
        const auto est = localize::gd_refine(init.x_hat, used, ranges, ctx.gd);
        const double elapsed = seconds_since(start);
        return {metrics::TrialRecord::success(trial, truth, est.x_hat, elapsed, name, rho, m), std::nullopt};
      }
      case Method::kTdoaChan: {
        const auto used = ctx.anchors.first(baseline_anchors);
        std::vector<double> ranges;
        ranges.reserve(used.size());
        for (const auto& a : used) ranges.push_back(ranging::perturb_distance(distance(truth, a), noise, rng));
        const auto start = std::chrono::steady_clock::now();
        std::vector<double> differences;
        differences.reserve(used.size() - 1);
        for (std::size_t i = 1; i < ranges.size(); ++i) differences.push_back(ranges[i] - ranges[0]);
        const auto est = localize::tdoa_chan_solve(used, differences, {.allow_underdetermined = true});
        const double elapsed = seconds_since(start);
        return {metrics::TrialRecord::success(trial, truth, est.x_hat, elapsed, name, rho, m), std::nullopt};
      }
    }
  } catch (const Error&) {
    // Counted as a failure and excluded from the error statistics.
  }
  return {metrics::TrialRecord::failure(trial, truth, name, rho, m), std::nullopt};
}

CellContext make_context(const ExperimentConfig& config, std::size_t m) {
  CellContext ctx{config, config.anchors(), {}, localize::GdOptions::for_scale(config.kappa_s)};
  if (2 * m <= ctx.anchors.size()) ctx.schemes = default_scheme_list(m, ctx.anchors.size());
  return ctx;
}

}  // namespace

double quer_crlb(const ExperimentConfig& config, std::size_t m, double rho, std::span<const Position> truths) {
  if (!(rho > 0.0)) throw Error(ErrorKind::kUndefinedInformation, "the bound needs rho > 0");
  const std::uint64_t seed = config.require_seed();
  const CellContext ctx = make_context(config, m);
  (void)default_scheme_list(m, ctx.anchors.size());
  const ranging::NoiseModel noise(rho);
  std::vector<localize::LinearSystem> systems;
  systems.reserve(truths.size());
  for (std::size_t t = 0; t < truths.size(); ++t) {
    Rng rng = trial_stream(seed, Method::kQuerLoc, m, rho, t);
    const auto lambdas = quer_readouts(ctx, Method::kQuerLoc, truths[t], noise, rng);
    systems.push_back(localize::build_linear_system(ctx.anchors, ctx.schemes, lambdas, config.kappa_s));
  }
  return metrics::crlb_rmse_bound(systems, rho);
}

TrialOutcome run_trial(const ExperimentConfig& config, Method method, std::size_t m, double rho,
                       const Position& truth, std::size_t trial, Rng& rng) {
  if (method == Method::kQuerLoc || method == Method::kQuerLocSim) {
    (void)default_scheme_list(m, config.anchors().size());
  }
  return run_trial_in(make_context(config, m), method, m, rho, truth, trial, rng);
}

std::size_t CampaignResult::total_trials() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.row.trials;
  return n;
}

std::size_t CampaignResult::total_failures() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.row.failures;
  return n;
}

const Cell* CampaignResult::find(Method method, std::size_t m, double rho) const {
  for (const auto& c : cells) {
    if (c.row.method == to_string(method) && c.row.m == m && std::abs(c.row.rho - rho) < 1e-12) return &c;
  }
  return nullptr;
}

CampaignResult run_campaign(const ExperimentConfig& config, const RunOptions& opts) {
  config.validate();
  const std::uint64_t seed = config.require_seed();
  const std::vector<Position> truths = campaign_truths(config);

  CampaignResult result;
  result.experiment = std::string(to_string(config.kind));
  const auto methods = config.active_methods();

  for (Method method : methods) {
    for (std::size_t m : config.m_list) {
      const CellContext ctx = make_context(config, m);
      for (const double rho : config.rho_grid) {
        std::vector<TrialOutcome> outcomes(config.trials);
        parallel_for(config.trials, opts.workers, [&](std::size_t t) {
          Rng rng = trial_stream(seed, method, m, rho, t);
          outcomes[t] = run_trial_in(ctx, method, m, rho, truths[t], t, rng);
        });

        Cell cell;
        cell.row.experiment = result.experiment;
        cell.row.method = std::string(to_string(method));
        cell.row.m = m;
        cell.row.rho = rho;
        cell.row.trials = config.trials;
        cell.records.reserve(outcomes.size());
        double time_sum = 0.0;
        std::size_t successes = 0;
        for (auto& o : outcomes) {
          if (o.record.failed) {
            ++cell.row.failures;
          } else {
            ++successes;
            time_sum += o.record.solve_time;
          }
          cell.records.push_back(std::move(o.record));
        }
        if (successes > 0) {
          cell.row.rmse = metrics::rmse(cell.records);
          if (opts.record_timing) cell.row.mean_solve_time = time_sum / static_cast<double>(successes);
        }
        if (method == Method::kQuerLoc && rho > 0.0) {
          try {
            cell.row.crlb = quer_crlb(config, m, rho, truths);
          } catch (const Error&) {
            cell.row.crlb.reset();
          }
        }
        result.cells.push_back(std::move(cell));
      }
    }
  }
  return result;
}

void write_results_csv(std::ostream& os, const CampaignResult& result) {
  csv::write_row(os, {"experiment", "method", "m", "rho", "trials", "failures", "rmse", "crlb",
                      "mean_solve_time_s"});
  for (const auto& cell : result.cells) {
    const auto& r = cell.row;
    const auto m = std::to_string(r.m);
    const auto rho = csv::format_double(r.rho);
    const auto trials = std::to_string(r.trials);
    const auto failures = std::to_string(r.failures);
    const auto rmse = csv::format_optional(r.rmse);
    const auto crlb = csv::format_optional(r.crlb);
    const auto time = csv::format_optional(r.mean_solve_time);
    csv::write_row(os, {r.experiment, r.method, m, rho, trials, failures, rmse, crlb, time});
  }
}

void write_errors_csv(std::ostream& os, const CampaignResult& result) {
  csv::write_row(os, {"experiment", "method", "m", "rho", "trial", "error"});
  for (const auto& cell : result.cells) {
    const auto m = std::to_string(cell.row.m);
    const auto rho = csv::format_double(cell.row.rho);
    for (const auto& rec : cell.records) {
      const auto trial = std::to_string(rec.trial);
      const auto err = rec.failed ? std::string() : csv::format_double(rec.error);
      csv::write_row(os, {result.experiment, cell.row.method, m, rho, trial, err});
    }
  }
}

std::vector<TimingRow> bench_timing(const ExperimentConfig& config, std::size_t workers) {
  ExperimentConfig bench = config;
  bench.m_list = {*std::max_element(config.m_list.begin(), config.m_list.end())};
  bench.rho_grid = {*std::max_element(config.rho_grid.begin(), config.rho_grid.end())};
  if (bench.kind == ExperimentKind::kBench || bench.kind == ExperimentKind::kDynamics) {
    bench.kind = ExperimentKind::kMain;
  }
  const auto result = run_campaign(bench, {.workers = workers, .record_timing = true});
  std::vector<TimingRow> rows;
  for (const auto& cell : result.cells) {
    rows.push_back(TimingRow{cell.row.method, cell.row.m, cell.row.rho, cell.row.trials, cell.row.failures,
                             cell.row.mean_solve_time.value_or(0.0)});
  }
  return rows;
}

void write_timing_csv(std::ostream& os, const std::vector<TimingRow>& rows) {
  csv::write_row(os, {"method", "m", "rho", "trials", "failures", "mean_solve_time_s"});
  for (const auto& r : rows) {
    const auto m = std::to_string(r.m);
    const auto rho = csv::format_double(r.rho);
    const auto trials = std::to_string(r.trials);
    const auto failures = std::to_string(r.failures);
    const auto time = csv::format_double(r.mean_solve_time);
    csv::write_row(os, {r.method, m, rho, trials, failures, time});
  }
}

DynamicsResult run_dynamics(const DynamicsSettings& settings) {
  const qdynamics::TwoLevelParams params(settings.nu_over_hbar, settings.gamma, settings.omega0);
  DynamicsResult out;
  out.t_max = settings.t_max > 0.0 ? settings.t_max : std::sqrt(1e-4 / settings.gamma);
  out.filter_eps = settings.filter_eps > 0.0 ? settings.filter_eps : std::sqrt(params.approximation_scale());
  if (!(out.filter_eps < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "filter_eps must lie in (0, 1); pass it explicitly");
  }
  const auto grid = qdynamics::uniform_grid(0.0, out.t_max, settings.points);
  out.scan = qdynamics::phase_discrepancy_scan(params, grid, out.filter_eps);

  if (settings.ode_steps > 0) {
    const std::size_t stride = std::max<std::size_t>(1, settings.ode_steps / 10000);
    const auto traj = qdynamics::integrate_two_level(params, out.t_max, settings.ode_steps, {stride});
    double worst = 0.0;
    for (const auto& pt : traj) {
      const auto exact = qdynamics::closed_form_state(params, pt.t);
      worst = std::max({worst, std::abs(exact.c0 - pt.state.c0), std::abs(exact.c1 - pt.state.c1)});
    }
    out.ode_max_deviation = worst;
    out.ode_unitarity_drift = std::abs(traj.back().state.norm_sq() - 1.0);
  }
  return out;
}

}  // namespace querloc::experiment
