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

#include "querloc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "querloc/config.hpp"
#include "querloc/csv.hpp"
#include "querloc/error.hpp"
#include "querloc/experiment.hpp"
#include "querloc/qsim.hpp"

namespace querloc::cli {

namespace {

namespace fs = std::filesystem;
using experiment::ExperimentConfig;
using experiment::ExperimentKind;

// Raised for flag combinations CLI11 cannot express; reported like a parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CampaignFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string experiment;
  std::string m;
  std::optional<double> rho_max;
  std::optional<double> rho_step;
  std::string rho;
  std::optional<std::size_t> trials;
  std::string methods;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  double failure_threshold = 0.01;
  bool timing = false;
};

void add_campaign_flags(CLI::App* sub, CampaignFlags& f) {
  sub->add_option("--config", f.config_path, "key=value configuration file")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "campaign seed");
  sub->add_option("--out-dir", f.out_dir, "directory for CSV output");
  sub->add_option("--experiment", f.experiment, "main | same-anchor | mimic");
  sub->add_option("--m", f.m, "comma-separated ranging counts, e.g. 3,4,5");
  sub->add_option("--rho-max", f.rho_max, "largest relative noise level");
  sub->add_option("--rho-step", f.rho_step, "noise grid spacing");
  sub->add_option("--rho", f.rho, "explicit comma-separated noise levels");
  sub->add_option("--trials", f.trials, "trials per cell");
  sub->add_option("--methods", f.methods, "comma-separated method names");
  sub->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve_config(const CampaignFlags& f) {
  ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = config::load_config_file(f.config_path, cfg);
  if (f.seed) cfg.seed = f.seed;
  if (!f.experiment.empty()) {
    const auto kind = experiment::parse_kind(f.experiment);
    if (!kind) throw UsageError("unknown experiment '" + f.experiment + "'");
    cfg.kind = *kind;
  }
  if (!f.m.empty()) cfg.m_list = config::parse_size_list(f.m);
  if (!f.rho.empty()) {
    if (f.rho_max || f.rho_step) throw UsageError("--rho excludes --rho-max/--rho-step");
    cfg.rho_grid = config::parse_double_list(f.rho);
  } else if (f.rho_max || f.rho_step) {
    cfg.rho_grid = experiment::make_rho_grid(f.rho_max.value_or(0.05), f.rho_step.value_or(0.005));
  }
  if (f.trials) cfg.trials = *f.trials;
  if (!f.methods.empty()) cfg.methods = config::parse_method_list(f.methods);
  if (!cfg.seed) throw UsageError("--seed is required");
  return cfg;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::kConfig, "cannot write '" + path.string() + "'");
  return os;
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kConfig, "cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

int simulate(const CampaignFlags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = resolve_config(f);
  if (cfg.kind == ExperimentKind::kDynamics || cfg.kind == ExperimentKind::kBench) {
    throw UsageError("experiment '" + std::string(experiment::to_string(cfg.kind)) +
                     "' has its own subcommand");
  }
  cfg.validate();
  const fs::path dir = prepare_out_dir(f.out_dir);
  auto results_os = open_output(dir / "results.csv");
  auto errors_os = open_output(dir / "errors.csv");

  const auto result = experiment::run_campaign(cfg, {.workers = f.workers, .record_timing = f.timing});
  experiment::write_results_csv(results_os, result);
  experiment::write_errors_csv(errors_os, result);
  results_os.close();
  errors_os.close();
  if (!results_os || !errors_os) throw Error(ErrorKind::kConfig, "failed writing CSV output");

  out << "experiment " << result.experiment << ": " << result.cells.size() << " cells, "
      << result.total_trials() << " trials, " << result.total_failures() << " failures\n";
  out << "wrote " << (dir / "results.csv").string() << " and " << (dir / "errors.csv").string() << "\n";

  int code = kExitOk;
  for (const auto& cell : result.cells) {
    const double rate = static_cast<double>(cell.row.failures) / static_cast<double>(cell.row.trials);
    if (rate > f.failure_threshold) {
      err << "failure rate " << rate << " above " << f.failure_threshold << " for " << cell.row.method
          << " m=" << cell.row.m << " rho=" << cell.row.rho << "\n";
      code = kExitFailure;
    }
  }
  return code;
}

int bench(const CampaignFlags& f, std::ostream& out) {
  ExperimentConfig cfg = resolve_config(f);
  if (cfg.kind == ExperimentKind::kDynamics || cfg.kind == ExperimentKind::kBench) cfg.kind = ExperimentKind::kMain;
  cfg.validate();
  const fs::path dir = prepare_out_dir(f.out_dir);
  auto os = open_output(dir / "timing.csv");
  const auto rows = experiment::bench_timing(cfg, f.workers);
  experiment::write_timing_csv(os, rows);
  experiment::write_timing_csv(out, rows);
  return kExitOk;
}

int crlb(const CampaignFlags& f, std::ostream& out) {
  ExperimentConfig cfg = resolve_config(f);
  // A generated grid always starts at 0, where the bound is undefined; drop it.
  if (f.rho.empty() && !cfg.rho_grid.empty() && cfg.rho_grid.front() == 0.0) {
    cfg.rho_grid.erase(cfg.rho_grid.begin());
  }
  if (cfg.rho_grid.empty()) throw UsageError("the bound needs at least one rho > 0");
  for (double rho : cfg.rho_grid) {
    if (!(rho > 0.0)) throw UsageError("the bound is undefined at rho = " + csv::format_double(rho));
  }
  cfg.methods = {experiment::Method::kQuerLoc};
  cfg.validate();
  const auto truths = experiment::campaign_truths(cfg);
  csv::write_row(out, {"m", "rho", "crlb"});
  for (std::size_t m : cfg.m_list) {
    for (double rho : cfg.rho_grid) {
      const auto ms = std::to_string(m);
      const auto rs = csv::format_double(rho);
      const auto bs = csv::format_double(experiment::quer_crlb(cfg, m, rho, truths));
      csv::write_row(out, {ms, rs, bs});
    }
  }
  return kExitOk;
}

struct DynamicsFlags {
  experiment::DynamicsSettings settings;
  std::optional<std::size_t> ode_steps;
  std::string out_dir = ".";
};

// Steps keeping the fastest coefficient phase below 5e-3 rad per step.
std::size_t auto_ode_steps(const experiment::DynamicsSettings& s, double t_max) {
  const qdynamics::TwoLevelParams p(s.nu_over_hbar, s.gamma, s.omega0);
  const double rate = 0.5 * (1.0 + p.splitting()) * (2.0 * s.gamma * t_max + s.omega0);
  return static_cast<std::size_t>(std::ceil(rate * t_max / 5e-3));
}

int dynamics_scan(DynamicsFlags& f, std::ostream& out) {
  constexpr std::size_t kMaxAutoSteps = 5'000'000;
  auto& s = f.settings;
  const double t_max = s.t_max > 0.0 ? s.t_max : std::sqrt(1e-4 / s.gamma);
  if (f.ode_steps) {
    s.ode_steps = *f.ode_steps;
  } else if (const auto steps = auto_ode_steps(s, t_max); steps <= kMaxAutoSteps) {
    s.ode_steps = std::max<std::size_t>(steps, 1000);
  }
  const fs::path dir = prepare_out_dir(f.out_dir);
  auto os = open_output(dir / "dynamics.csv");
  const auto result = experiment::run_dynamics(s);
  qdynamics::write_dynamics_csv(os, result.scan);

  out << "points " << result.scan.points.size() << "\n";
  out << "t_max " << csv::format_double(result.t_max) << "\n";
  out << "filter_eps " << csv::format_double(result.filter_eps) << "\n";
  out << "max_unfiltered_discrepancy " << csv::format_double(result.scan.max_unfiltered_discrepancy) << "\n";
  out << "filtered_fraction " << csv::format_double(result.scan.filtered_fraction()) << "\n";
  if (result.ode_max_deviation) {
    out << "ode_steps " << s.ode_steps << "\n";
    out << "ode_max_deviation " << csv::format_double(*result.ode_max_deviation) << "\n";
    out << "ode_unitarity_drift " << csv::format_double(*result.ode_unitarity_drift) << "\n";
  } else {
    out << "ode_check skipped (more than " << kMaxAutoSteps << " steps needed; pass --ode-steps to force)\n";
  }
  out << "wrote " << (dir / "dynamics.csv").string() << "\n";
  return kExitOk;
}

int verify_qsim(const qsim::VerificationOptions& opts, std::ostream& out) {
  const auto r = qsim::run_verification(opts);
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  out << "instances " << r.instances << "\n";
  out << verdict(r.phase_ok()) << " max_phase_deviation " << csv::format_double(r.max_phase_deviation) << "\n";
  out << verdict(r.povm_ok()) << " max_povm_deviation " << csv::format_double(r.max_povm_deviation) << "\n";
  out << verdict(r.norm_ok()) << " max_norm_deviation " << csv::format_double(r.max_norm_deviation) << "\n";
  out << verdict(r.estimator_ok()) << " estimator_within_band " << r.estimator_within_band << "/"
      << r.estimator_runs << " (band " << csv::format_double(r.estimator_band) << ")\n";
  out << (r.passed() ? "all checks passed" : "verification FAILED") << "\n";
  return r.passed() ? kExitOk : kExitFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum-enhanced ranging localization simulator", "querloc"};
  app.require_subcommand(1);

  CampaignFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo campaign; writes results.csv and errors.csv");
  add_campaign_flags(sim, sim_flags);
  sim->add_flag("--timing", sim_flags.timing, "record mean solve times (not reproducible)");
  sim->add_option("--failure-threshold", sim_flags.failure_threshold, "per-cell failure rate for exit code 2");

  CampaignFlags bench_flags;
  auto* bench_cmd = app.add_subcommand("bench", "mean solve time per method; writes timing.csv");
  add_campaign_flags(bench_cmd, bench_flags);

  CampaignFlags crlb_flags;
  auto* crlb_cmd = app.add_subcommand("crlb", "RMSE lower bound per (m, rho) for QuERLoc");
  add_campaign_flags(crlb_cmd, crlb_flags);

  DynamicsFlags dyn_flags;
  auto* dyn = app.add_subcommand("dynamics-scan", "relative-phase approximation scan; writes dynamics.csv");
  dyn->add_option("--nu-over-hbar", dyn_flags.settings.nu_over_hbar, "coupling ratio nu/hbar (1/s)");
  dyn->add_option("--gamma", dyn_flags.settings.gamma, "chirp rate (rad/s^2)");
  dyn->add_option("--omega0", dyn_flags.settings.omega0, "transition frequency (rad/s)");
  dyn->add_option("--t-max", dyn_flags.settings.t_max, "scan end time; default gives gamma t^2 = 1e-4");
  dyn->add_option("--points", dyn_flags.settings.points, "grid points")->check(CLI::Range(2ul, 100'000'000ul));
  dyn->add_option("--filter-eps", dyn_flags.settings.filter_eps, "|cos Delta| filter threshold");
  dyn->add_option("--ode-steps", dyn_flags.ode_steps, "RK4 steps for the integrator cross-check");
  dyn->add_option("--out-dir", dyn_flags.out_dir, "directory for dynamics.csv");

  qsim::VerificationOptions vopts;
  auto* ver = app.add_subcommand("verify-qsim", "randomized statevector and readout checks");
  ver->add_option("--instances", vopts.instances, "random probe instances");
  ver->add_option("--max-qubits", vopts.max_qubits, "largest probe size")->check(CLI::Range(2ul, qsim::kMaxQubits));
  ver->add_option("--seed", vopts.seed, "verification seed");
  ver->add_option("--runs", vopts.estimator_runs, "estimator runs");
  ver->add_option("--shots", vopts.shots, "shots per estimator run");
  ver->add_option("--chi", vopts.estimator_chi, "true phase for the estimator runs");
  ver->add_flag("--inject-fault", vopts.inject_fault, "corrupt one phase so the checks must fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) return simulate(sim_flags, out, err);
    if (*bench_cmd) return bench(bench_flags, out);
    if (*crlb_cmd) return crlb(crlb_flags, out);
    if (*dyn) return dynamics_scan(dyn_flags, out);
    if (*ver) return verify_qsim(vopts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace querloc::cli
