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

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "querloc/error.hpp"
#include "querloc/experiment.hpp"

namespace querloc::experiment {
namespace {

ExperimentConfig small_config(std::size_t trials, ExperimentKind kind = ExperimentKind::kMain) {
  ExperimentConfig cfg;
  cfg.trials = trials;
  cfg.seed = 42;
  cfg.kind = kind;
  return cfg;
}

std::string results_text(const CampaignResult& r) {
  std::ostringstream os;
  write_results_csv(os, r);
  return os.str();
}

std::string errors_text(const CampaignResult& r) {
  std::ostringstream os;
  write_errors_csv(os, r);
  return os.str();
}

TEST(Names, RoundTrip) {
  for (auto k : {ExperimentKind::kMain, ExperimentKind::kSameAnchor, ExperimentKind::kMimic,
                 ExperimentKind::kDynamics, ExperimentKind::kBench}) {
    EXPECT_EQ(parse_kind(to_string(k)), k);
  }
  for (auto m : {Method::kQuerLoc, Method::kMultilaterationGd, Method::kTdoaChan, Method::kQuerLocSim}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_FALSE(parse_kind("other").has_value());
  EXPECT_FALSE(parse_method("SDP").has_value());
}

TEST(Config, DefaultsMatchStandardProtocol) {
  const ExperimentConfig cfg;
  EXPECT_EQ(cfg.d, 3u);
  EXPECT_EQ(cfg.kappa_s, 100.0);
  EXPECT_EQ(cfg.kappa_a(), 50.0);
  EXPECT_EQ(cfg.n, 10u);
  EXPECT_EQ(cfg.m_list, (std::vector<std::size_t>{3, 4, 5}));
  EXPECT_EQ(cfg.trials, 10000u);
  ASSERT_EQ(cfg.rho_grid.size(), 11u);
  EXPECT_EQ(cfg.rho_grid.front(), 0.0);
  EXPECT_DOUBLE_EQ(cfg.rho_grid.back(), 0.05);
  EXPECT_EQ(cfg.active_methods().size(), 3u);
  EXPECT_FALSE(cfg.seed.has_value());
  EXPECT_THROW((void)cfg.require_seed(), Error);
}

TEST(Config, ValidationCatchesInconsistencies) {
  auto expect_config_error = [](const ExperimentConfig& cfg) {
    try {
      cfg.validate();
      FAIL() << "expected a config error";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    }
  };
  auto cfg = small_config(10);
  EXPECT_NO_THROW(cfg.validate());
  cfg.m_list = {6};
  expect_config_error(cfg);
  cfg = small_config(10, ExperimentKind::kSameAnchor);
  cfg.m_list = {6};
  expect_config_error(cfg);
  cfg = small_config(10);
  cfg.rho_grid = {1.0};
  expect_config_error(cfg);
  cfg = small_config(10);
  cfg.n = 8;
  expect_config_error(cfg);
  cfg = small_config(10);
  cfg.d = 2;
  expect_config_error(cfg);
  cfg = small_config(0);
  expect_config_error(cfg);
}

TEST(Config, LiteralTwoDimensionalAnchors) {
  auto cfg = small_config(50);
  cfg.d = 2;
  cfg.n = 4;
  cfg.anchor_topology = "literal";
  cfg.anchor_list = {Position{0, 0}, Position{50, 0}, Position{0, 50}, Position{50, 50}};
  cfg.m_list = {2};
  cfg.rho_grid = {0.0};
  cfg.methods = {Method::kQuerLoc, Method::kMultilaterationGd, Method::kTdoaChan};
  const auto r = run_campaign(cfg);
  ASSERT_EQ(r.cells.size(), 3u);
  EXPECT_LE(*r.find(Method::kQuerLoc, 2, 0.0)->row.rmse, 1e-9 * cfg.kappa_s);
}

TEST(RhoGrid, EvenlySpacedFromZero) {
  const auto g = make_rho_grid(0.05, 0.005);
  ASSERT_EQ(g.size(), 11u);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(g[k], 0.005 * static_cast<double>(k));
  EXPECT_THROW((void)make_rho_grid(0.05, 0.0), Error);
}

TEST(SamplePositions, DeterministicBoundedAndUniform) {
  auto cfg = small_config(10000);
  Rng a(9);
  Rng b(9);
  const auto p = sample_positions(cfg, a);
  const auto q = sample_positions(cfg, b);
  ASSERT_EQ(p.size(), 10000u);
  double sum[3] = {0, 0, 0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    ASSERT_EQ(p[i].coords(), q[i].coords());
    for (std::size_t k = 0; k < 3; ++k) {
      ASSERT_GE(p[i][k], 0.0);
      ASSERT_LE(p[i][k], cfg.kappa_s);
      sum[k] += p[i][k];
    }
    ASSERT_LE(p[i].inf_norm(), cfg.kappa_s);
  }
  for (double s : sum) EXPECT_NEAR(s / 10000.0, 50.0, 0.5);
}

TEST(RunTrial, NoiseFreeExactness) {
  const auto cfg = small_config(1);
  Rng pos(1);
  for (int t = 0; t < 50; ++t) {
    const Position x{pos.uniform(0, 100), pos.uniform(0, 100), pos.uniform(0, 100)};
    Rng r1(t);
    const auto q = run_trial(cfg, Method::kQuerLoc, 3, 0.0, x, t, r1);
    ASSERT_FALSE(q.record.failed);
    EXPECT_LE(q.record.error, 1e-9 * cfg.kappa_s);
    Rng r2(t);
    const auto c = run_trial(cfg, Method::kTdoaChan, 5, 0.0, x, t, r2);
    ASSERT_FALSE(c.record.failed);
    EXPECT_LE(c.record.error, 1e-8 * cfg.kappa_s);
  }
}

TEST(RunTrial, SameStreamSameRecord) {
  const auto cfg = small_config(1);
  const Position x{12, 34, 56};
  for (auto method : {Method::kQuerLoc, Method::kMultilaterationGd, Method::kTdoaChan, Method::kQuerLocSim}) {
    Rng a = trial_stream(7, method, 4, 0.03, 11);
    Rng b = trial_stream(7, method, 4, 0.03, 11);
    const auto ra = run_trial(cfg, method, 4, 0.03, x, 11, a).record;
    const auto rb = run_trial(cfg, method, 4, 0.03, x, 11, b).record;
    EXPECT_EQ(ra.estimate.coords(), rb.estimate.coords());
    EXPECT_EQ(ra.error, rb.error);
  }
}

TEST(Campaign, CardinalityAndAccounting) {
  const auto r = run_campaign(small_config(20));
  EXPECT_EQ(r.cells.size(), 3u * 3u * 11u);
  for (const auto& c : r.cells) {
    EXPECT_EQ(c.row.trials, 20u);
    EXPECT_EQ(c.records.size(), 20u);
    const auto failed = std::count_if(c.records.begin(), c.records.end(), [](const auto& rec) { return rec.failed; });
    EXPECT_EQ(static_cast<std::size_t>(failed), c.row.failures);
    EXPECT_EQ(c.row.crlb.has_value(), c.row.method == "QuERLoc" && c.row.rho > 0.0);
    EXPECT_FALSE(c.row.mean_solve_time.has_value());
  }
}

TEST(Campaign, MethodsShareGroundTruth) {
  const auto r = run_campaign(small_config(30));
  const auto* q = r.find(Method::kQuerLoc, 4, 0.02);
  const auto* g = r.find(Method::kMultilaterationGd, 4, 0.02);
  const auto* c = r.find(Method::kTdoaChan, 4, 0.02);
  ASSERT_TRUE(q && g && c);
  for (std::size_t t = 0; t < 30; ++t) {
    EXPECT_EQ(q->records[t].truth.coords(), g->records[t].truth.coords());
    EXPECT_EQ(q->records[t].truth.coords(), c->records[t].truth.coords());
  }
}

TEST(Campaign, IndependentOfWorkerCountAndMethodOrder) {
  auto cfg = small_config(200);
  cfg.rho_grid = {0.0, 0.01, 0.05};
  const auto one = run_campaign(cfg, {.workers = 1});
  const auto many = run_campaign(cfg, {.workers = 7});
  EXPECT_EQ(results_text(one), results_text(many));
  EXPECT_EQ(errors_text(one), errors_text(many));

  cfg.methods = {Method::kTdoaChan, Method::kQuerLoc, Method::kMultilaterationGd};
  const auto reordered = run_campaign(cfg, {.workers = 3});
  for (const auto& cell : reordered.cells) {
    const auto method = *parse_method(cell.row.method);
    const auto* ref = one.find(method, cell.row.m, cell.row.rho);
    ASSERT_NE(ref, nullptr);
    EXPECT_EQ(cell.row.rmse, ref->row.rmse);
  }
}

TEST(Campaign, CellIndependentOfRestOfGrid) {
  auto cfg = small_config(100);
  cfg.m_list = {4};
  cfg.rho_grid = {0.0, 0.02, 0.04};
  const auto full = run_campaign(cfg);
  cfg.rho_grid = {0.04};
  const auto single = run_campaign(cfg);
  EXPECT_EQ(full.find(Method::kQuerLoc, 4, 0.04)->row.rmse, single.find(Method::kQuerLoc, 4, 0.04)->row.rmse);
  EXPECT_EQ(full.find(Method::kTdoaChan, 4, 0.04)->row.rmse, single.find(Method::kTdoaChan, 4, 0.04)->row.rmse);
}

TEST(Campaign, CsvHeaders) {
  auto cfg = small_config(5);
  cfg.rho_grid = {0.01};
  cfg.m_list = {3};
  const auto r = run_campaign(cfg);
  const auto res = results_text(r);
  const auto err = errors_text(r);
  EXPECT_EQ(res.substr(0, res.find('\n')), "experiment,method,m,rho,trials,failures,rmse,crlb,mean_solve_time_s");
  EXPECT_EQ(err.substr(0, err.find('\n')), "experiment,method,m,rho,trial,error");
  EXPECT_EQ(std::count(res.begin(), res.end(), '\n'), 1 + 3);
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1 + 3 * 5);
  EXPECT_NE(res.find("main,QuERLoc,3,0.01,5,0,"), std::string::npos);
}

TEST(Campaign, MimicRestrictsMethodsAndCoincidesWithoutNoise) {
  auto cfg = small_config(100, ExperimentKind::kMimic);
  cfg.rho_grid = {0.0, 0.03};
  const auto r = run_campaign(cfg);
  for (const auto& cell : r.cells) EXPECT_TRUE(cell.row.method == "QuERLoc" || cell.row.method == "QuERLoc-sim");
  for (std::size_t m : {3u, 4u, 5u}) {
    const auto* q = r.find(Method::kQuerLoc, m, 0.0);
    const auto* s = r.find(Method::kQuerLocSim, m, 0.0);
    for (std::size_t t = 0; t < 100; ++t) {
      EXPECT_LE(q->records[t].error, 1e-9 * cfg.kappa_s);
      EXPECT_LE(s->records[t].error, 1e-9 * cfg.kappa_s);
    }
    EXPECT_GT(*r.find(Method::kQuerLocSim, m, 0.03)->row.rmse, *r.find(Method::kQuerLoc, m, 0.03)->row.rmse);
  }
}

TEST(Campaign, SameAnchorModeDoublesBaselineRangings) {
  auto cfg = small_config(50, ExperimentKind::kSameAnchor);
  cfg.rho_grid = {0.0};
  cfg.m_list = {3};
  const auto r = run_campaign(cfg);
  // Six anchors fully determine the position, unlike the three of the main mode.
  EXPECT_LE(*r.find(Method::kMultilaterationGd, 3, 0.0)->row.rmse, 1e-8 * cfg.kappa_s);
  EXPECT_LE(*r.find(Method::kTdoaChan, 3, 0.0)->row.rmse, 1e-8 * cfg.kappa_s);
  EXPECT_EQ(r.experiment, "same-anchor");
}

TEST(Campaign, QuerLocBeatsBaselinesAtHighNoise) {
  auto cfg = small_config(2000);
  cfg.rho_grid = {0.05};
  cfg.m_list = {5};
  const auto r = run_campaign(cfg, {.workers = 4});
  const double q = *r.find(Method::kQuerLoc, 5, 0.05)->row.rmse;
  EXPECT_LT(q, *r.find(Method::kMultilaterationGd, 5, 0.05)->row.rmse);
  EXPECT_LT(q, *r.find(Method::kTdoaChan, 5, 0.05)->row.rmse);
}

TEST(Campaign, CrlbColumnMatchesStandaloneBound) {
  auto cfg = small_config(300);
  cfg.rho_grid = {0.01, 0.02};
  cfg.m_list = {5};
  const auto r = run_campaign(cfg);
  const auto truths = campaign_truths(cfg);
  for (double rho : cfg.rho_grid) {
    EXPECT_EQ(*r.find(Method::kQuerLoc, 5, rho)->row.crlb, quer_crlb(cfg, 5, rho, truths));
  }
  const double b1 = quer_crlb(cfg, 5, 0.01, truths);
  const double b2 = quer_crlb(cfg, 5, 0.02, truths);
  EXPECT_NEAR(b2 / b1, 2.0, 0.05);
  EXPECT_THROW((void)quer_crlb(cfg, 5, 0.0, truths), Error);
}

TEST(Bench, OneRowPerMethodWithPositiveTimes) {
  auto cfg = small_config(200);
  const auto rows = bench_timing(cfg);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.m, 5u);
    EXPECT_DOUBLE_EQ(row.rho, 0.05);
    EXPECT_GT(row.mean_solve_time, 0.0);
  }
  std::ostringstream os;
  write_timing_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "method,m,rho,trials,failures,mean_solve_time_s");
}

TEST(Dynamics, DefaultScanAndModerateOracle) {
  const auto r = run_dynamics({});
  EXPECT_LE(r.scan.max_unfiltered_discrepancy, 5e-10);
  EXPECT_LE(r.scan.filtered_fraction(), 1e-4);
  EXPECT_FALSE(r.ode_max_deviation.has_value());

  const auto m = run_dynamics({.nu_over_hbar = 50.0, .gamma = 1.0, .omega0 = 1.0, .t_max = 1.0, .points = 100,
                               .filter_eps = 0.05, .ode_steps = 200000});
  EXPECT_EQ(m.scan.points.size(), 100u);
  ASSERT_TRUE(m.ode_max_deviation.has_value());
  EXPECT_LE(*m.ode_max_deviation, 1e-6);
  EXPECT_LE(*m.ode_unitarity_drift, 1e-9);
}

}  // namespace
}  // namespace querloc::experiment
