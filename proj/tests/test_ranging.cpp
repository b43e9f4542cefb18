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

#include <cmath>
#include <numbers>

#include "querloc/error.hpp"
#include "querloc/qdynamics.hpp"
#include "querloc/qsim.hpp"
#include "querloc/ranging.hpp"

namespace querloc::ranging {
namespace {

AnchorSet pair_anchors() { return AnchorSet({Position{0, 0, 0}, Position{50, 0, 0}}); }
const ProbeScheme kPair{{1, +1}, {2, -1}};

struct Moments {
  double mean;
  double stddev;
};

template <typename Draw>
Moments sample_moments(int n, Draw draw) {
  double s1 = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = draw();
    s1 += v;
    s2 += v * v;
  }
  const double mean = s1 / n;
  return {mean, std::sqrt(s2 / n - mean * mean)};
}

TEST(QuerLambda, VanishesForEquidistantSensor) {
  EXPECT_DOUBLE_EQ(quer_lambda(Position{25, 7, -3}, pair_anchors(), kPair), 0.0);
}

TEST(QuerLambda, HandEvaluatedPair) {
  EXPECT_DOUBLE_EQ(quer_lambda(Position{10, 20, 30}, pair_anchors(), kPair), -1500.0);
}

TEST(QuerLambda, RejectsInvalidScheme) {
  EXPECT_THROW((void)quer_lambda(Position{1, 2, 3}, pair_anchors(), ProbeScheme{{1, +1}, {2, +1}}), Error);
}

TEST(QuerLambda, TranslationInvariant) {
  Rng rng(17);
  const auto anchors = table1_anchors(50.0);
  const auto schemes = default_scheme_list(5, 10);
  for (int trial = 0; trial < 200; ++trial) {
    Vec v(3);
    for (int i = 0; i < 3; ++i) v(i) = rng.uniform(-1000.0, 1000.0);
    std::vector<Position> shifted;
    for (const auto& a : anchors.all()) shifted.push_back(translated(a, v));
    const AnchorSet moved(shifted);
    const Position x{rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 100)};
    for (const auto& s : schemes) {
      const double base = quer_lambda(x, anchors, s);
      EXPECT_NEAR(quer_lambda(translated(x, v), moved, s), base, 1e-8 * (1.0 + std::abs(base)));
    }
  }
}

TEST(QuerLambda, AgreesWithStatevectorBranchPhase) {
  // Small c keeps chi of order tens of radians so the comparison is sharp.
  const PhysicalConstants k(0.5, 40.0);
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t members = 2 * (1 + trial % 3);
    std::vector<Position> pts;
    for (std::size_t i = 0; i < members; ++i) {
      pts.push_back(Position{rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(0, 50)});
    }
    const AnchorSet anchors(pts);
    std::vector<SchemeMember> m;
    for (std::size_t i = 0; i < members; ++i) m.push_back({i + 1, i % 2 == 0 ? +1 : -1});
    const ProbeScheme scheme(m);
    const Position x{rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 100)};

    std::vector<double> times;
    for (std::size_t i = 1; i <= members; ++i) times.push_back(k.time_of_flight(distance(x, anchors.at(i))));
    const auto state = qsim::apply_phase_evolution(qsim::prepare_probe(scheme), times, k.gamma);
    const double phase = qsim::branch_relative_phase(state, qsim::BranchPattern::from_scheme(scheme));

    const double lambda = quer_lambda(x, anchors, scheme);
    const double diff = qdynamics::wrap_phase(phase - chi_from_lambda(lambda, k));
    ASSERT_NEAR(diff, 0.0, 1e-9) << "trial " << trial;
  }
}

TEST(Outcome, LambdaChiConversionIsExact) {
  const PhysicalConstants k(1e3, 3e8);
  const auto o = make_outcome(-1500.0, 2, k);
  EXPECT_EQ(o.scheme_id, 2u);
  EXPECT_DOUBLE_EQ(o.chi, 4.0 * 1e3 * -1500.0 / 9e16);
  EXPECT_NEAR(lambda_from_chi(o.chi, k), -1500.0, 1e-9);
}

TEST(NoiseModel, RejectsOutOfRange) {
  EXPECT_THROW(NoiseModel(-0.1), Error);
  EXPECT_THROW(NoiseModel(1.0), Error);
  EXPECT_NO_THROW(NoiseModel(0.0));
}

TEST(PerturbLambda, ZeroNoiseAndZeroSignal) {
  Rng rng(1);
  EXPECT_EQ(perturb_lambda(-1500.0, NoiseModel(0.0), rng), -1500.0);
  EXPECT_EQ(perturb_lambda(0.0, NoiseModel(0.05), rng), 0.0);
}

TEST(PerturbLambda, MonteCarloMoments) {
  Rng rng(2);
  const NoiseModel noise(0.05);
  const auto m = sample_moments(100000, [&] { return perturb_lambda(-1500.0, noise, rng); });
  EXPECT_NEAR(m.mean, -1500.0, 15.0);
  EXPECT_NEAR(m.stddev, 75.0, 75.0 * 0.03);
}

TEST(Mimic, ZeroNoiseEqualsQuerLambda) {
  Rng rng(3);
  const Position x{10, 20, 30};
  EXPECT_DOUBLE_EQ(mimic_classical_lambda(x, pair_anchors(), kPair, NoiseModel(0.0), rng),
                   quer_lambda(x, pair_anchors(), kPair));
}

TEST(Mimic, ForcedRelativeErrors) {
  const std::vector<double> deltas{0.1, -0.1};
  EXPECT_NEAR(mimic_classical_lambda(Position{10, 20, 30}, pair_anchors(), kPair, deltas), -655.0, 1e-9);
  const std::vector<double> wrong{0.1};
  EXPECT_THROW((void)mimic_classical_lambda(Position{10, 20, 30}, pair_anchors(), kPair, wrong), Error);
}

TEST(Mimic, VarianceExceedsQuerReadout) {
  Rng a(4);
  Rng b(5);
  const NoiseModel noise(0.05);
  const Position x{10, 20, 30};
  const auto quer = sample_moments(100000, [&] { return perturb_lambda(quer_lambda(x, pair_anchors(), kPair), noise, a); });
  const auto mimic = sample_moments(100000, [&] { return mimic_classical_lambda(x, pair_anchors(), kPair, noise, b); });
  EXPECT_GT(mimic.stddev, quer.stddev);
}

TEST(PerturbDistance, MomentsAndEdges) {
  Rng rng(6);
  EXPECT_EQ(perturb_distance(100.0, NoiseModel(0.0), rng), 100.0);
  EXPECT_EQ(perturb_distance(0.0, NoiseModel(0.05), rng), 0.0);
  EXPECT_THROW((void)perturb_distance(-1.0, NoiseModel(0.05), rng), Error);
  const NoiseModel noise(0.05);
  const auto m = sample_moments(100000, [&] { return perturb_distance(100.0, noise, rng); });
  EXPECT_NEAR(m.stddev, 5.0, 5.0 * 0.03);
}

TEST(SignalMaps, TextbookMappings) {
  EXPECT_DOUBLE_EQ(toa_time(150.0, 3e8), 1e-6);
  EXPECT_DOUBLE_EQ(tdoa_time(40.0, 40.0, 3e8), 0.0);
  EXPECT_NEAR(rssi_power(20.0, 1.0, 1.0, 1.0, 0.125) / rssi_power(10.0, 1.0, 1.0, 1.0, 0.125), 0.25, 1e-15);
  EXPECT_NEAR(aoa_phase(1.0, 0.0, 0.5), 4.0 * std::numbers::pi, 1e-15);
  const auto maps = classical_signal_maps(150.0, 90.0, SignalParams{});
  EXPECT_DOUBLE_EQ(maps.toa_time, 1e-6);
  EXPECT_DOUBLE_EQ(maps.tdoa_time, 60.0 / 3e8);
}

TEST(SignalMaps, TdoaNeedsPairedDistance) {
  try {
    (void)classical_signal_maps(150.0, std::nullopt, SignalParams{});
    FAIL() << "expected a missing-argument error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingArgument);
  }
}

}  // namespace
}  // namespace querloc::ranging
