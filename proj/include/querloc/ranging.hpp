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

#include "querloc/model.hpp"
#include "querloc/rng.hpp"

namespace querloc::ranging {

/// One QuER readout: lambda = sum_i w_i d_i^2 and the equivalent relative
/// phase chi = 4 gamma lambda / c^2.
struct RangingOutcome {
  double lambda;
  double chi;
  std::size_t scheme_id;
};

double lambda_from_chi(double chi, const PhysicalConstants& k);
double chi_from_lambda(double lambda, const PhysicalConstants& k);
RangingOutcome make_outcome(double lambda, std::size_t scheme_id, const PhysicalConstants& k);

/// Relative multiplicative noise: value * (1 + delta), delta ~ N(0, rho^2).
class NoiseModel {
 public:
  explicit NoiseModel(double rho = 0.0);
  double rho() const { return rho_; }

 private:
  double rho_;
};

/// sum_{i in I_k} w_{i,k} ||x - a_i||^2
double quer_lambda(const Position& x, const AnchorSet& anchors, const ProbeScheme& scheme);

double perturb_lambda(double lambda, const NoiseModel& noise, Rng& rng);

/// Classical imitation of one QuER ranging: each distance is perturbed
/// independently, then squared and combined with the scheme signs.
double mimic_classical_lambda(const Position& x, const AnchorSet& anchors, const ProbeScheme& scheme,
                              const NoiseModel& noise, Rng& rng);
/// Same combination with caller-supplied relative errors, one per member.
double mimic_classical_lambda(const Position& x, const AnchorSet& anchors, const ProbeScheme& scheme,
                              std::span<const double> deltas);

double perturb_distance(double d, const NoiseModel& noise, Rng& rng);

struct SignalParams {
  double aoa_theta = 0.0;       // incidence angle, rad
  double wavelength = 0.125;    // m
  double speed = 3e8;           // m/s
  double tx_power = 1.0;        // W
  double tx_gain = 1.0;
  double rx_gain = 1.0;
};

struct SignalMaps {
  double aoa_phase;   // 2 pi cos(theta) d_i / wavelength
  double toa_time;    // 2 d_i / v
  double tdoa_time;   // |d_i - d_j| / v
  double rssi_power;  // P G_t G_r wavelength^2 / (16 pi^2 d_i^2)
};

double aoa_phase(double d, double theta, double wavelength);
double toa_time(double d, double speed);
double tdoa_time(double d_i, double d_j, double speed);
double rssi_power(double d, double tx_power, double tx_gain, double rx_gain, double wavelength);

/// Throws Error(kMissingArgument) when d_j is absent (TDoA needs a pair).
SignalMaps classical_signal_maps(double d_i, std::optional<double> d_j, const SignalParams& params);

}  // namespace querloc::ranging
