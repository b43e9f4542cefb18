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

#include "querloc/ranging.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "querloc/error.hpp"

namespace querloc::ranging {

double lambda_from_chi(double chi, const PhysicalConstants& k) { return k.c * k.c * chi / (4.0 * k.gamma); }

double chi_from_lambda(double lambda, const PhysicalConstants& k) { return 4.0 * k.gamma * lambda / (k.c * k.c); }

RangingOutcome make_outcome(double lambda, std::size_t scheme_id, const PhysicalConstants& k) {
  return {lambda, chi_from_lambda(lambda, k), scheme_id};
}

NoiseModel::NoiseModel(double rho) : rho_(rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorKind::kInvalidArgument, "rho must lie in [0, 1)");
}

namespace {

void require_valid(const ProbeScheme& scheme, const AnchorSet& anchors) {
  const auto report = validate_scheme(scheme, anchors.size());
  if (!report.ok()) throw Error(ErrorKind::kInvalidScheme, report.message());
}

}  // namespace

double quer_lambda(const Position& x, const AnchorSet& anchors, const ProbeScheme& scheme) {
  require_valid(scheme, anchors);
  double lambda = 0.0;
  for (const auto& m : scheme.members()) {
    lambda += m.sign * (x.coords() - anchors.at(m.anchor).coords()).squaredNorm();
  }
  return lambda;
}

double perturb_lambda(double lambda, const NoiseModel& noise, Rng& rng) {
  return lambda * (1.0 + noise.rho() * rng.normal());
}

double mimic_classical_lambda(const Position& x, const AnchorSet& anchors, const ProbeScheme& scheme,
                              const NoiseModel& noise, Rng& rng) {
  require_valid(scheme, anchors);
  double lambda = 0.0;
  for (const auto& m : scheme.members()) {
    const double d = perturb_distance(distance(x, anchors.at(m.anchor)), noise, rng);
    lambda += m.sign * d * d;
  }
  return lambda;
}

double mimic_classical_lambda(const Position& x, const AnchorSet& anchors, const ProbeScheme& scheme,
                              std::span<const double> deltas) {
  require_valid(scheme, anchors);
  if (deltas.size() != scheme.size()) {
    throw Error(ErrorKind::kLengthMismatch, "one relative error per scheme member is required");
  }
  double lambda = 0.0;
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    const auto& m = scheme.members()[i];
    const double d = distance(x, anchors.at(m.anchor)) * (1.0 + deltas[i]);
    lambda += m.sign * d * d;
  }
  return lambda;
}

double perturb_distance(double d, const NoiseModel& noise, Rng& rng) {
  if (!(d >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "distance must be non-negative");
  return d * (1.0 + noise.rho() * rng.normal());
}

double aoa_phase(double d, double theta, double wavelength) {
  return 2.0 * std::numbers::pi * std::cos(theta) / wavelength * d;
}

double toa_time(double d, double speed) { return 2.0 * d / speed; }

double tdoa_time(double d_i, double d_j, double speed) { return std::abs(d_i - d_j) / speed; }

double rssi_power(double d, double tx_power, double tx_gain, double rx_gain, double wavelength) {
  return tx_power * tx_gain * rx_gain * wavelength * wavelength /
         (16.0 * std::numbers::pi * std::numbers::pi * d * d);
}

SignalMaps classical_signal_maps(double d_i, std::optional<double> d_j, const SignalParams& params) {
  if (!d_j) throw Error(ErrorKind::kMissingArgument, "TDoA needs the paired distance d_j");
  if (!(params.wavelength > 0.0) || !(params.speed > 0.0) || !(params.tx_power > 0.0) ||
      !(params.tx_gain > 0.0) || !(params.rx_gain > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "signal parameters must be positive");
  }
  return SignalMaps{
      .aoa_phase = aoa_phase(d_i, params.aoa_theta, params.wavelength),
      .toa_time = toa_time(d_i, params.speed),
      .tdoa_time = tdoa_time(d_i, *d_j, params.speed),
      .rssi_power = rssi_power(d_i, params.tx_power, params.tx_gain, params.rx_gain, params.wavelength),
  };
}

}  // namespace querloc::ranging
