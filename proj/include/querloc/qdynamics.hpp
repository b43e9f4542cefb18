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

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace querloc::qdynamics {

/// Wraps an angle into (-pi, pi].
double wrap_phase(double radians);

/// Field and coupling parameters of the controlled two-level probe:
/// eps(t) = nu (2 gamma t + omega0), theta(t) = gamma t^2. Only the ratio
/// nu/hbar enters the dynamics.
class TwoLevelParams {
 public:
  TwoLevelParams(double nu_over_hbar, double gamma, double omega0);

  double nu_over_hbar() const { return nu_over_hbar_; }
  double gamma() const { return gamma_; }
  double omega0() const { return omega0_; }

  /// sqrt(1 + 4 nu^2/hbar^2)
  double splitting() const { return splitting_; }
  /// (2 nu/hbar) / (1 + sqrt(1 + 4 nu^2/hbar^2)), in (0, 1).
  double tau() const { return tau_; }
  /// (1 - tau) / (tau^2 + tau), the scale of the gamma t^2 approximation error.
  double approximation_scale() const;

  /// gamma t^2 + omega0 t
  double accumulated_phase(double t) const { return gamma_ * t * t + omega0_ * t; }
  /// Delta(t) = -sqrt(1 + 4 nu^2/hbar^2) (gamma t^2 + omega0 t)
  double delta(double t) const { return -splitting_ * accumulated_phase(t); }

 private:
  double nu_over_hbar_;
  double gamma_;
  double omega0_;
  double splitting_;
  double tau_;
};

struct CoefficientPair {
  std::complex<double> c0;
  std::complex<double> c1;

  double norm_sq() const { return std::norm(c0) + std::norm(c1); }
};

/// Real expansion weights of the closed-form solution
///   c_0(t) = A0 e^{i(1+S)/2 phi} + B0 e^{i(1-S)/2 phi}
///   c_1(t) = A1 e^{i(-1+S)/2 phi} + B1 e^{i(-1-S)/2 phi}
/// with phi = gamma t^2 + omega0 t and S = sqrt(1 + 4 nu^2/hbar^2).
struct ExpansionCoefficients {
  double a0;
  double b0;
  double a1;
  double b1;
};

ExpansionCoefficients expansion_coefficients(const TwoLevelParams& p);

/// Exact coefficients c_0(t), c_1(t) for the initial state (1/sqrt2, 1/sqrt2).
CoefficientPair closed_form_state(const TwoLevelParams& p, double t);

/// Phase of the |1> amplitude relative to the |0> amplitude of the full
/// state c_0 e^{-i omega0 t/2}|0> + c_1 e^{i omega0 t/2}|1>, wrapped to
/// (-pi, pi]. Tends to -gamma t^2 as tau -> 1.
///
/// Throws Error(kAmplitudeDegenerate) when |c_0| or |c_1| < 1e-12.
double relative_phase(const TwoLevelParams& p, double t);

struct TrajectoryPoint {
  double t;
  CoefficientPair state;
};

struct IntegrateOptions {
  /// Keep every `record_stride`-th step (the final step is always kept).
  std::size_t record_stride = 1;
};

/// Classical fixed-step RK4 on the coupled coefficient equations
///   dc0/dt = -i (nu/hbar)(2 gamma t + omega0) e^{+i phi(t)} c1
///   dc1/dt = -i (nu/hbar)(2 gamma t + omega0) e^{-i phi(t)} c0
/// starting from (1/sqrt2, 1/sqrt2).
///
/// Throws Error(kResolution) when the fastest coefficient phase would advance
/// 0.1 rad or more in one step.
std::vector<TrajectoryPoint> integrate_two_level(const TwoLevelParams& p, double t_end,
                                                 std::size_t steps, IntegrateOptions opts = {});

struct ScanPoint {
  double t;
  double phase_real;    // relative_phase(t)
  double phase_approx;  // wrap(-gamma t^2)
  double discrepancy;   // |wrap(phase_real + gamma t^2)|
  bool filtered;        // |cos Delta(t)| <= filter_eps
};

struct ScanReport {
  std::vector<ScanPoint> points;
  double max_unfiltered_discrepancy = 0.0;
  std::size_t filtered_count = 0;

  double filtered_fraction() const;
};

ScanReport phase_discrepancy_scan(const TwoLevelParams& p, std::span<const double> t_grid,
                                  double filter_eps);

/// Uniform grid of `points` samples over [t_min, t_max] inclusive.
std::vector<double> uniform_grid(double t_min, double t_max, std::size_t points);

/// Writes `t,phase_real,phase_approx,abs_discrepancy,filtered`.
void write_dynamics_csv(std::ostream& os, const ScanReport& report);

}  // namespace querloc::qdynamics
