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

#include "querloc/qdynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <type_traits>

#include "querloc/csv.hpp"
#include "querloc/error.hpp"

namespace querloc::qdynamics {

using cplx = std::complex<double>;

// The expansion weights are real by construction.
static_assert(std::is_same_v<decltype(ExpansionCoefficients::a0), double>);
static_assert(std::is_same_v<decltype(ExpansionCoefficients::b1), double>);

double wrap_phase(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(radians, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

namespace {

// 1 - tau without cancellation: 1 - tau = (1 + 1/(S + 2g)) / (1 + S).
double one_minus_tau(double g, double splitting) {
  return (1.0 + 1.0 / (splitting + 2.0 * g)) / (1.0 + splitting);
}

}  // namespace

TwoLevelParams::TwoLevelParams(double nu_over_hbar, double gamma, double omega0)
    : nu_over_hbar_(nu_over_hbar), gamma_(gamma), omega0_(omega0) {
  if (!(nu_over_hbar > 0.0) || !(gamma > 0.0) || !(omega0 > 0.0) || !std::isfinite(nu_over_hbar) ||
      !std::isfinite(gamma) || !std::isfinite(omega0)) {
    throw Error(ErrorKind::kInvalidArgument, "nu/hbar, gamma and omega0 must be positive and finite");
  }
  splitting_ = std::hypot(1.0, 2.0 * nu_over_hbar_);
  tau_ = 2.0 * nu_over_hbar_ / (1.0 + splitting_);
}

double TwoLevelParams::approximation_scale() const {
  return one_minus_tau(nu_over_hbar_, splitting_) / (tau_ * tau_ + tau_);
}

ExpansionCoefficients expansion_coefficients(const TwoLevelParams& p) {
  const double tau = p.tau();
  const double omt = one_minus_tau(p.nu_over_hbar(), p.splitting());
  const double k = 1.0 / (std::numbers::sqrt2 * (1.0 + tau * tau));
  return ExpansionCoefficients{
      .a0 = -tau * omt * k,
      .b0 = (1.0 + tau) * k,
      .a1 = omt * k,
      .b1 = tau * (1.0 + tau) * k,
  };
}

namespace {

// Slowly varying factors a_j + b_j e^{i Delta}; the fast carrier is split off.
struct Envelope {
  cplx e0;
  cplx e1;
};

Envelope envelope(const TwoLevelParams& p, const ExpansionCoefficients& ab, double t) {
  const cplx rot = std::polar(1.0, p.delta(t));
  return {ab.a0 + ab.b0 * rot, ab.a1 + ab.b1 * rot};
}

}  // namespace

CoefficientPair closed_form_state(const TwoLevelParams& p, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "t must be non-negative");
  const auto ab = expansion_coefficients(p);
  const auto env = envelope(p, ab, t);
  const double phi = p.accumulated_phase(t);
  const double upper = 0.5 * (1.0 + p.splitting());
  return {std::polar(1.0, upper * phi) * env.e0, std::polar(1.0, (upper - 1.0) * phi) * env.e1};
}

double relative_phase(const TwoLevelParams& p, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "t must be non-negative");
  const auto env = envelope(p, expansion_coefficients(p), t);
  if (std::abs(env.e0) < 1e-12 || std::abs(env.e1) < 1e-12) {
    throw Error(ErrorKind::kAmplitudeDegenerate, "probe amplitude vanishes at t=" + std::to_string(t));
  }
  // Carriers contribute -(gamma t^2 + omega0 t); the e^{-/+ i omega0 t/2}
  // basis factors add back omega0 t.
  const double carrier = -p.gamma() * t * t;
  return wrap_phase(carrier + std::arg(env.e1) - std::arg(env.e0));
}

std::vector<TrajectoryPoint> integrate_two_level(const TwoLevelParams& p, double t_end,
                                                 std::size_t steps, IntegrateOptions opts) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorKind::kInvalidArgument, "t_end must be positive");
  }
  if (steps == 0) throw Error(ErrorKind::kResolution, "at least one step is required");
  const double h = t_end / static_cast<double>(steps);
  const double fastest_rate =
      0.5 * (1.0 + p.splitting()) * (2.0 * p.gamma() * t_end + p.omega0());
  if (fastest_rate * h >= 0.1) {
    throw Error(ErrorKind::kResolution, "step advances the fastest phase by " +
                                            std::to_string(fastest_rate * h) + " rad (limit 0.1)");
  }
  const std::size_t stride = std::max<std::size_t>(1, opts.record_stride);

  const double g = p.nu_over_hbar();
  auto rhs = [&](double t, const cplx& c0, const cplx& c1, cplx& d0, cplx& d1) {
    const double coupling = g * (2.0 * p.gamma() * t + p.omega0());
    const cplx carrier = std::polar(1.0, p.accumulated_phase(t));
    const cplx minus_i(0.0, -1.0);
    d0 = minus_i * coupling * carrier * c1;
    d1 = minus_i * coupling * std::conj(carrier) * c0;
  };

  std::vector<TrajectoryPoint> out;
  out.reserve(steps / stride + 2);
  cplx c0(std::numbers::sqrt2 / 2.0, 0.0);
  cplx c1 = c0;
  out.push_back({0.0, {c0, c1}});
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * h;
    cplx k0a, k1a, k0b, k1b, k0c, k1c, k0d, k1d;
    rhs(t, c0, c1, k0a, k1a);
    rhs(t + 0.5 * h, c0 + 0.5 * h * k0a, c1 + 0.5 * h * k1a, k0b, k1b);
    rhs(t + 0.5 * h, c0 + 0.5 * h * k0b, c1 + 0.5 * h * k1b, k0c, k1c);
    rhs(t + h, c0 + h * k0c, c1 + h * k1c, k0d, k1d);
    c0 += (h / 6.0) * (k0a + 2.0 * k0b + 2.0 * k0c + k0d);
    c1 += (h / 6.0) * (k1a + 2.0 * k1b + 2.0 * k1c + k1d);
    const std::size_t done = n + 1;
    if (done % stride == 0 || done == steps) {
      const double tn = (done == steps) ? t_end : static_cast<double>(done) * h;
      out.push_back({tn, {c0, c1}});
    }
  }
  return out;
}

double ScanReport::filtered_fraction() const {
  if (points.empty()) return 0.0;
  return static_cast<double>(filtered_count) / static_cast<double>(points.size());
}

ScanReport phase_discrepancy_scan(const TwoLevelParams& p, std::span<const double> t_grid,
                                  double filter_eps) {
  if (!(filter_eps > 0.0 && filter_eps < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "filter_eps must lie in (0, 1)");
  }
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
    throw Error(ErrorKind::kInvalidArgument, "t_grid must be sorted ascending");
  }
  ScanReport report;
  report.points.reserve(t_grid.size());
  for (double t : t_grid) {
    ScanPoint pt{};
    pt.t = t;
    pt.phase_real = relative_phase(p, t);
    const double law = p.gamma() * t * t;
    pt.phase_approx = wrap_phase(-law);
    pt.discrepancy = std::abs(wrap_phase(pt.phase_real + law));
    pt.filtered = std::abs(std::cos(p.delta(t))) <= filter_eps;
    if (pt.filtered) {
      ++report.filtered_count;
    } else {
      report.max_unfiltered_discrepancy = std::max(report.max_unfiltered_discrepancy, pt.discrepancy);
    }
    report.points.push_back(pt);
  }
  return report;
}

std::vector<double> uniform_grid(double t_min, double t_max, std::size_t points) {
  std::vector<double> grid;
  if (points == 0) return grid;
  grid.reserve(points);
  if (points == 1) {
    grid.push_back(t_min);
    return grid;
  }
  const double span = t_max - t_min;
  for (std::size_t i = 0; i < points; ++i) {
    grid.push_back(t_min + span * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return grid;
}

void write_dynamics_csv(std::ostream& os, const ScanReport& report) {
  csv::write_row(os, {"t", "phase_real", "phase_approx", "abs_discrepancy", "filtered"});
  for (const auto& pt : report.points) {
    const auto t = csv::format_double(pt.t);
    const auto real = csv::format_double(pt.phase_real);
    const auto approx = csv::format_double(pt.phase_approx);
    const auto disc = csv::format_double(pt.discrepancy);
    csv::write_row(os, {t, real, approx, disc, pt.filtered ? "1" : "0"});
  }
}

}  // namespace querloc::qdynamics
