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

#include "querloc/localize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "querloc/error.hpp"

namespace querloc::localize {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double condition_number(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

/// Least squares with an explicit geometry check. Rank-deficient or
/// underdetermined systems either throw or fall back to the minimum-norm
/// solution.
Eigen::VectorXd solve_checked(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, bool min_norm_fallback,
                              const char* what) {
  const bool wide = a.rows() < a.cols();
  const double cond = wide ? std::numeric_limits<double>::infinity() : condition_number(a);
  if (wide || cond > kMaxCondition) {
    if (!min_norm_fallback) {
      throw Error(ErrorKind::kSingularGeometry,
                  std::string(what) + ": " + std::to_string(a.rows()) + " equations for " +
                      std::to_string(a.cols()) + " unknowns, condition number " + std::to_string(cond));
    }
    return a.completeOrthogonalDecomposition().solve(b);
  }
  return a.colPivHouseholderQr().solve(b);
}

void check_ranges(std::span<const Position> anchors, std::size_t ranges, std::size_t expected) {
  if (ranges != expected) {
    throw Error(ErrorKind::kLengthMismatch, "expected " + std::to_string(expected) + " ranges, got " +
                                                std::to_string(ranges));
  }
  if (anchors.empty()) throw Error(ErrorKind::kInsufficientAnchors, "no anchors given");
  const std::size_t d = anchors.front().dim();
  for (const auto& a : anchors) {
    if (a.dim() != d) throw Error(ErrorKind::kInvalidArgument, "anchors mix dimensions");
  }
}

}  // namespace

const char* to_string(SolverId id) {
  switch (id) {
    case SolverId::kWls: return "wls";
    case SolverId::kMultilateration: return "multilateration";
    case SolverId::kGradientDescent: return "gradient-descent";
    case SolverId::kTdoaChan: return "tdoa-chan";
  }
  return "unknown";
}

Eigen::VectorXd readout_weights(std::span<const double> lambdas, double length_scale) {
  const auto m = static_cast<Eigen::Index>(lambdas.size());
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(m);
  if (m == 0) return weights;

  std::vector<double> mags(lambdas.size());
  std::transform(lambdas.begin(), lambdas.end(), mags.begin(), [](double v) { return std::abs(v); });
  const double negligible = 1e-12 * length_scale * length_scale;
  const double largest = *std::max_element(mags.begin(), mags.end());
  if (largest < negligible) return weights;

  std::vector<double> sorted = mags;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  double reference = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  if (reference < negligible) reference = largest;
  const double floor = kWeightFloor * reference;

  for (Eigen::Index k = 0; k < m; ++k) {
    const double mag = std::max(mags[static_cast<std::size_t>(k)], floor);
    weights(k) = 1.0 / (mag * mag);
  }
  return weights;
}

LinearSystem build_linear_system(const AnchorSet& anchors, std::span<const ProbeScheme> schemes,
                                 std::span<const double> lambdas, double length_scale) {
  if (schemes.size() != lambdas.size()) {
    throw Error(ErrorKind::kLengthMismatch, std::to_string(schemes.size()) + " schemes but " +
                                                std::to_string(lambdas.size()) + " readouts");
  }
  if (schemes.empty()) throw Error(ErrorKind::kInvalidArgument, "at least one ranging is required");
  const auto m = static_cast<Eigen::Index>(schemes.size());
  const auto d = static_cast<Eigen::Index>(anchors.dim());

  LinearSystem sys;
  sys.L.resize(m, d);
  sys.h.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& scheme = schemes[static_cast<std::size_t>(k)];
    const auto report = validate_scheme(scheme, anchors.size());
    if (!report.ok()) throw Error(ErrorKind::kInvalidScheme, report.message());
    Vec u = Vec::Zero(d);
    double energy = 0.0;
    for (const auto& member : scheme.members()) {
      const Vec& a = anchors.at(member.anchor).coords();
      u += (2.0 * member.sign) * a;
      energy += member.sign * a.squaredNorm();
    }
    sys.L.row(k) = u.transpose();
    sys.h(k) = energy - lambdas[static_cast<std::size_t>(k)];
  }
  sys.weights = readout_weights(lambdas, length_scale);
  return sys;
}

double wls_objective(const LinearSystem& sys, const Vec& x) {
  const Eigen::VectorXd r = sys.L * x - sys.h;
  return (sys.weights.array() * r.array().square()).sum();
}

Estimate wls_solve(const LinearSystem& sys) {
  const auto start = Clock::now();
  if (sys.L.rows() < sys.L.cols()) {
    throw Error(ErrorKind::kSingularGeometry, "fewer rangings than dimensions");
  }
  const double cond = condition_number(sys.L);
  if (cond > kMaxCondition) {
    throw Error(ErrorKind::kSingularGeometry, "ranging matrix is rank deficient (condition number " +
                                                  std::to_string(cond) + ")");
  }
  const Eigen::VectorXd root_w = sys.weights.cwiseSqrt();
  const Eigen::MatrixXd a = root_w.asDiagonal() * sys.L;
  const Eigen::VectorXd b = root_w.cwiseProduct(sys.h);
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  Estimate est{Position(Vec(x)), SolverId::kWls, 0, 0.0, std::nullopt};
  est.solve_time = seconds_since(start);
  return est;
}

Estimate multilateration_init(std::span<const Position> anchors, std::span<const double> ranges,
                              MultilaterationOptions opts) {
  const auto start = Clock::now();
  check_ranges(anchors, ranges.size(), anchors.size());
  if (anchors.size() < 2) throw Error(ErrorKind::kInsufficientAnchors, "need at least two anchors");
  const auto d = static_cast<Eigen::Index>(anchors.front().dim());
  const auto rows = static_cast<Eigen::Index>(anchors.size() - 1);

  // Work relative to the first anchor, so |a_1| = 0.
  const Vec& origin = anchors.front().coords();
  Eigen::MatrixXd a(rows, d);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vec rel = anchors[static_cast<std::size_t>(i + 1)].coords() - origin;
    const double d1 = ranges[0];
    const double di = ranges[static_cast<std::size_t>(i + 1)];
    a.row(i) = 2.0 * rel.transpose();
    b(i) = d1 * d1 - di * di + rel.squaredNorm();
  }
  const Eigen::VectorXd x = solve_checked(a, b, opts.allow_underdetermined, "multilateration");
  Estimate est{Position(Vec(x + origin)), SolverId::kMultilateration, 0, 0.0, std::nullopt};
  est.solve_time = seconds_since(start);
  return est;
}

GdOptions GdOptions::for_scale(double kappa_s) {
  GdOptions opts;
  opts.grad_tol = 1e-9 * kappa_s;
  opts.length_scale = kappa_s;
  return opts;
}

double range_objective(const Vec& x, std::span<const Position> anchors, std::span<const double> ranges) {
  double f = 0.0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double r = (x - anchors[i].coords()).norm() - ranges[i];
    f += r * r;
  }
  return f;
}

Vec range_objective_gradient(const Vec& x, std::span<const Position> anchors, std::span<const double> ranges) {
  Vec g = Vec::Zero(x.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const Vec diff = x - anchors[i].coords();
    const double dist = diff.norm();
    if (dist == 0.0) continue;
    g += (2.0 * (dist - ranges[i]) / dist) * diff;
  }
  return g;
}

Estimate gd_refine(const Position& x0, std::span<const Position> anchors, std::span<const double> ranges,
                   const GdOptions& opts) {
  const auto start = Clock::now();
  check_ranges(anchors, ranges.size(), anchors.size());
  if (x0.dim() != anchors.front().dim()) throw Error(ErrorKind::kInvalidArgument, "x0 dimension mismatch");

  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-30;
  const double nudge = 1e-9 * opts.length_scale;

  Vec x = x0.coords();
  Vec best = x;
  double best_f = range_objective(x, anchors, ranges);
  std::size_t iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    for (const auto& a : anchors) {
      if ((x - a.coords()).norm() < 1e-12) x(0) += nudge;
    }
    const double f = range_objective(x, anchors, ranges);
    const Vec g = range_objective_gradient(x, anchors, ranges);
    const double g2 = g.squaredNorm();
    if (std::sqrt(g2) <= opts.grad_tol) break;

    double step = opts.initial_step;
    Vec trial = x - step * g;
    double f_trial = range_objective(trial, anchors, ranges);
    while (f_trial > f - kArmijo * step * g2 && step > kMinStep) {
      step *= 0.5;
      trial = x - step * g;
      f_trial = range_objective(trial, anchors, ranges);
    }
    if (step <= kMinStep || !(f_trial < f)) break;
    x = trial;
    if (f_trial <= best_f) {
      best_f = f_trial;
      best = x;
    }
  }
  Estimate est{Position(best), SolverId::kGradientDescent, iter, 0.0, std::nullopt};
  est.solve_time = seconds_since(start);
  return est;
}

Estimate tdoa_chan_solve(std::span<const Position> anchors, std::span<const double> range_differences,
                         TdoaOptions opts) {
  const auto start = Clock::now();
  if (anchors.size() < 2) throw Error(ErrorKind::kInsufficientAnchors, "TDoA needs at least two anchors");
  check_ranges(anchors, range_differences.size(), anchors.size() - 1);
  const auto d = static_cast<Eigen::Index>(anchors.front().dim());
  const auto rows = static_cast<Eigen::Index>(range_differences.size());

  // Reference anchor at the origin: 2 a_i^T x + 2 r_i d_1 = |a_i|^2 - r_i^2.
  const Vec& origin = anchors.front().coords();
  Eigen::MatrixXd g(rows, d);
  Eigen::VectorXd r(rows);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vec rel = anchors[static_cast<std::size_t>(i + 1)].coords() - origin;
    const double ri = range_differences[static_cast<std::size_t>(i)];
    g.row(i) = 2.0 * rel.transpose();
    r(i) = ri;
    b(i) = rel.squaredNorm() - ri * ri;
  }

  Eigen::VectorXd x;
  double d1 = 0.0;
  if (rows >= d + 1) {
    Eigen::MatrixXd a(rows, d + 1);
    a.leftCols(d) = g;
    a.col(d) = 2.0 * r;
    Eigen::VectorXd theta = solve_checked(a, b, false, "tdoa stage 1");
    if (opts.second_stage) {
      // Row i error is about 2 d_i e_i with var(e_i) ~ d_i^2 + d_1^2 under
      // relative range noise; weight rows by the inverse.
      const double d1_hat = std::abs(theta(d));
      const double floor = 1e-6 * std::max(1.0, b.cwiseAbs().maxCoeff());
      Eigen::VectorXd root_w(rows);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double di_hat = std::abs(d1_hat + r(i));
        const double var = std::max(di_hat * di_hat * (di_hat * di_hat + d1_hat * d1_hat), floor * floor);
        root_w(i) = 1.0 / std::sqrt(var);
      }
      theta = solve_checked(root_w.asDiagonal() * a, root_w.cwiseProduct(b), false, "tdoa stage 2");
    }
    x = theta.head(d);
    d1 = theta(d);
  } else if (!opts.allow_underdetermined) {
    throw Error(ErrorKind::kSingularGeometry, "TDoA with " + std::to_string(anchors.size()) +
                                                  " anchors cannot determine a " + std::to_string(d) +
                                                  "-D position (need " + std::to_string(d + 2) + ")");
  } else if (rows == d) {
    // x = p + q d_1, then impose d_1^2 = |x|^2.
    const double cond = condition_number(g);
    if (cond > kMaxCondition) throw Error(ErrorKind::kSingularGeometry, "TDoA anchors are coplanar");
    const auto qr = g.colPivHouseholderQr();
    const Eigen::VectorXd p = qr.solve(b);
    const Eigen::VectorXd q = qr.solve(Eigen::VectorXd(-2.0 * r));
    const double qa = q.squaredNorm() - 1.0;
    const double qb = 2.0 * p.dot(q);
    const double qc = p.squaredNorm();
    double root = 0.0;
    if (std::abs(qa) < 1e-12) {
      root = std::abs(qb) > 0.0 ? -qc / qb : 0.0;
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0.0) {
        root = -qb / (2.0 * qa);
      } else {
        const double s = std::sqrt(disc);
        const double r1 = (-qb - s) / (2.0 * qa);
        const double r2 = (-qb + s) / (2.0 * qa);
        const double lo = std::min(r1, r2);
        const double hi = std::max(r1, r2);
        root = lo >= 0.0 ? lo : hi;
      }
    }
    d1 = std::max(root, 0.0);
    x = p + q * d1;
  } else {
    Eigen::MatrixXd a(rows, d + 1);
    a.leftCols(d) = g;
    a.col(d) = 2.0 * r;
    const Eigen::VectorXd theta = a.completeOrthogonalDecomposition().solve(b);
    x = theta.head(d);
    d1 = theta(d);
  }

  Estimate est{Position(Vec(x + origin)), SolverId::kTdoaChan, 0, 0.0, d1};
  est.solve_time = seconds_since(start);
  return est;
}

}  // namespace querloc::localize
