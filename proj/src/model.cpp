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

#include "querloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "querloc/error.hpp"

namespace querloc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kInsufficientAnchors: return "insufficient-anchors";
    case ErrorKind::kInvalidScheme: return "invalid-scheme";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kLengthMismatch: return "length-mismatch";
    case ErrorKind::kAmplitudeDegenerate: return "amplitude-degenerate";
    case ErrorKind::kDegenerateState: return "degenerate-state";
    case ErrorKind::kResolution: return "resolution";
    case ErrorKind::kSingularGeometry: return "singular-geometry";
    case ErrorKind::kUndefinedInformation: return "undefined-information";
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kMissingArgument: return "missing-argument";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

namespace {

void check_coords(const Vec& coords) {
  if (coords.size() != 2 && coords.size() != 3) {
    throw Error(ErrorKind::kInvalidArgument, "position dimension must be 2 or 3");
  }
  if (!coords.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "position has non-finite coordinates");
  }
}

}  // namespace

Position::Position(const Vec& coords) : coords_(coords) { check_coords(coords_); }

Position::Position(std::initializer_list<double> coords) {
  if (coords.size() != 2 && coords.size() != 3) {
    throw Error(ErrorKind::kInvalidArgument, "position dimension must be 2 or 3");
  }
  coords_.resize(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double v : coords) coords_(i++) = v;
  check_coords(coords_);
}

double distance(const Position& a, const Position& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::kInvalidArgument, "dimension mismatch");
  return (a.coords() - b.coords()).norm();
}

Position translated(const Position& p, const Vec& shift) {
  if (static_cast<std::size_t>(shift.size()) != p.dim()) {
    throw Error(ErrorKind::kInvalidArgument, "dimension mismatch");
  }
  return Position(Vec(p.coords() + shift));
}

AnchorSet::AnchorSet(std::vector<Position> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.size() < 2) {
    throw Error(ErrorKind::kInsufficientAnchors, "an anchor set needs at least 2 anchors");
  }
  dim_ = anchors_.front().dim();
  for (const auto& a : anchors_) {
    if (a.dim() != dim_) throw Error(ErrorKind::kInvalidArgument, "anchors mix dimensions");
  }
}

const Position& AnchorSet::at(std::size_t index) const {
  if (index < 1 || index > anchors_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "anchor index " + std::to_string(index) +
                                                 " outside 1.." + std::to_string(anchors_.size()));
  }
  return anchors_[index - 1];
}

std::span<const Position> AnchorSet::first(std::size_t count) const {
  if (count > anchors_.size()) {
    throw Error(ErrorKind::kInsufficientAnchors, "requested " + std::to_string(count) +
                                                     " anchors, have " + std::to_string(anchors_.size()));
  }
  return std::span<const Position>(anchors_).first(count);
}

double AnchorSet::max_inf_norm() const {
  double r = 0.0;
  for (const auto& a : anchors_) r = std::max(r, a.inf_norm());
  return r;
}

AnchorSet table1_anchors(double kappa_a) {
  const double k = kappa_a;
  const double h = kappa_a / 2.0;
  return AnchorSet({
      {0, 0, 0}, {k, 0, 0}, {0, k, 0}, {0, 0, k}, {k, k, k},
      {k, 0, k}, {k, k, 0}, {0, k, k}, {h, h, 0}, {h, h, k},
  });
}

int ProbeScheme::sign_sum() const {
  int s = 0;
  for (const auto& m : members_) s += m.sign;
  return s;
}

const char* to_string(SchemeViolation v) {
  switch (v) {
    case SchemeViolation::kEmpty: return "empty scheme";
    case SchemeViolation::kOddCardinality: return "odd cardinality";
    case SchemeViolation::kSignBalance: return "sign balance";
    case SchemeViolation::kInvalidSign: return "sign not in {+1,-1}";
    case SchemeViolation::kDuplicateAnchor: return "duplicate anchor";
    case SchemeViolation::kIndexOutOfRange: return "anchor index out of range";
  }
  return "unknown";
}

bool SchemeReport::has(SchemeViolation v) const {
  return std::find(violations.begin(), violations.end(), v) != violations.end();
}

std::string SchemeReport::message() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << to_string(violations[i]);
  }
  return os.str();
}

SchemeReport validate_scheme(const ProbeScheme& scheme) {
  SchemeReport report;
  const auto& members = scheme.members();
  if (members.empty()) {
    report.violations.push_back(SchemeViolation::kEmpty);
    return report;
  }
  if (members.size() % 2 != 0) report.violations.push_back(SchemeViolation::kOddCardinality);

  int plus = 0;
  int minus = 0;
  bool bad_sign = false;
  for (const auto& m : members) {
    if (m.sign == 1) {
      ++plus;
    } else if (m.sign == -1) {
      ++minus;
    } else {
      bad_sign = true;
    }
  }
  if (bad_sign) report.violations.push_back(SchemeViolation::kInvalidSign);
  if (plus != minus) report.violations.push_back(SchemeViolation::kSignBalance);

  std::set<std::size_t> seen;
  bool zero_index = false;
  for (const auto& m : members) {
    if (m.anchor == 0) zero_index = true;
    if (!seen.insert(m.anchor).second) {
      report.violations.push_back(SchemeViolation::kDuplicateAnchor);
      break;
    }
  }
  if (zero_index) report.violations.push_back(SchemeViolation::kIndexOutOfRange);
  return report;
}

SchemeReport validate_scheme(const ProbeScheme& scheme, std::size_t anchor_count) {
  SchemeReport report = validate_scheme(scheme);
  if (!report.has(SchemeViolation::kIndexOutOfRange)) {
    for (const auto& m : scheme.members()) {
      if (m.anchor > anchor_count) {
        report.violations.push_back(SchemeViolation::kIndexOutOfRange);
        break;
      }
    }
  }
  return report;
}

std::vector<ProbeScheme> default_scheme_list(std::size_t m, std::size_t n) {
  if (2 * m > n) {
    throw Error(ErrorKind::kInsufficientAnchors,
                std::to_string(m) + " pairwise rangings need " + std::to_string(2 * m) +
                    " anchors, have " + std::to_string(n));
  }
  std::vector<ProbeScheme> schemes;
  schemes.reserve(m);
  for (std::size_t k = 1; k <= m; ++k) {
    // w_i = -(-1)^i: odd indices +1, even indices -1.
    schemes.push_back(ProbeScheme{{2 * k - 1, +1}, {2 * k, -1}});
  }
  return schemes;
}

PhysicalConstants::PhysicalConstants(double gamma_, double c_) : gamma(gamma_), c(c_) {
  if (!(gamma > 0.0) || !(c > 0.0) || !std::isfinite(gamma) || !std::isfinite(c)) {
    throw Error(ErrorKind::kInvalidArgument, "gamma and c must be positive");
  }
}

Scenario::Scenario(AnchorSet anchors_, double kappa_s_, double kappa_a_)
    : anchors(std::move(anchors_)), kappa_s(kappa_s_), kappa_a(kappa_a_) {
  if (!(kappa_s > 0.0) || !(kappa_a > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "kappa_s and kappa_a must be positive");
  }
  if (anchors.max_inf_norm() > kappa_a * (1.0 + 1e-12)) {
    throw Error(ErrorKind::kInvalidArgument, "anchor outside the kappa_a bound");
  }
}

bool Scenario::sensor_in_bounds(const Position& x) const {
  return x.dim() == anchors.dim() && x.inf_norm() <= kappa_s;
}

}  // namespace querloc
