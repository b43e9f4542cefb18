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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace querloc {

/// Coordinate storage; d is at most 3 so this never heap-allocates.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

/// A point in R^d with d in {2, 3}.
class Position {
 public:
  Position() = default;
  explicit Position(const Vec& coords);
  Position(std::initializer_list<double> coords);

  std::size_t dim() const { return static_cast<std::size_t>(coords_.size()); }
  const Vec& coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_(static_cast<Eigen::Index>(i)); }

  double inf_norm() const { return coords_.cwiseAbs().maxCoeff(); }

 private:
  Vec coords_;
};

double distance(const Position& a, const Position& b);
Position translated(const Position& p, const Vec& shift);

/// Ordered anchors, addressed 1..n externally.
class AnchorSet {
 public:
  explicit AnchorSet(std::vector<Position> anchors);

  std::size_t size() const { return anchors_.size(); }
  std::size_t dim() const { return dim_; }

  /// 1-based access, matching external anchor indices.
  const Position& at(std::size_t index) const;

  /// Anchors 1..count as a contiguous view.
  std::span<const Position> first(std::size_t count) const;
  std::span<const Position> all() const { return anchors_; }

  double max_inf_norm() const;

 private:
  std::vector<Position> anchors_;
  std::size_t dim_ = 0;
};

/// The fixed ten-anchor topology of the default experiment, scaled by kappa_a.
AnchorSet table1_anchors(double kappa_a);

struct SchemeMember {
  std::size_t anchor = 0;  // 1-based
  int sign = 0;            // +1 or -1

  bool operator==(const SchemeMember&) const = default;
};

/// Anchor selection and signs for one QuER ranging.
class ProbeScheme {
 public:
  ProbeScheme() = default;
  ProbeScheme(std::initializer_list<SchemeMember> members) : members_(members) {}
  explicit ProbeScheme(std::vector<SchemeMember> members) : members_(std::move(members)) {}

  const std::vector<SchemeMember>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

  int sign_sum() const;

  bool operator==(const ProbeScheme&) const = default;

 private:
  std::vector<SchemeMember> members_;
};

enum class SchemeViolation {
  kEmpty,
  kOddCardinality,
  kSignBalance,
  kInvalidSign,
  kDuplicateAnchor,
  kIndexOutOfRange,
};

const char* to_string(SchemeViolation v);

struct SchemeReport {
  std::vector<SchemeViolation> violations;

  bool ok() const { return violations.empty(); }
  bool has(SchemeViolation v) const;
  std::string message() const;
};

SchemeReport validate_scheme(const ProbeScheme& scheme);
/// Additionally checks every index lies in 1..anchor_count.
SchemeReport validate_scheme(const ProbeScheme& scheme, std::size_t anchor_count);

/// Scheme k pairs anchors 2k-1 (sign +1) and 2k (sign -1), k = 1..m.
std::vector<ProbeScheme> default_scheme_list(std::size_t m, std::size_t n);

struct PhysicalConstants {
  double gamma = 1e3;  // field chirp rate, rad/s^2
  double c = 3e8;      // probe propagation speed, m/s

  PhysicalConstants() = default;
  PhysicalConstants(double gamma_, double c_);

  /// Round-trip time of flight t = 2d/c.
  double time_of_flight(double distance) const { return 2.0 * distance / c; }
};

/// Anchors plus the sensor/anchor bounds of one localization campaign.
struct Scenario {
  AnchorSet anchors;
  double kappa_s;
  double kappa_a;

  Scenario(AnchorSet anchors_, double kappa_s_, double kappa_a_);

  bool sensor_in_bounds(const Position& x) const;
};

}  // namespace querloc
