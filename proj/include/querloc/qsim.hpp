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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "querloc/model.hpp"
#include "querloc/rng.hpp"

namespace querloc::qsim {

inline constexpr std::size_t kMaxQubits = 12;

/// Pure state of N <= 12 qubits. Basis index bit (N - q) holds qubit q
/// (1-based), so qubit 1 is the leftmost symbol of |q1 q2 ... qN>.
class StateVector {
 public:
  /// |0...0>
  explicit StateVector(std::size_t qubits);

  std::size_t qubits() const { return qubits_; }
  std::size_t dimension() const { return amps_.size(); }
  const std::vector<std::complex<double>>& amplitudes() const { return amps_; }
  std::complex<double> amplitude(std::uint32_t basis) const { return amps_.at(basis); }
  /// Amplitude of the basis state written as a bit string, e.g. "0101".
  std::complex<double> amplitude(const std::string& bits) const;

  double norm_sq() const;

  // The probe circuit only needs these three gates.
  void hadamard(std::size_t qubit);
  void pauli_x(std::size_t qubit);
  void cnot(std::size_t control, std::size_t target);

  /// Multiplies amplitude `basis` by e^{i angle}; used by phase evolution.
  void rotate_basis_phase(std::uint32_t basis, double angle);

 private:
  std::uint32_t mask(std::size_t qubit) const;

  std::size_t qubits_;
  std::vector<std::complex<double>> amps_;
};

/// Complementary basis strings of the two probe branches; bit of qubit i in
/// bits0 is 1 iff the i-th scheme member has sign -1.
struct BranchPattern {
  std::size_t qubits;
  std::uint32_t bits0;
  std::uint32_t bits1;

  static BranchPattern from_scheme(const ProbeScheme& scheme);
};

/// H on qubit 1, CNOT chain 1->2->...->N, then X on every qubit whose sign
/// is -1. Throws on an invalid scheme or more than kMaxQubits members.
StateVector prepare_probe(const ProbeScheme& scheme);

/// Applies prod_i exp(-i gamma t_i^2 bit_i) to every basis amplitude.
StateVector apply_phase_evolution(StateVector state, std::span<const double> times, double gamma);

/// arg(amp(bits0)) - arg(amp(bits1)), wrapped to (-pi, pi].
double branch_relative_phase(const StateVector& state, const BranchPattern& pattern);

/// |<a|b>|^2
double overlap_probability(const StateVector& a, const StateVector& b);

/// Probability of the "yes" outcome of the projective readout onto the
/// initial probe: cos^2(chi / 2).
double povm_probability(double chi);

/// Draws k ~ Binomial(shots, cos^2(chi_true/2)) and returns the principal
/// value estimate 2 arccos(sqrt(k / shots)) in [0, pi]. The sign and
/// winding of chi are not identifiable from this readout.
double sample_and_estimate_phase(double chi_true, std::uint64_t shots, Rng& rng);

struct VerificationOptions {
  std::size_t instances = 1000;
  std::size_t max_qubits = 6;
  std::uint64_t seed = 2024;
  std::size_t estimator_runs = 100;
  std::uint64_t shots = 1000000;
  double estimator_chi = 0.3;
  /// Test hook: corrupts the phase of one qubit so the oracle must fail.
  bool inject_fault = false;
};

struct VerificationReport {
  std::size_t instances = 0;
  double max_phase_deviation = 0.0;
  double max_povm_deviation = 0.0;
  double max_norm_deviation = 0.0;
  std::size_t estimator_runs = 0;
  std::size_t estimator_within_band = 0;
  double estimator_band = 0.0;

  bool phase_ok() const { return max_phase_deviation <= 1e-12; }
  bool povm_ok() const { return max_povm_deviation <= 1e-12; }
  bool norm_ok() const { return max_norm_deviation <= 1e-12; }
  bool estimator_ok() const { return estimator_within_band * 100 >= 95 * estimator_runs; }
  bool passed() const { return phase_ok() && povm_ok() && norm_ok() && estimator_ok(); }
};

/// Randomized check that the statevector pipeline reproduces
/// chi = gamma * sum_i w_i t_i^2 (mod 2 pi), that the readout probability
/// equals the state overlap, and that the shot estimator stays in its 3-sigma
/// binomial band.
VerificationReport run_verification(const VerificationOptions& opts);

}  // namespace querloc::qsim
