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

#include "querloc/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "querloc/error.hpp"
#include "querloc/qdynamics.hpp"

namespace querloc::qsim {

using cplx = std::complex<double>;

StateVector::StateVector(std::size_t qubits) : qubits_(qubits) {
  if (qubits == 0) throw Error(ErrorKind::kInvalidArgument, "a state needs at least one qubit");
  if (qubits > kMaxQubits) {
    throw Error(ErrorKind::kCapacity, std::to_string(qubits) + " qubits exceeds the cap of " +
                                          std::to_string(kMaxQubits));
  }
  amps_.assign(std::size_t{1} << qubits, cplx(0.0, 0.0));
  amps_[0] = 1.0;
}

std::uint32_t StateVector::mask(std::size_t qubit) const {
  if (qubit < 1 || qubit > qubits_) {
    throw Error(ErrorKind::kInvalidArgument, "qubit index " + std::to_string(qubit) + " out of range");
  }
  return std::uint32_t{1} << (qubits_ - qubit);
}

cplx StateVector::amplitude(const std::string& bits) const {
  if (bits.size() != qubits_) throw Error(ErrorKind::kLengthMismatch, "bit string length != qubits");
  std::uint32_t index = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw Error(ErrorKind::kInvalidArgument, "bit string must be 0/1");
    index = (index << 1) | static_cast<std::uint32_t>(ch == '1');
  }
  return amps_[index];
}

double StateVector::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

void StateVector::hadamard(std::size_t qubit) {
  const std::uint32_t m = mask(qubit);
  const double r = std::numbers::sqrt2 / 2.0;
  for (std::uint32_t i = 0; i < amps_.size(); ++i) {
    if (i & m) continue;
    const cplx a = amps_[i];
    const cplx b = amps_[i | m];
    amps_[i] = r * (a + b);
    amps_[i | m] = r * (a - b);
  }
}

void StateVector::pauli_x(std::size_t qubit) {
  const std::uint32_t m = mask(qubit);
  for (std::uint32_t i = 0; i < amps_.size(); ++i) {
    if (!(i & m)) std::swap(amps_[i], amps_[i | m]);
  }
}

void StateVector::cnot(std::size_t control, std::size_t target) {
  if (control == target) throw Error(ErrorKind::kInvalidArgument, "CNOT control equals target");
  const std::uint32_t c = mask(control);
  const std::uint32_t t = mask(target);
  for (std::uint32_t i = 0; i < amps_.size(); ++i) {
    if ((i & c) && !(i & t)) std::swap(amps_[i], amps_[i | t]);
  }
}

void StateVector::rotate_basis_phase(std::uint32_t basis, double angle) {
  amps_.at(basis) *= std::polar(1.0, angle);
}

BranchPattern BranchPattern::from_scheme(const ProbeScheme& scheme) {
  const std::size_t n = scheme.size();
  if (n == 0 || n > kMaxQubits) {
    throw Error(ErrorKind::kCapacity, "scheme size must lie in 1.." + std::to_string(kMaxQubits));
  }
  std::uint32_t bits0 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (scheme.members()[i].sign == -1) bits0 |= std::uint32_t{1} << (n - 1 - i);
  }
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  return BranchPattern{n, bits0, ~bits0 & full};
}

StateVector prepare_probe(const ProbeScheme& scheme) {
  const auto report = validate_scheme(scheme);
  if (!report.ok()) throw Error(ErrorKind::kInvalidScheme, report.message());
  if (scheme.size() > kMaxQubits) {
    throw Error(ErrorKind::kCapacity, std::to_string(scheme.size()) + " probe qubits exceeds the cap of " +
                                          std::to_string(kMaxQubits));
  }
  const std::size_t n = scheme.size();
  StateVector state(n);
  state.hadamard(1);
  for (std::size_t q = 1; q < n; ++q) state.cnot(q, q + 1);
  for (std::size_t q = 1; q <= n; ++q) {
    if (scheme.members()[q - 1].sign == -1) state.pauli_x(q);
  }
  return state;
}

StateVector apply_phase_evolution(StateVector state, std::span<const double> times, double gamma) {
  const std::size_t n = state.qubits();
  if (times.size() != n) {
    throw Error(ErrorKind::kLengthMismatch, "got " + std::to_string(times.size()) + " times for " +
                                                std::to_string(n) + " qubits");
  }
  for (double t : times) {
    if (!(t >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "times must be non-negative");
  }
  for (std::uint32_t basis = 0; basis < state.dimension(); ++basis) {
    if (state.amplitude(basis) == cplx(0.0, 0.0)) continue;
    double angle = 0.0;
    for (std::size_t q = 1; q <= n; ++q) {
      if (basis & (std::uint32_t{1} << (n - q))) angle -= gamma * times[q - 1] * times[q - 1];
    }
    state.rotate_basis_phase(basis, angle);
  }
  return state;
}

double branch_relative_phase(const StateVector& state, const BranchPattern& pattern) {
  if (pattern.qubits != state.qubits()) {
    throw Error(ErrorKind::kLengthMismatch, "pattern and state qubit counts differ");
  }
  const cplx a0 = state.amplitude(pattern.bits0);
  const cplx a1 = state.amplitude(pattern.bits1);
  if (std::abs(a0) <= 1e-12 || std::abs(a1) <= 1e-12) {
    throw Error(ErrorKind::kDegenerateState, "a probe branch has zero amplitude");
  }
  // arg(a0 conj(a1)) avoids accumulating two separately wrapped angles.
  return qdynamics::wrap_phase(std::arg(a0 * std::conj(a1)));
}

double overlap_probability(const StateVector& a, const StateVector& b) {
  if (a.qubits() != b.qubits()) throw Error(ErrorKind::kLengthMismatch, "qubit counts differ");
  cplx inner(0.0, 0.0);
  for (std::size_t i = 0; i < a.dimension(); ++i) inner += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
  return std::norm(inner);
}

double povm_probability(double chi) {
  const double c = std::cos(0.5 * chi);
  return c * c;
}

double sample_and_estimate_phase(double chi_true, std::uint64_t shots, Rng& rng) {
  if (shots == 0) throw Error(ErrorKind::kInvalidArgument, "at least one shot is required");
  const std::uint64_t k = rng.binomial(shots, povm_probability(chi_true));
  const double freq = static_cast<double>(k) / static_cast<double>(shots);
  return 2.0 * std::acos(std::sqrt(freq));
}

VerificationReport run_verification(const VerificationOptions& opts) {
  VerificationReport report;
  Rng rng = Rng::derive(opts.seed, {0x9517});
  const std::size_t max_pairs = std::max<std::size_t>(1, std::min(opts.max_qubits, kMaxQubits) / 2);

  for (std::size_t inst = 0; inst < opts.instances; ++inst) {
    const std::size_t pairs = 1 + static_cast<std::size_t>(rng.next_u64() % max_pairs);
    const std::size_t n = 2 * pairs;

    std::vector<int> signs(n);
    for (std::size_t i = 0; i < n; ++i) signs[i] = i < pairs ? 1 : -1;
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(signs[i], signs[rng.next_u64() % (i + 1)]);
    }
    std::vector<SchemeMember> members;
    for (std::size_t i = 0; i < n; ++i) members.push_back({i + 1, signs[i]});
    const ProbeScheme scheme(members);

    const double gamma = rng.uniform(0.01, 2.0);
    std::vector<double> times(n);
    for (auto& t : times) t = rng.uniform(0.0, 2.0);

    double expected = 0.0;
    for (std::size_t i = 0; i < n; ++i) expected += signs[i] * times[i] * times[i];
    expected *= gamma;

    const StateVector prepared = prepare_probe(scheme);
    std::vector<double> applied = times;
    if (opts.inject_fault) applied[0] += 1e-3;
    const StateVector evolved = apply_phase_evolution(prepared, applied, gamma);

    const double chi = branch_relative_phase(evolved, BranchPattern::from_scheme(scheme));
    report.max_phase_deviation =
        std::max(report.max_phase_deviation, std::abs(qdynamics::wrap_phase(chi - expected)));
    report.max_povm_deviation = std::max(
        report.max_povm_deviation, std::abs(povm_probability(expected) - overlap_probability(prepared, evolved)));
    report.max_norm_deviation = std::max({report.max_norm_deviation, std::abs(prepared.norm_sq() - 1.0),
                                          std::abs(evolved.norm_sq() - 1.0)});
    ++report.instances;
  }

  // Delta method: |dchi/dp| sqrt(p(1-p)/shots) = 1/sqrt(shots) for p = cos^2(chi/2).
  const double chi = opts.estimator_chi;
  const double p = povm_probability(chi);
  const double sigma = 2.0 / std::abs(std::sin(chi)) * std::sqrt(p * (1.0 - p) / static_cast<double>(opts.shots));
  report.estimator_band = 3.0 * sigma;
  for (std::size_t run = 0; run < opts.estimator_runs; ++run) {
    Rng shot_rng = Rng::derive(opts.seed, {0xE57, run});
    const double est = sample_and_estimate_phase(chi, opts.shots, shot_rng);
    if (std::abs(est - chi) <= report.estimator_band) ++report.estimator_within_band;
    ++report.estimator_runs;
  }
  return report;
}

}  // namespace querloc::qsim
