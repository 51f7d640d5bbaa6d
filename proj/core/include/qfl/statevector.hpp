// Copyright 2026 The qfl authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace qfl {

using cdouble = std::complex<double>;

/// Registers larger than this are rejected; dense amplitudes only.
inline constexpr int kMaxQubits = 20;

/**
 * Dense complex amplitude vector of an n-qubit register.
 *
 * Bit convention: qubit 0 is the most significant bit of the basis index,
 * i.e. basis state |q0 q1 ... q_{n-1}> has index (q0 << (n-1)) | ... | q_{n-1}.
 *
 * Operations treat states as values: the free functions in circuit.hpp
 * return new states. The mutating members (apply_*_in_place) require
 * exclusive access and exist for hot paths.
 */
class Statevector {
 public:
  /// |0...0> on n qubits.
  explicit Statevector(int n_qubits);

  /// Takes ownership of raw amplitudes; length must be 2^n_qubits.
  Statevector(int n_qubits, std::vector<cdouble> amplitudes);

  static Statevector computational_basis(int n_qubits, std::uint64_t index);

  int n_qubits() const { return n_qubits_; }
  std::uint64_t dim() const { return std::uint64_t{1} << n_qubits_; }
  const std::vector<cdouble> &amplitudes() const { return amp_; }
  std::vector<cdouble> &amplitudes() { return amp_; }
  cdouble amplitude(std::uint64_t i) const { return amp_[i]; }

  double norm_sq() const;
  void normalize();

  /// |<a|b>|^2 of two normalized states of equal dimension.
  static double fidelity(const Statevector &a, const Statevector &b);

  // In-place single- and two-qubit kernels. Callers must hold n
  // exclusively; all are norm-preserving unitaries.
  void apply_rx_in_place(int qubit, double angle);
  void apply_rz_in_place(int qubit, double angle);
  void apply_h_in_place(int qubit);
  void apply_x_in_place(int qubit);
  void apply_z_in_place(int qubit);
  void apply_cnot_in_place(int control, int target);
  void apply_cz_in_place(int a, int b);
  void apply_swap_in_place(int a, int b);

  /**
   * Probability of outcome 0 for an XY-plane measurement of `qubit` in the
   * basis |+_delta> = (|0> + e^{i delta}|1>)/sqrt(2), |-_delta> with the
   * minus sign.
   */
  double xy_outcome_probability(int qubit, double delta) const;

  /// Projects onto the XY-plane basis state for `outcome` and renormalizes.
  void collapse_xy_in_place(int qubit, double delta, int outcome);

  /// Marginal computational-basis distribution over `qubits` (in the given
  /// order; qubits[0] is the most significant bit of the bucket index).
  std::vector<double> marginal_distribution(const std::vector<int> &qubits) const;

 private:
  void check_qubit(int qubit) const;
  std::uint64_t stride(int qubit) const {
    return std::uint64_t{1} << (n_qubits_ - 1 - qubit);
  }

  int n_qubits_;
  std::vector<cdouble> amp_;
};

}  // namespace qfl
