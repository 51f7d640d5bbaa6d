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

#include <string>
#include <vector>

#include "qfl/statevector.hpp"

namespace qfl {

enum class GateKind { RX, RZ, H, CNOT, CZ, SWAP };

bool gate_kind_has_angle(GateKind kind);
int gate_kind_arity(GateKind kind);
std::string gate_kind_name(GateKind kind);

/**
 * One gate in a circuit. Rotation kinds carry exactly one angle in radians;
 * the rest carry none. Rotation conventions: RX(t) = exp(-i t X / 2),
 * RZ(t) = exp(-i t Z / 2).
 */
struct Gate {
  GateKind kind;
  int q0 = 0;
  int q1 = -1;  // second target for two-qubit kinds, otherwise -1
  double angle = 0.0;

  static Gate rx(int qubit, double angle) { return {GateKind::RX, qubit, -1, angle}; }
  static Gate rz(int qubit, double angle) { return {GateKind::RZ, qubit, -1, angle}; }
  static Gate h(int qubit) { return {GateKind::H, qubit, -1, 0.0}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, control, target, 0.0}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, a, b, 0.0}; }
  static Gate swap(int a, int b) { return {GateKind::SWAP, a, b, 0.0}; }
};

/// Throws std::invalid_argument unless the gate is well-formed for a
/// register of n_qubits (distinct in-range targets, finite angle).
void validate_gate(const Gate &gate, int n_qubits);

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  Circuit() = default;
  explicit Circuit(int n) : n_qubits(n) {}

  Circuit &add(const Gate &gate);
  void validate() const;
};

/// Unitary image of `state` under one gate; the input is left untouched.
Statevector apply_gate(const Statevector &state, const Gate &gate);

/// Applies a validated gate to a state in place.
void apply_gate_in_place(Statevector &state, const Gate &gate);

/// Applies c.gates left to right. c.n_qubits must match the register.
Statevector run_circuit(const Statevector &state, const Circuit &c);

void run_circuit_in_place(Statevector &state, const Circuit &c);

/**
 * Marginal computational-basis distribution over `readout_qubits`: the
 * diagonal of the reduced density matrix over those qubits. Entries are
 * nonnegative and sum to 1 (within float error) for a normalized input.
 */
std::vector<double> readout_distribution(const Statevector &state,
                                         const std::vector<int> &readout_qubits);

struct XyMeasurement {
  int outcome;  // 0 projects onto |+_delta>, 1 onto |-_delta>
  Statevector post_state;
  double probability;  // probability of the realized outcome
};

/**
 * Single-site measurement in the XY-plane basis |0> +/- e^{i delta}|1>
 * (normalized). The outcome is 0 when `coin` < p(0), else 1; the post
 * state is the renormalized projection with the measured qubit left in
 * the corresponding basis state.
 */
XyMeasurement measure_xy(const Statevector &state, int qubit, double delta,
                         double coin);

/// Total variation distance between two distributions of equal length.
double total_variation(const std::vector<double> &p, const std::vector<double> &q);

}  // namespace qfl
