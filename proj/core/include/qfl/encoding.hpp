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

#include <vector>

#include "qfl/circuit.hpp"

namespace qfl {

/// Preprocessed classical input: unit-L2 feature values plus its class id.
struct FeatureVector {
  std::vector<double> values;
  int source_label = 0;
};

/**
 * Compiled state-preparation circuit. After SWAP expansion the gate list
 * contains only RX, RZ and CNOTs between adjacent wires, so it can run
 * unchanged on the brickwork backends.
 */
struct PreparationCircuit {
  Circuit circuit;
  double target_fidelity_achieved = 0.0;
};

/**
 * Compiles a circuit that maps |0...0> to the state whose amplitudes are
 * the zero-padded feature vector, up to global phase.
 *
 * Uses one multiplexed-RZ/RY pair per qubit to disentangle the register a
 * qubit at a time; every multiplexor is lowered to CNOTs plus single-qubit
 * rotations, RY is expanded over RZ/RX, and non-adjacent CNOTs are routed
 * through SWAP chains (3 CNOTs each). Gate count is bounded by
 * kPreparationGateCountFactor * n_qubits * 2^n_qubits.
 *
 * Throws std::invalid_argument for unnormalized input or when the vector
 * does not fit in 2^n_qubits amplitudes.
 */
PreparationCircuit amplitude_encode(const FeatureVector &features, int n_qubits);

/// Complex-amplitude variant (reconstruction candidates can be complex).
PreparationCircuit amplitude_encode_complex(const std::vector<cdouble> &target,
                                            int n_qubits);

/// Documented bound: compiled gate count <= factor * n_qubits * 2^n_qubits.
inline constexpr int kPreparationGateCountFactor = 24;

/**
 * Rewrites CZ/SWAP/non-adjacent-CNOT gates into adjacent CNOTs and
 * single-qubit gates. Output contains no gate outside {RX, RZ, H, CNOT}
 * and every CNOT acts on neighboring wires.
 */
Circuit route_to_adjacent(const Circuit &c);

/**
 * Places `values` verbatim into the first parameters of an
 * (n_qubits x rotations_per_layer x depth)-parameter classifier template,
 * zeroes the rest. Scaling to a bounded angle range is the caller's job
 * (see scale_to_angle_range). Throws when values exceed the parameter count.
 */
std::vector<double> rotation_encode(const std::vector<double> &values,
                                    int template_qubits, int template_depth,
                                    int rotations_per_layer);

/// Affine map of [lo, hi] onto [0, pi]; constant inputs map to 0.
std::vector<double> scale_to_angle_range(const std::vector<double> &values,
                                         double lo, double hi);

}  // namespace qfl
