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

#include "qfl/circuit.hpp"

#include <cmath>
#include <stdexcept>

namespace qfl {

bool gate_kind_has_angle(GateKind kind) {
  return kind == GateKind::RX || kind == GateKind::RZ;
}

int gate_kind_arity(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RZ:
    case GateKind::H:
      return 1;
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::SWAP:
      return 2;
  }
  return 0;
}

std::string gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RZ: return "RZ";
    case GateKind::H: return "H";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::SWAP: return "SWAP";
  }
  return "?";
}

void validate_gate(const Gate &gate, int n_qubits) {
  const int arity = gate_kind_arity(gate.kind);
  if (gate.q0 < 0 || gate.q0 >= n_qubits) {
    throw std::invalid_argument(gate_kind_name(gate.kind) +
                                ": target out of range");
  }
  if (arity == 2) {
    if (gate.q1 < 0 || gate.q1 >= n_qubits) {
      throw std::invalid_argument(gate_kind_name(gate.kind) +
                                  ": second target out of range");
    }
    if (gate.q1 == gate.q0) {
      throw std::invalid_argument(gate_kind_name(gate.kind) +
                                  ": targets must be distinct");
    }
  } else if (gate.q1 != -1) {
    throw std::invalid_argument(gate_kind_name(gate.kind) +
                                ": unexpected second target");
  }
  if (gate_kind_has_angle(gate.kind)) {
    if (!std::isfinite(gate.angle)) {
      throw std::invalid_argument(gate_kind_name(gate.kind) +
                                  ": angle must be finite");
    }
  } else if (gate.angle != 0.0) {
    throw std::invalid_argument(gate_kind_name(gate.kind) +
                                " carries no angle");
  }
}

Circuit &Circuit::add(const Gate &gate) {
  validate_gate(gate, n_qubits);
  gates.push_back(gate);
  return *this;
}

void Circuit::validate() const {
  for (const auto &g : gates) validate_gate(g, n_qubits);
}

void apply_gate_in_place(Statevector &state, const Gate &gate) {
  validate_gate(gate, state.n_qubits());
  switch (gate.kind) {
    case GateKind::RX: state.apply_rx_in_place(gate.q0, gate.angle); break;
    case GateKind::RZ: state.apply_rz_in_place(gate.q0, gate.angle); break;
    case GateKind::H: state.apply_h_in_place(gate.q0); break;
    case GateKind::CNOT: state.apply_cnot_in_place(gate.q0, gate.q1); break;
    case GateKind::CZ: state.apply_cz_in_place(gate.q0, gate.q1); break;
    case GateKind::SWAP: state.apply_swap_in_place(gate.q0, gate.q1); break;
  }
}

Statevector apply_gate(const Statevector &state, const Gate &gate) {
  Statevector out = state;
  apply_gate_in_place(out, gate);
  return out;
}

Statevector run_circuit(const Statevector &state, const Circuit &c) {
  Statevector out = state;
  run_circuit_in_place(out, c);
  return out;
}

void run_circuit_in_place(Statevector &state, const Circuit &c) {
  if (c.n_qubits != state.n_qubits()) {
    throw std::invalid_argument("circuit register does not match state");
  }
  for (const auto &g : c.gates) apply_gate_in_place(state, g);
}

std::vector<double> readout_distribution(const Statevector &state,
                                         const std::vector<int> &readout_qubits) {
  return state.marginal_distribution(readout_qubits);
}

XyMeasurement measure_xy(const Statevector &state, int qubit, double delta,
                         double coin) {
  const double p0 = state.xy_outcome_probability(qubit, delta);
  const int outcome = (coin < p0) ? 0 : 1;
  Statevector post = state;
  post.collapse_xy_in_place(qubit, delta, outcome);
  return {outcome, std::move(post), outcome == 0 ? p0 : 1.0 - p0};
}

double total_variation(const std::vector<double> &p, const std::vector<double> &q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("distributions differ in length");
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

}  // namespace qfl
