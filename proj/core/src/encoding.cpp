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

#include "qfl/encoding.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfl {

namespace {

constexpr double kAngleEps = 1e-12;

enum class MuxKind { RY, RZ };

// RY(t) = RZ(pi/2) RX(t) RZ(-pi/2) as an operator product; in circuit
// order the RZ(-pi/2) comes first.
void emit_ry(Circuit &c, int qubit, double angle) {
  const double half_pi = std::numbers::pi / 2.0;
  c.add(Gate::rz(qubit, -half_pi));
  c.add(Gate::rx(qubit, angle));
  c.add(Gate::rz(qubit, half_pi));
}

void emit_rotation(Circuit &c, MuxKind kind, int qubit, double angle) {
  if (std::abs(angle) < kAngleEps) return;
  if (kind == MuxKind::RZ) {
    c.add(Gate::rz(qubit, angle));
  } else {
    emit_ry(c, qubit, angle);
  }
}

// Uniformly controlled rotation: applies R(angles[c]) to `target` where c
// runs over the computational-basis values of `controls` (controls[0] is
// the most significant bit of c). Lowered recursively; conjugating a
// Y/Z rotation by CNOT flips its sign, which halves the multiplexor.
void emit_multiplexed_rotation(Circuit &c, MuxKind kind, int target,
                               const std::vector<int> &controls,
                               const std::vector<double> &angles) {
  if (angles.size() != (std::size_t{1} << controls.size())) {
    throw std::logic_error("multiplexor angle table has wrong size");
  }
  bool all_zero = true;
  for (double a : angles) {
    if (std::abs(a) >= kAngleEps) {
      all_zero = false;
      break;
    }
  }
  if (all_zero) return;
  if (controls.empty()) {
    emit_rotation(c, kind, target, angles[0]);
    return;
  }
  const int head = controls.front();
  const std::vector<int> rest(controls.begin() + 1, controls.end());
  const std::size_t half = angles.size() / 2;
  std::vector<double> sum(half), diff(half);
  for (std::size_t i = 0; i < half; ++i) {
    sum[i] = (angles[i] + angles[half + i]) / 2.0;
    diff[i] = (angles[i] - angles[half + i]) / 2.0;
  }
  emit_multiplexed_rotation(c, kind, target, rest, sum);
  c.add(Gate::cnot(head, target));
  emit_multiplexed_rotation(c, kind, target, rest, diff);
  c.add(Gate::cnot(head, target));
}

void drop_adjacent_cnot_pairs(Circuit &c) {
  std::vector<Gate> out;
  out.reserve(c.gates.size());
  for (const auto &g : c.gates) {
    if (!out.empty() && g.kind == GateKind::CNOT &&
        out.back().kind == GateKind::CNOT && out.back().q0 == g.q0 &&
        out.back().q1 == g.q1) {
      out.pop_back();
    } else {
      out.push_back(g);
    }
  }
  c.gates = std::move(out);
}

}  // namespace

Circuit route_to_adjacent(const Circuit &c) {
  Circuit out(c.n_qubits);
  for (const auto &g : c.gates) {
    switch (g.kind) {
      case GateKind::RX:
      case GateKind::RZ:
      case GateKind::H:
        out.add(g);
        break;
      case GateKind::CZ:
        // CZ = (I x H) CNOT (I x H), then route the CNOT below if needed.
        out.add(Gate::h(g.q1));
        out.add(Gate::cnot(g.q0, g.q1));
        out.add(Gate::h(g.q1));
        break;
      case GateKind::SWAP:
        out.add(Gate::cnot(g.q0, g.q1));
        out.add(Gate::cnot(g.q1, g.q0));
        out.add(Gate::cnot(g.q0, g.q1));
        break;
      case GateKind::CNOT:
        out.add(g);
        break;
    }
  }
  // Second pass: rewrite the collected CNOTs so controls sit next to
  // their targets, walking the control toward the target and back.
  Circuit routed(c.n_qubits);
  for (const auto &g : out.gates) {
    if (g.kind != GateKind::CNOT || std::abs(g.q0 - g.q1) == 1) {
      routed.add(g);
      continue;
    }
    const int step = (g.q1 > g.q0) ? 1 : -1;
    int pos = g.q0;
    std::vector<std::pair<int, int>> swaps;
    while (std::abs(g.q1 - pos) > 1) {
      const int a = std::min(pos, pos + step), b = std::max(pos, pos + step);
      swaps.emplace_back(a, b);
      pos += step;
    }
    for (auto [a, b] : swaps) {
      routed.add(Gate::cnot(a, b));
      routed.add(Gate::cnot(b, a));
      routed.add(Gate::cnot(a, b));
    }
    routed.add(Gate::cnot(pos, g.q1));
    for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) {
      routed.add(Gate::cnot(it->first, it->second));
      routed.add(Gate::cnot(it->second, it->first));
      routed.add(Gate::cnot(it->first, it->second));
    }
  }
  drop_adjacent_cnot_pairs(routed);
  return routed;
}

PreparationCircuit amplitude_encode_complex(const std::vector<cdouble> &target,
                                            int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("amplitude_encode: bad register size");
  }
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  if (target.empty() || target.size() > dim) {
    throw std::invalid_argument(
        "amplitude_encode: feature dimension exceeds register");
  }
  std::vector<cdouble> psi(dim, cdouble{0.0, 0.0});
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    psi[i] = target[i];
    norm_sq += std::norm(target[i]);
  }
  if (std::abs(norm_sq - 1.0) > 1e-8) {
    throw std::invalid_argument("amplitude_encode: input is not L2-normalized");
  }

  // Disentangle the least significant qubit level by level; each level
  // leaves behind the multiplexed angles that undo it.
  struct Level {
    std::vector<double> ry, rz;
  };
  std::vector<Level> levels;
  std::vector<cdouble> cur = psi;
  for (int level = 0; level < n_qubits; ++level) {
    const std::size_t half = cur.size() / 2;
    Level lv;
    lv.ry.assign(half, 0.0);
    lv.rz.assign(half, 0.0);
    std::vector<cdouble> next(half, cdouble{0.0, 0.0});
    for (std::size_t c = 0; c < half; ++c) {
      const cdouble a = cur[2 * c], b = cur[2 * c + 1];
      const double ma = std::abs(a), mb = std::abs(b);
      const double r = std::sqrt(ma * ma + mb * mb);
      if (r < 1e-15) continue;
      const double zeta = (mb < 1e-15 || ma < 1e-15)
                              ? 0.0
                              : std::arg(b) - std::arg(a);
      const double eta = 2.0 * std::atan2(mb, ma);
      lv.rz[c] = zeta;
      lv.ry[c] = eta;
      const double tau = (ma >= 1e-15 ? std::arg(a) : std::arg(b) - zeta) +
                         zeta / 2.0;
      next[c] = std::polar(r, tau);
    }
    levels.push_back(std::move(lv));
    cur = std::move(next);
  }

  // Rebuild in reverse: RY then RZ per level, deepest level first.
  Circuit prep(n_qubits);
  for (int level = n_qubits - 1; level >= 0; --level) {
    const int target_qubit = n_qubits - 1 - level;
    std::vector<int> controls;
    for (int q = 0; q < target_qubit; ++q) controls.push_back(q);
    emit_multiplexed_rotation(prep, MuxKind::RY, target_qubit, controls,
                              levels[level].ry);
    emit_multiplexed_rotation(prep, MuxKind::RZ, target_qubit, controls,
                              levels[level].rz);
  }
  Circuit routed = route_to_adjacent(prep);

  PreparationCircuit result{std::move(routed), 0.0};
  Statevector prepared(n_qubits);
  run_circuit_in_place(prepared, result.circuit);
  result.target_fidelity_achieved =
      Statevector::fidelity(Statevector(n_qubits, psi), prepared);
  return result;
}

PreparationCircuit amplitude_encode(const FeatureVector &features, int n_qubits) {
  std::vector<cdouble> target(features.values.size());
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = features.values[i];
  return amplitude_encode_complex(target, n_qubits);
}

std::vector<double> rotation_encode(const std::vector<double> &values,
                                    int template_qubits, int template_depth,
                                    int rotations_per_layer) {
  const std::size_t n_params = static_cast<std::size_t>(template_qubits) *
                               template_depth * rotations_per_layer;
  if (values.size() > n_params) {
    throw std::invalid_argument(
        "rotation_encode: feature length exceeds template parameter count");
  }
  std::vector<double> params(n_params, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) params[i] = values[i];
  return params;
}

std::vector<double> scale_to_angle_range(const std::vector<double> &values,
                                         double lo, double hi) {
  std::vector<double> out(values.size(), 0.0);
  if (hi <= lo) return out;
  const double scale = std::numbers::pi / (hi - lo);
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - lo) * scale;
  }
  return out;
}

}  // namespace qfl
