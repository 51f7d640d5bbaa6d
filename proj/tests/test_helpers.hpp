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
#include <vector>

#include "qfl/circuit.hpp"
#include "qfl/rng.hpp"
#include "qfl/statevector.hpp"

namespace qfl::test {

using Matrix = std::vector<std::vector<cdouble>>;

// Dense-unitary oracle: builds the full 2^n x 2^n matrix of a gate by
// direct kron products and multiplies matrices explicitly. Deliberately
// independent of the statevector kernels it checks.
inline Matrix identity_matrix(std::size_t dim) {
  Matrix m(dim, std::vector<cdouble>(dim, 0.0));
  for (std::size_t i = 0; i < dim; ++i) m[i][i] = 1.0;
  return m;
}

inline Matrix matmul(const Matrix &a, const Matrix &b) {
  const std::size_t n = a.size();
  Matrix r(n, std::vector<cdouble>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const cdouble aik = a[i][k];
      if (aik == cdouble{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < n; ++j) r[i][j] += aik * b[k][j];
    }
  }
  return r;
}

inline Matrix dense_gate_matrix(const Gate &g, int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  Matrix m(dim, std::vector<cdouble>(dim, 0.0));
  auto bit = [n_qubits](std::size_t idx, int qubit) {
    return (idx >> (n_qubits - 1 - qubit)) & 1ULL;
  };
  const double h = g.angle / 2.0;
  cdouble u[2][2];
  switch (g.kind) {
    case GateKind::RX:
      u[0][0] = std::cos(h);
      u[0][1] = cdouble{0.0, -std::sin(h)};
      u[1][0] = cdouble{0.0, -std::sin(h)};
      u[1][1] = std::cos(h);
      break;
    case GateKind::RZ:
      u[0][0] = std::polar(1.0, -h);
      u[0][1] = 0.0;
      u[1][0] = 0.0;
      u[1][1] = std::polar(1.0, h);
      break;
    case GateKind::H: {
      const double s = 1.0 / std::sqrt(2.0);
      u[0][0] = s;
      u[0][1] = s;
      u[1][0] = s;
      u[1][1] = -s;
      break;
    }
    default:
      u[0][0] = u[0][1] = u[1][0] = u[1][1] = 0.0;
      break;
  }
  for (std::size_t col = 0; col < dim; ++col) {
    if (g.kind == GateKind::RX || g.kind == GateKind::RZ ||
        g.kind == GateKind::H) {
      const auto b = bit(col, g.q0);
      for (std::size_t rbit = 0; rbit < 2; ++rbit) {
        std::size_t row = col;
        const std::size_t mask = std::size_t{1} << (n_qubits - 1 - g.q0);
        row = (row & ~mask) | (rbit ? mask : 0);
        m[row][col] += u[rbit][b];
      }
    } else if (g.kind == GateKind::CNOT) {
      std::size_t row = col;
      if (bit(col, g.q0)) {
        const std::size_t mask = std::size_t{1} << (n_qubits - 1 - g.q1);
        row = col ^ mask;
      }
      m[row][col] = 1.0;
    } else if (g.kind == GateKind::CZ) {
      m[col][col] = (bit(col, g.q0) && bit(col, g.q1)) ? -1.0 : 1.0;
    } else if (g.kind == GateKind::SWAP) {
      const auto ba = bit(col, g.q0), bb = bit(col, g.q1);
      std::size_t row = col;
      const std::size_t ma = std::size_t{1} << (n_qubits - 1 - g.q0);
      const std::size_t mb = std::size_t{1} << (n_qubits - 1 - g.q1);
      row = (row & ~(ma | mb)) | (bb ? ma : 0) | (ba ? mb : 0);
      m[row][col] = 1.0;
    }
  }
  return m;
}

inline Matrix dense_circuit_matrix(const Circuit &c) {
  Matrix u = identity_matrix(std::size_t{1} << c.n_qubits);
  for (const auto &g : c.gates) u = matmul(dense_gate_matrix(g, c.n_qubits), u);
  return u;
}

inline std::vector<cdouble> matvec(const Matrix &m, const std::vector<cdouble> &v) {
  std::vector<cdouble> out(v.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  }
  return out;
}

inline Statevector random_state(int n_qubits, Rng &rng) {
  std::vector<cdouble> amp(std::size_t{1} << n_qubits);
  for (auto &a : amp) a = cdouble{rng.normal(), rng.normal()};
  Statevector s(n_qubits, std::move(amp));
  s.normalize();
  return s;
}

inline Circuit random_supported_circuit(int wires, int n_gates, Rng &rng) {
  Circuit c(wires);
  for (int i = 0; i < n_gates; ++i) {
    const auto pick = rng.uniform_int(wires > 1 ? 4 : 3);
    const int q = static_cast<int>(rng.uniform_int(wires));
    switch (pick) {
      case 0: c.add(Gate::rx(q, rng.uniform_angle())); break;
      case 1: c.add(Gate::rz(q, rng.uniform_angle())); break;
      case 2: c.add(Gate::h(q)); break;
      default: {
        const int a = static_cast<int>(rng.uniform_int(wires - 1));
        if (rng.bit()) {
          c.add(Gate::cnot(a, a + 1));
        } else {
          c.add(Gate::cnot(a + 1, a));
        }
        break;
      }
    }
  }
  return c;
}

}  // namespace qfl::test
