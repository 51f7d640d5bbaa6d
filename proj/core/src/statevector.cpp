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

#include "qfl/statevector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qfl {

namespace {
void check_register_size(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("register size " + std::to_string(n_qubits) +
                                " outside [1, " + std::to_string(kMaxQubits) +
                                "]");
  }
}
}  // namespace

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
  check_register_size(n_qubits);
  amp_.assign(std::uint64_t{1} << n_qubits, cdouble{0.0, 0.0});
  amp_[0] = 1.0;
}

Statevector::Statevector(int n_qubits, std::vector<cdouble> amplitudes)
    : n_qubits_(n_qubits), amp_(std::move(amplitudes)) {
  check_register_size(n_qubits);
  if (amp_.size() != (std::uint64_t{1} << n_qubits)) {
    throw std::invalid_argument("amplitude vector length is not 2^n_qubits");
  }
}

Statevector Statevector::computational_basis(int n_qubits, std::uint64_t index) {
  Statevector s(n_qubits);
  if (index >= s.dim()) throw std::invalid_argument("basis index out of range");
  s.amp_[0] = 0.0;
  s.amp_[index] = 1.0;
  return s;
}

double Statevector::norm_sq() const {
  double total = 0.0;
  for (const auto &a : amp_) total += std::norm(a);
  return total;
}

void Statevector::normalize() {
  const double n2 = norm_sq();
  if (n2 <= 0.0) throw std::domain_error("cannot normalize a zero state");
  const double inv = 1.0 / std::sqrt(n2);
  for (auto &a : amp_) a *= inv;
}

double Statevector::fidelity(const Statevector &a, const Statevector &b) {
  if (a.n_qubits_ != b.n_qubits_) {
    throw std::invalid_argument("fidelity of states with different registers");
  }
  cdouble overlap{0.0, 0.0};
  for (std::uint64_t i = 0; i < a.dim(); ++i) {
    overlap += std::conj(a.amp_[i]) * b.amp_[i];
  }
  return std::norm(overlap);
}

void Statevector::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= n_qubits_) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) +
                            " out of range for " + std::to_string(n_qubits_) +
                            " qubits");
  }
}

void Statevector::apply_rx_in_place(int qubit, double angle) {
  check_qubit(qubit);
  const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
  const cdouble mis{0.0, -s};
  const std::uint64_t st = stride(qubit), n = dim();
  for (std::uint64_t base = 0; base < n; base += 2 * st) {
    for (std::uint64_t i = base; i < base + st; ++i) {
      const cdouble a0 = amp_[i], a1 = amp_[i + st];
      amp_[i] = c * a0 + mis * a1;
      amp_[i + st] = mis * a0 + c * a1;
    }
  }
}

void Statevector::apply_rz_in_place(int qubit, double angle) {
  check_qubit(qubit);
  const cdouble p0 = std::polar(1.0, -angle / 2.0);
  const cdouble p1 = std::polar(1.0, angle / 2.0);
  const std::uint64_t st = stride(qubit), n = dim();
  for (std::uint64_t base = 0; base < n; base += 2 * st) {
    for (std::uint64_t i = base; i < base + st; ++i) {
      amp_[i] *= p0;
      amp_[i + st] *= p1;
    }
  }
}

void Statevector::apply_h_in_place(int qubit) {
  check_qubit(qubit);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const std::uint64_t st = stride(qubit), n = dim();
  for (std::uint64_t base = 0; base < n; base += 2 * st) {
    for (std::uint64_t i = base; i < base + st; ++i) {
      const cdouble a0 = amp_[i], a1 = amp_[i + st];
      amp_[i] = (a0 + a1) * inv_sqrt2;
      amp_[i + st] = (a0 - a1) * inv_sqrt2;
    }
  }
}

void Statevector::apply_x_in_place(int qubit) {
  check_qubit(qubit);
  const std::uint64_t st = stride(qubit), n = dim();
  for (std::uint64_t base = 0; base < n; base += 2 * st) {
    for (std::uint64_t i = base; i < base + st; ++i) {
      std::swap(amp_[i], amp_[i + st]);
    }
  }
}

void Statevector::apply_z_in_place(int qubit) {
  check_qubit(qubit);
  const std::uint64_t st = stride(qubit), n = dim();
  for (std::uint64_t base = 0; base < n; base += 2 * st) {
    for (std::uint64_t i = base; i < base + st; ++i) amp_[i + st] = -amp_[i + st];
  }
}

void Statevector::apply_cnot_in_place(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw std::invalid_argument("CNOT targets must differ");
  const std::uint64_t sc = stride(control), st = stride(target), n = dim();
  for (std::uint64_t i = 0; i < n; ++i) {
    if ((i & sc) != 0 && (i & st) == 0) std::swap(amp_[i], amp_[i | st]);
  }
}

void Statevector::apply_cz_in_place(int a, int b) {
  check_qubit(a);
  check_qubit(b);
  if (a == b) throw std::invalid_argument("CZ targets must differ");
  const std::uint64_t sa = stride(a), sb = stride(b), n = dim();
  const std::uint64_t mask = sa | sb;
  for (std::uint64_t i = 0; i < n; ++i) {
    if ((i & mask) == mask) amp_[i] = -amp_[i];
  }
}

void Statevector::apply_swap_in_place(int a, int b) {
  check_qubit(a);
  check_qubit(b);
  if (a == b) throw std::invalid_argument("SWAP targets must differ");
  const std::uint64_t sa = stride(a), sb = stride(b), n = dim();
  for (std::uint64_t i = 0; i < n; ++i) {
    if ((i & sa) != 0 && (i & sb) == 0) std::swap(amp_[i], amp_[(i & ~sa) | sb]);
  }
}

double Statevector::xy_outcome_probability(int qubit, double delta) const {
  check_qubit(qubit);
  // p(0) = sum |(a0 + e^{-i delta} a1)|^2 / 2 over pairs.
  const cdouble phase = std::polar(1.0, -delta);
  const std::uint64_t st = stride(qubit), n = dim();
  double p0 = 0.0;
  for (std::uint64_t base = 0; base < n; base += 2 * st) {
    for (std::uint64_t i = base; i < base + st; ++i) {
      p0 += 0.5 * std::norm(amp_[i] + phase * amp_[i + st]);
    }
  }
  return p0;
}

void Statevector::collapse_xy_in_place(int qubit, double delta, int outcome) {
  check_qubit(qubit);
  const double sign = (outcome == 0) ? 1.0 : -1.0;
  const cdouble phase_in = std::polar(1.0, -delta);
  const cdouble phase_out = std::polar(1.0, delta);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const std::uint64_t st = stride(qubit), n = dim();
  // Measured qubit stays in |+/-_delta>; overlap scales the pair.
  for (std::uint64_t base = 0; base < n; base += 2 * st) {
    for (std::uint64_t i = base; i < base + st; ++i) {
      const cdouble overlap =
          (amp_[i] + sign * phase_in * amp_[i + st]) * inv_sqrt2;
      amp_[i] = overlap * inv_sqrt2;
      amp_[i + st] = overlap * sign * phase_out * inv_sqrt2;
    }
  }
  normalize();
}

std::vector<double> Statevector::marginal_distribution(
    const std::vector<int> &qubits) const {
  if (qubits.empty()) throw std::invalid_argument("empty readout list");
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    check_qubit(qubits[i]);
    for (std::size_t j = i + 1; j < qubits.size(); ++j) {
      if (qubits[i] == qubits[j]) {
        throw std::invalid_argument("readout qubits must be distinct");
      }
    }
  }
  const std::size_t m = qubits.size();
  std::vector<double> out(std::size_t{1} << m, 0.0);
  const std::uint64_t n = dim();
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t bucket = 0;
    for (std::size_t k = 0; k < m; ++k) {
      bucket = (bucket << 1) | ((i >> (n_qubits_ - 1 - qubits[k])) & 1ULL);
    }
    out[bucket] += std::norm(amp_[i]);
  }
  return out;
}

}  // namespace qfl
