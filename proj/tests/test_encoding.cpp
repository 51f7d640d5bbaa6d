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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qfl/classifier.hpp"
#include "qfl/encoding.hpp"
#include "test_helpers.hpp"

using namespace qfl;

namespace {

std::vector<cdouble> random_complex_unit(std::size_t dim, Rng &rng) {
  std::vector<cdouble> v(dim);
  double norm = 0.0;
  for (auto &a : v) {
    a = cdouble{rng.normal(), rng.normal()};
    norm += std::norm(a);
  }
  const double inv = 1.0 / std::sqrt(norm);
  for (auto &a : v) a *= inv;
  return v;
}

std::vector<double> random_real_unit(std::size_t dim, Rng &rng) {
  std::vector<double> v(dim);
  double norm = 0.0;
  for (auto &a : v) {
    a = rng.uniform();
    norm += a * a;
  }
  const double inv = 1.0 / std::sqrt(norm);
  for (auto &a : v) a *= inv;
  return v;
}

// Amplitudes equal up to one global phase, elementwise.
void check_equal_up_to_phase(const std::vector<cdouble> &a,
                             const std::vector<cdouble> &b, double tol) {
  cdouble phase{1.0, 0.0};
  bool found = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) > 1e-6) {
      phase = b[i] / a[i];
      found = true;
      break;
    }
  }
  REQUIRE(found);
  CHECK(std::abs(std::abs(phase) - 1.0) < 1e-8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] * phase - b[i]) < tol);
  }
}

}  // namespace

TEST_CASE("basis vector encodes to an empty circuit with fidelity 1") {
  FeatureVector f;
  f.values.assign(8, 0.0);
  f.values[0] = 1.0;
  const auto prep = amplitude_encode(f, 3);
  CHECK(prep.circuit.gates.empty());
  CHECK(prep.target_fidelity_achieved == doctest::Approx(1.0));
}

TEST_CASE("uniform vector prepares the Hadamard image of |0...0>") {
  const int n = 3;
  FeatureVector f;
  f.values.assign(8, 1.0 / std::sqrt(8.0));
  const auto prep = amplitude_encode(f, n);
  Statevector got(n);
  run_circuit_in_place(got, prep.circuit);
  Circuit h_all(n);
  for (int q = 0; q < n; ++q) h_all.add(Gate::h(q));
  const auto want = run_circuit(Statevector(n), h_all);
  check_equal_up_to_phase(want.amplitudes(), got.amplitudes(), 1e-8);
}

TEST_CASE("random real vectors encode with near-perfect fidelity") {
  Rng rng(31);
  for (int n : {6, 8}) {
    for (int trial = 0; trial < 3; ++trial) {
      FeatureVector f;
      f.values = random_real_unit(std::size_t{1} << n, rng);
      const auto prep = amplitude_encode(f, n);
      CHECK(prep.target_fidelity_achieved >= 1.0 - 1e-10);
    }
  }
}

TEST_CASE("complex targets and short padded vectors also encode") {
  Rng rng(32);
  const auto target = random_complex_unit(16, rng);
  const auto prep = amplitude_encode_complex(target, 4);
  CHECK(prep.target_fidelity_achieved >= 1.0 - 1e-10);
  Statevector got(4);
  run_circuit_in_place(got, prep.circuit);
  check_equal_up_to_phase(target, got.amplitudes(), 1e-8);

  // 30 features in a 64-dim register, tail-padded with zeros.
  FeatureVector f;
  f.values = random_real_unit(30, rng);
  const auto padded = amplitude_encode(f, 6);
  CHECK(padded.target_fidelity_achieved >= 1.0 - 1e-10);
  Statevector got2(6);
  run_circuit_in_place(got2, padded.circuit);
  std::vector<cdouble> want(64, cdouble{0.0, 0.0});
  for (int i = 0; i < 30; ++i) want[i] = f.values[i];
  check_equal_up_to_phase(want, got2.amplitudes(), 1e-8);
}

TEST_CASE("round trip property over random vectors") {
  Rng rng(33);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(4));
    const auto target = random_complex_unit(std::size_t{1} << n, rng);
    const auto prep = amplitude_encode_complex(target, n);
    Statevector got(n);
    run_circuit_in_place(got, prep.circuit);
    check_equal_up_to_phase(target, got.amplitudes(), 1e-8);
  }
}

TEST_CASE("gate-set purity: only RX, RZ and adjacent CNOTs") {
  Rng rng(34);
  FeatureVector f;
  f.values = random_real_unit(256, rng);
  const auto prep = amplitude_encode(f, 8);
  for (const auto &g : prep.circuit.gates) {
    const bool rotation = g.kind == GateKind::RX || g.kind == GateKind::RZ;
    const bool adjacent_cnot =
        g.kind == GateKind::CNOT && std::abs(g.q0 - g.q1) == 1;
    CHECK((rotation || adjacent_cnot));
  }
}

TEST_CASE("gate count stays under the documented bound") {
  Rng rng(35);
  for (int n : {4, 6, 8}) {
    FeatureVector f;
    f.values = random_real_unit(std::size_t{1} << n, rng);
    const auto prep = amplitude_encode(f, n);
    const std::size_t bound = static_cast<std::size_t>(
        kPreparationGateCountFactor) * n * (std::size_t{1} << n);
    CHECK(prep.circuit.gates.size() <= bound);
  }
}

TEST_CASE("unnormalized or oversized inputs are rejected") {
  FeatureVector f;
  f.values = {0.5, 0.5};
  CHECK_THROWS_AS(amplitude_encode(f, 1), std::exception);
  FeatureVector g;
  g.values.assign(16, 0.25);
  CHECK_THROWS_AS(amplitude_encode(g, 2), std::exception);
}

TEST_CASE("route_to_adjacent rewrites CZ, SWAP and distant CNOTs") {
  Circuit c(4);
  c.add(Gate::cz(0, 3));
  c.add(Gate::swap(1, 3));
  c.add(Gate::cnot(3, 0));
  const auto routed = route_to_adjacent(c);
  for (const auto &g : routed.gates) {
    const bool ok = g.kind == GateKind::RX || g.kind == GateKind::RZ ||
                    g.kind == GateKind::H ||
                    (g.kind == GateKind::CNOT && std::abs(g.q0 - g.q1) == 1);
    CHECK(ok);
  }
  // Unitary preserved: compare dense matrices column by column.
  const auto want = test::dense_circuit_matrix(c);
  const auto got = test::dense_circuit_matrix(routed);
  for (std::size_t col = 0; col < want.size(); ++col) {
    for (std::size_t row = 0; row < want.size(); ++row) {
      CHECK(std::abs(want[row][col] - got[row][col]) < 1e-9);
    }
  }
}

TEST_CASE("rotation encoding fills the leading parameters") {
  const auto params = rotation_encode({0.1, 0.2, 0.3}, 2, 2, 2);
  REQUIRE(params.size() == 8);
  CHECK(params[0] == 0.1);
  CHECK(params[1] == 0.2);
  CHECK(params[2] == 0.3);
  for (std::size_t i = 3; i < 8; ++i) CHECK(params[i] == 0.0);

  // 256 features into the 8-qubit depth-11 three-rotation template.
  std::vector<double> features(256, 0.5);
  const auto big = rotation_encode(features, 8, 11, 3);
  REQUIRE(big.size() == 264);
  for (int i = 0; i < 256; ++i) CHECK(big[i] == 0.5);
  for (int i = 256; i < 264; ++i) CHECK(big[i] == 0.0);

  CHECK_THROWS_AS(rotation_encode(features, 2, 2, 2), std::exception);
}

TEST_CASE("all-zero rotation encoding leaves |0...0> fixed in probability") {
  const auto tpl = build_classifier(2, 2, {0, 1});
  const auto params = rotation_encode({}, 2, 2, 2);
  ModelParams p;
  p.theta = params;
  const auto g = forward(tpl, p, Statevector(2));
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single feature maps to a rotation image of |0>") {
  const double v = 0.8;
  const auto params = rotation_encode({v}, 1, 1, 2);
  const auto tpl = build_classifier(1, 1, {0});
  ModelParams p;
  p.theta = params;
  const auto g = forward(tpl, p, Statevector(1));
  // RZ(v) then RX(0): probabilities unchanged from |0>.
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-12));
  // With layout starting in RX the probability follows cos^2(v/2).
  const auto tpl_x = build_classifier(1, 1, {0}, {GateKind::RX, GateKind::RZ});
  const auto g2 = forward(tpl_x, p, Statevector(1));
  CHECK(g2[0] == doctest::Approx(std::cos(v / 2) * std::cos(v / 2)).epsilon(1e-12));
}

TEST_CASE("scale_to_angle_range maps [lo, hi] onto [0, pi]") {
  const auto scaled = scale_to_angle_range({0.0, 0.5, 1.0}, 0.0, 1.0);
  CHECK(scaled[0] == doctest::Approx(0.0));
  CHECK(scaled[1] == doctest::Approx(std::numbers::pi / 2));
  CHECK(scaled[2] == doctest::Approx(std::numbers::pi));
  // Constant input degrades to zeros rather than dividing by zero.
  const auto flat = scale_to_angle_range({2.0, 2.0}, 2.0, 2.0);
  CHECK(flat[0] == 0.0);
  CHECK(flat[1] == 0.0);
}
