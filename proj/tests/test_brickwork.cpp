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

#include <algorithm>
#include <numbers>
#include <set>

#include "qfl/brickwork.hpp"
#include "qfl/window_sim.hpp"
#include "test_helpers.hpp"

using namespace qfl;

namespace {

constexpr double kPi = std::numbers::pi;

// Direct-backend reference: distribution the pattern must reproduce.
std::vector<double> circuit_distribution(const Circuit &prep, const Circuit &c) {
  Statevector s(c.n_qubits);
  if (prep.n_qubits != 0) run_circuit_in_place(s, prep);
  run_circuit_in_place(s, c);
  std::vector<int> all(c.n_qubits);
  for (int i = 0; i < c.n_qubits; ++i) all[i] = i;
  return readout_distribution(s, all);
}

void check_pattern_equivalence(const Circuit &c, const Circuit &prep,
                               double tol = 1e-9) {
  const auto pattern = compile_circuit(c);
  PatternEvalOptions opt;
  opt.mode = PatternEvalMode::kExactBranchSum;
  opt.branch_site_cap = 26;
  const auto got = evaluate_pattern(pattern, prep, opt);
  const auto want = circuit_distribution(prep, c);
  REQUIRE(got.size() == want.size());
  CHECK(total_variation(got, want) < tol);
}

}  // namespace

TEST_CASE("single-row brickwork is a line graph") {
  const auto g = build_brickwork(1, 2);
  CHECK(g.n_cols == 9);
  for (const auto &[a, b] : g.cz_edges) {
    CHECK(a.row == b.row);  // horizontal only
    CHECK(b.col == a.col + 1);
  }
}

TEST_CASE("two rows, one brick matches the hand-enumerated edge set") {
  const auto g = build_brickwork(2, 1);
  CHECK(g.n_cols == 5);
  std::set<std::pair<int, int>> vertical_cols;
  int horizontal = 0;
  for (const auto &[a, b] : g.cz_edges) {
    if (a.row == b.row) {
      ++horizontal;
    } else {
      CHECK(a.col == b.col);
      vertical_cols.insert({a.col, a.row});
    }
  }
  CHECK(horizontal == 2 * 4);
  // Rungs at columns 2 and 4 joining rows 0 and 1.
  CHECK(vertical_cols == std::set<std::pair<int, int>>{{2, 0}, {4, 0}});
}

TEST_CASE("four rows: rung row pairs alternate between brick columns") {
  const auto g = build_brickwork(4, 4);
  for (const auto &[a, b] : g.cz_edges) {
    if (a.row == b.row) continue;
    const int brick = (a.col % 4 == 2) ? (a.col - 2) / 4 : a.col / 4 - 1;
    const int top = std::min(a.row, b.row);
    CHECK(top % 2 == brick % 2);
    CHECK(std::abs(a.row - b.row) == 1);
  }
  // Programmatic tiling enumeration: expected rung count.
  int rungs = 0;
  for (const auto &[a, b] : g.cz_edges) {
    if (a.row != b.row) ++rungs;
  }
  // even bricks pair (0,1),(2,3): 2 pairs x 2 columns; odd bricks pair (1,2).
  CHECK(rungs == 2 * (2 * 2) + 2 * (1 * 2));
}

TEST_CASE("edge set is symmetric-free of self loops and duplicates") {
  const auto g = build_brickwork(3, 3);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto &[a, b] : g.cz_edges) {
    CHECK(a != b);
    const auto ia = g.site_index(a), ib = g.site_index(b);
    const auto key = std::minmax(ia, ib);
    CHECK(seen.insert({key.first, key.second}).second);
  }
}

TEST_CASE("build_brickwork rejects nonpositive dimensions") {
  CHECK_THROWS_AS(build_brickwork(0, 1), std::exception);
  CHECK_THROWS_AS(build_brickwork(2, 0), std::exception);
}

TEST_CASE("adapt_angle applies sign flip and pi shift mod 2pi") {
  CHECK(adapt_angle(0.7, 0, 0) == doctest::Approx(0.7));
  CHECK(adapt_angle(kPi / 4, 1, 0) == doctest::Approx(7 * kPi / 4));
  CHECK(adapt_angle(kPi / 4, 0, 1) == doctest::Approx(5 * kPi / 4));
  CHECK(adapt_angle(kPi / 4, 1, 1) == doctest::Approx(3 * kPi / 4));
  CHECK(adapt_angle(0.0, 0, 0) == doctest::Approx(0.0));
}

TEST_CASE("identity circuit compiles to an all-zero pattern") {
  const auto p = compile_circuit(Circuit(2));
  for (const auto &s : p.measurement_order) {
    CHECK(p.phi[p.graph.site_index(s)] == 0.0);
  }
  // Distribution over output sites equals the input distribution.
  PatternEvalOptions opt;
  const auto out = evaluate_pattern(p, Circuit(), opt);
  CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-10));

  Circuit prep(2);
  prep.add(Gate::h(0)).add(Gate::cnot(0, 1));
  const auto bell = evaluate_pattern(p, prep, opt);
  CHECK(bell[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(bell[3] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("single CNOT pattern maps |10> to |11>") {
  Circuit c(2);
  c.add(Gate::cnot(0, 1));
  Circuit prep(2);
  prep.add(Gate::rx(0, kPi));  // |00> -> |10> up to phase
  const auto pattern = compile_circuit(c);
  PatternEvalOptions opt;
  const auto out = evaluate_pattern(pattern, prep, opt);
  CHECK(out[0b11] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("single-wire rotation pattern matches the statevector oracle") {
  Circuit c(1);
  c.add(Gate::rx(0, 0.7));
  check_pattern_equivalence(c, Circuit());
}

TEST_CASE("compiled Bell circuit gives the Bell distribution") {
  Circuit c(2);
  c.add(Gate::h(0)).add(Gate::cnot(0, 1));
  const auto pattern = compile_circuit(c);
  PatternEvalOptions opt;
  const auto out = evaluate_pattern(pattern, Circuit(), opt);
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(out[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(out[2] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(out[3] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("rotation bricks at random Euler triples pass the oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    Circuit c(2);
    const int wire = trial % 2;
    c.add(Gate::rz(wire, rng.uniform_angle()));
    c.add(Gate::rx(wire, rng.uniform_angle()));
    c.add(Gate::rz(wire, rng.uniform_angle()));
    Circuit prep = test::random_supported_circuit(2, 2, rng);
    check_pattern_equivalence(c, prep);
  }
}

TEST_CASE("CNOT bricks in both orientations pass the oracle") {
  for (bool control_top : {true, false}) {
    Circuit c(2);
    c.add(control_top ? Gate::cnot(0, 1) : Gate::cnot(1, 0));
    Rng rng(control_top ? 7 : 8);
    for (int trial = 0; trial < 4; ++trial) {
      Circuit prep = test::random_supported_circuit(2, 3, rng);
      check_pattern_equivalence(c, prep);
    }
  }
}

TEST_CASE("random supported circuits up to 2 wires x 3 bricks pass the oracle") {
  Rng rng(2024);
  int heavy = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Circuit c = test::random_supported_circuit(2, 3 + trial % 3, rng);
    const auto pattern = compile_circuit(c);
    if (pattern.graph.n_cols > 13) continue;  // keep within 3 bricks
    if (pattern.measured_count() > 16) ++heavy;
    Circuit prep = test::random_supported_circuit(2, 2, rng);
    check_pattern_equivalence(c, prep);
  }
  CHECK(heavy >= 1);  // at least one nontrivial pattern exercised
}

TEST_CASE("three-wire circuits compile via dummy-row padding") {
  Rng rng(55);
  Circuit c(3);
  c.add(Gate::rx(0, 0.4));
  c.add(Gate::cnot(1, 2));
  c.add(Gate::rz(2, 1.1));
  const auto pattern = compile_circuit(c);
  CHECK(pattern.graph.n_rows == 4);
  CHECK(pattern.logical_wires == 3);
  PatternEvalOptions opt;
  opt.mode = PatternEvalMode::kDeterministic;
  const auto got = evaluate_pattern(pattern, Circuit(), opt);
  const auto want = circuit_distribution(Circuit(), c);
  CHECK(total_variation(got, want) < 1e-9);
}

TEST_CASE("disabling corrections breaks equivalence for some circuit") {
  Circuit c(2);
  c.add(Gate::rz(0, 0.9)).add(Gate::rx(0, 1.3)).add(Gate::h(1));
  const auto pattern = compile_circuit(c);
  PatternEvalOptions opt;
  opt.apply_corrections = false;
  opt.branch_site_cap = 26;
  const auto got = evaluate_pattern(pattern, Circuit(), opt);
  const auto want = circuit_distribution(Circuit(), c);
  CHECK(total_variation(got, want) > 1e-3);
}

TEST_CASE("deterministic mode equals branch sum on corrected patterns") {
  Rng rng(77);
  int done = 0;
  while (done < 5) {
    Circuit c = test::random_supported_circuit(2, 4, rng);
    const auto pattern = compile_circuit(c);
    if (pattern.measured_count() > 24) continue;  // stay under the branch cap
    ++done;
    PatternEvalOptions exact;
    PatternEvalOptions det;
    det.mode = PatternEvalMode::kDeterministic;
    const auto a = evaluate_pattern(pattern, Circuit(), exact);
    const auto b = evaluate_pattern(pattern, Circuit(), det);
    CHECK(total_variation(a, b) < 1e-9);
  }
}

TEST_CASE("exact mode is deterministic and respects the branch cap") {
  Circuit c(2);
  c.add(Gate::rx(0, 0.3));
  const auto pattern = compile_circuit(c);
  PatternEvalOptions opt;
  const auto a = evaluate_pattern(pattern, Circuit(), opt);
  const auto b = evaluate_pattern(pattern, Circuit(), opt);
  CHECK(a == b);

  PatternEvalOptions capped;
  capped.branch_site_cap = 3;
  CHECK_THROWS_AS(evaluate_pattern(pattern, Circuit(), capped), std::exception);
}

TEST_CASE("sampled Bell pattern frequencies sit inside 3-sigma bounds") {
  Circuit c(2);
  c.add(Gate::h(0)).add(Gate::cnot(0, 1));
  const auto pattern = compile_circuit(c);
  Rng rng(31337);
  PatternEvalOptions opt;
  opt.mode = PatternEvalMode::kSampled;
  opt.shots = 10000;
  opt.rng = &rng;
  const auto freq = evaluate_pattern(pattern, Circuit(), opt);
  const double sigma = std::sqrt(0.5 * 0.5 / opt.shots);
  CHECK(std::abs(freq[0] - 0.5) < 3 * sigma);
  CHECK(std::abs(freq[3] - 0.5) < 3 * sigma);
  CHECK(freq[1] + freq[2] == doctest::Approx(0.0));
}

TEST_CASE("sampled mode is a function of the seed") {
  Circuit c(2);
  c.add(Gate::rx(0, 1.0)).add(Gate::cnot(0, 1));
  const auto pattern = compile_circuit(c);
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    PatternEvalOptions opt;
    opt.mode = PatternEvalMode::kSampled;
    opt.shots = 200;
    opt.rng = &rng;
    return evaluate_pattern(pattern, Circuit(), opt);
  };
  CHECK(run(5) == run(5));
}

TEST_CASE("non-adjacent CNOT and unsupported kinds are rejected") {
  Circuit c(3);
  c.add(Gate::cnot(0, 2));
  CHECK_THROWS_AS(compile_circuit(c), std::exception);
  Circuit s(2);
  s.add(Gate::swap(0, 1));
  CHECK_THROWS_AS(compile_circuit(s), std::exception);
}

TEST_CASE("pattern text dump lists sites, angles and dependencies") {
  Circuit c(2);
  c.add(Gate::rx(0, 0.25));
  const auto pattern = compile_circuit(c);
  const auto text = pattern_to_text(pattern);
  CHECK(text.find("brickwork-pattern v1 rows=2") != std::string::npos);
  CHECK(text.find("site 0 0 phi=") != std::string::npos);
  CHECK(text.find("xdep=[") != std::string::npos);
  CHECK(text.find("output 0 4") != std::string::npos);
}
