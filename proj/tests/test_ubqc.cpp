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

#include "qfl/stats.hpp"
#include "qfl/ubqc.hpp"
#include "test_helpers.hpp"

using namespace qfl;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> direct_distribution(const Circuit &c) {
  const auto s = run_circuit(Statevector(c.n_qubits), c);
  std::vector<int> all(c.n_qubits);
  for (int i = 0; i < c.n_qubits; ++i) all[i] = i;
  return readout_distribution(s, all);
}
}  // namespace

TEST_CASE("client preparation draws uniform thetas") {
  Circuit c(2);
  c.add(Gate::rx(0, 0.3));
  const auto pattern = compile_circuit(c);
  Rng rng(42);
  std::vector<double> draws;
  for (int i = 0; i < 12; ++i) {
    ClientSession session(pattern, rng);
    const auto &thetas = session.site_thetas();
    draws.insert(draws.end(), thetas.begin(), thetas.end());
  }
  // 12 sessions x 10 sites = 120 draws here; the heavy KS check runs on
  // a long stream below.
  for (double t : draws) {
    CHECK(t >= 0.0);
    CHECK(t < 2 * kPi);
  }
  Rng stream(7);
  std::vector<double> many(10000);
  for (auto &v : many) v = stream.uniform_angle();
  const double d = ks_statistic_uniform(many, 2 * kPi);
  // 1% critical value of the one-sample KS statistic at n = 10^4.
  CHECK(d < 1.63 / std::sqrt(10000.0));
}

TEST_CASE("server_entangle matches hand results and edge-order invariance") {
  BrickworkGraph lone{1, 1, {}};
  const auto single = server_entangle({kPi / 3}, lone);
  CHECK(std::abs(single.amplitude(0) - cdouble{1 / std::sqrt(2.0), 0.0}) < 1e-12);
  CHECK(std::abs(single.amplitude(1) - std::polar(1 / std::sqrt(2.0), kPi / 3)) <
        1e-12);

  BrickworkGraph pair{2, 1, {{Site{0, 0}, Site{1, 0}}}};
  const auto two = server_entangle({0.0, 0.0}, pair);
  CHECK(std::abs(two.amplitude(0b00) - cdouble{0.5, 0.0}) < 1e-12);
  CHECK(std::abs(two.amplitude(0b01) - cdouble{0.5, 0.0}) < 1e-12);
  CHECK(std::abs(two.amplitude(0b10) - cdouble{0.5, 0.0}) < 1e-12);
  CHECK(std::abs(two.amplitude(0b11) + cdouble{0.5, 0.0}) < 1e-12);

  // Random 6-site brickwork fragment: reversing the CZ order changes nothing.
  auto fragment = build_brickwork(2, 1);
  fragment.n_cols = 3;
  std::erase_if(fragment.cz_edges, [](const auto &e) {
    return e.first.col > 2 || e.second.col > 2;
  });
  Rng rng(5);
  std::vector<double> thetas(6);
  for (auto &t : thetas) t = rng.uniform_angle();
  const auto fwd = server_entangle(thetas, fragment);
  auto reversed = fragment;
  std::reverse(reversed.cz_edges.begin(), reversed.cz_edges.end());
  const auto rev = server_entangle(thetas, reversed);
  for (std::uint64_t i = 0; i < fwd.dim(); ++i) {
    CHECK(std::abs(fwd.amplitude(i) - rev.amplitude(i)) < 1e-12);
  }
}

TEST_CASE("instruction angle is phi' + theta + pi r mod 2pi") {
  Circuit c(1);
  c.add(Gate::rz(0, 0.0));
  const auto pattern = compile_circuit(c);
  const auto n = pattern.graph.site_count();

  // First measured site has no dependencies, so phi' = phi = 0 for the
  // identity pattern; inject theta and r to pin delta.
  std::vector<double> theta(n, 0.0);
  std::vector<int> r(n, 0);
  theta[pattern.graph.site_index(Site{0, 0})] = kPi / 2;
  r[pattern.graph.site_index(Site{0, 0})] = 1;
  ClientSession s1(pattern, theta, r);
  CHECK(s1.next_instruction().delta == doctest::Approx(3 * kPi / 2));

  std::vector<double> theta2(n, 0.0);
  std::vector<int> r2(n, 0);
  ClientSession s2(pattern, theta2, r2);
  CHECK(s2.next_instruction().delta == doctest::Approx(0.0));

  std::vector<int> r3(n, 0);
  r3[pattern.graph.site_index(Site{0, 0})] = 1;
  ClientSession s3(pattern, theta2, r3);
  CHECK(s3.next_instruction().delta == doctest::Approx(kPi));
}

TEST_CASE("decryption is s = b xor r and guards ordering") {
  Circuit c(1);
  c.add(Gate::rz(0, 0.4));
  const auto pattern = compile_circuit(c);
  const auto n = pattern.graph.site_count();
  for (int b = 0; b < 2; ++b) {
    for (int rr = 0; rr < 2; ++rr) {
      std::vector<double> theta(n, 0.0);
      std::vector<int> r(n, rr);
      ClientSession session(pattern, theta, r);
      const Site site = session.cursor_site();
      session.record_result({MessageKind::kMeasureResult, site, 0.0, b});
      CHECK(session.decrypted_outcome(site) == (b ^ rr));
    }
  }
  std::vector<double> theta(n, 0.0);
  std::vector<int> r(n, 0);
  ClientSession session(pattern, theta, r);
  Message wrong{MessageKind::kMeasureResult, Site{0, 3}, 0.0, 0};
  CHECK_THROWS_AS(session.record_result(wrong), std::exception);
}

TEST_CASE("server measures an unentangled site deterministically") {
  // An edge-free fragment keeps the site in |+_theta>: measuring along
  // the matching angle is an eigenstate measurement.
  BrickworkGraph bare{1, 2, {}};
  const double theta = 1.9;
  ServerSession server(bare, {theta, 0.0});
  Message instr{MessageKind::kMeasureInstruction, Site{0, 0}, theta, 0};
  CHECK(server.outcome0_probability(theta) == doctest::Approx(1.0).epsilon(1e-12));
  const auto res = server.measure(instr, 0.97);
  CHECK(res.bit == 0);

  // Double measurement and out-of-order instructions are rejected.
  Circuit c(1);
  const auto pattern = compile_circuit(c);
  ServerSession server2(pattern.graph,
                        std::vector<double>(pattern.graph.site_count(), 0.0));
  Message first{MessageKind::kMeasureInstruction, Site{0, 0}, 0.0, 0};
  server2.measure(first, 0.5);
  Message again{MessageKind::kMeasureInstruction, Site{0, 0}, 0.0, 0};
  CHECK_THROWS_AS(server2.measure(again, 0.5), std::exception);
  Message skip{MessageKind::kMeasureInstruction, Site{0, 3}, 0.0, 0};
  CHECK_THROWS_AS(server2.measure(skip, 0.5), std::exception);
}

TEST_CASE("r = 1 mirrors the raw outcome distribution of r = 0") {
  Circuit c(1);
  c.add(Gate::rx(0, 1.1));
  const auto pattern = compile_circuit(c);
  const auto n = pattern.graph.site_count();
  Rng draw(9);
  std::vector<double> theta(n);
  for (auto &t : theta) t = draw.uniform_angle();

  // r relabels the measured basis pair by a pi shift, so the raw bit
  // distribution at the first site flips exactly.
  auto first_site_p0 = [&](int rv) {
    std::vector<int> r(n, rv);
    ClientSession client(pattern, theta, r);
    ServerSession server(pattern.graph, client.site_thetas());
    return server.outcome0_probability(client.next_instruction().delta);
  };
  CHECK(first_site_p0(0) + first_site_p0(1) == doctest::Approx(1.0).epsilon(1e-12));

  // And over paired seeded sessions the frequencies mirror within
  // binomial noise.
  auto first_bit_freq = [&](int rv, std::uint64_t seed) {
    int ones = 0;
    const int sessions = 400;
    Rng coins(seed);
    for (int i = 0; i < sessions; ++i) {
      std::vector<int> r(n, rv);
      ClientSession client(pattern, theta, r);
      ServerSession server(pattern.graph, client.site_thetas());
      const auto res = server.measure(client.next_instruction(), coins.uniform());
      ones += res.bit;
    }
    return static_cast<double>(ones) / sessions;
  };
  const double f0 = first_bit_freq(0, 7);
  const double f1 = first_bit_freq(1, 7);
  CHECK(std::abs((1.0 - f1) - f0) < 0.1);
}

TEST_CASE("run_delegated: identity and Bell circuits, exact branch sum") {
  Rng rng(3);
  UbqcOptions opt;
  opt.mode = PatternEvalMode::kExactBranchSum;
  const auto id = run_delegated(Circuit(1), opt, rng);
  CHECK(id.distribution[0] == doctest::Approx(1.0).epsilon(1e-9));

  Circuit bell(2);
  bell.add(Gate::h(0)).add(Gate::cnot(0, 1));
  UbqcOptions opt2;
  opt2.mode = PatternEvalMode::kExactBranchSum;
  opt2.branch_site_cap = 26;
  const auto out = run_delegated(bell, opt2, rng);
  CHECK(out.distribution[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(out.distribution[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(out.distribution[2] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(out.distribution[3] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("delegated deterministic mode matches the direct backend") {
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    Circuit c = test::random_supported_circuit(2, 4, rng);
    UbqcOptions opt;
    opt.mode = PatternEvalMode::kDeterministic;
    Rng run_rng(trial);
    const auto got = run_delegated(c, opt, run_rng);
    CHECK(total_variation(got.distribution, direct_distribution(c)) < 1e-9);
  }
}

TEST_CASE("delegated sampled mode is within binomial bounds of direct") {
  Circuit c(2);
  c.add(Gate::h(0)).add(Gate::cnot(0, 1));
  UbqcOptions opt;
  opt.mode = PatternEvalMode::kSampled;
  opt.shots = 4000;
  Rng rng(2718);
  const auto got = run_delegated(c, opt, rng);
  const auto want = direct_distribution(c);
  for (std::size_t i = 0; i < want.size(); ++i) {
    const double sigma = std::sqrt(std::max(want[i] * (1 - want[i]), 1e-6) /
                                   opt.shots);
    CHECK(std::abs(got.distribution[i] - want[i]) < 4 * sigma + 1e-9);
  }
}

TEST_CASE("theta=0, r=0 protocol reduces bitwise to plain pattern sampling") {
  Circuit c(2);
  c.add(Gate::rz(0, 0.8)).add(Gate::cnot(0, 1)).add(Gate::rx(1, 0.3));

  UbqcOptions opt;
  opt.mode = PatternEvalMode::kSampled;
  opt.shots = 1;
  opt.client.theta_zero_sabotage = true;
  opt.client.force_r_zero = true;
  opt.client_seed = 99;  // keep the coin stream aligned
  Rng rng(424242);
  const auto delegated = run_delegated(c, opt, rng);
  std::vector<int> delegated_bits;
  std::vector<double> delegated_deltas;
  for (const auto &m : delegated.transcript.messages) {
    if (m.kind == MessageKind::kMeasureInstruction) {
      delegated_deltas.push_back(m.delta);
    } else if (m.kind == MessageKind::kMeasureResult) {
      delegated_bits.push_back(m.bit);
    }
  }

  // Plain MBQC: the same pattern driven without the encryption layer,
  // consuming the same coin stream. Outcome bits must match bitwise.
  Circuit prefixed(c.n_qubits);
  for (int q = 0; q < c.n_qubits; ++q) prefixed.add(Gate::h(q));
  prefixed.gates.insert(prefixed.gates.end(), c.gates.begin(), c.gates.end());
  const auto pattern = compile_circuit(prefixed);
  Rng coins(424242);
  WindowSim sim(pattern.graph,
                std::vector<double>(pattern.graph.site_count(), 0.0));
  std::vector<int> outcomes(pattern.graph.site_count(), -1);
  std::vector<int> plain_bits;
  std::vector<double> plain_deltas;
  while (!sim.done()) {
    const Site s = sim.current_site();
    const auto idx = pattern.graph.site_index(s);
    int sx = 0, sz = 0;
    for (const auto &d : pattern.x_deps[idx]) sx ^= outcomes[pattern.graph.site_index(d)];
    for (const auto &d : pattern.z_deps[idx]) sz ^= outcomes[pattern.graph.site_index(d)];
    const double delta = adapt_angle(pattern.phi[idx], sx, sz);
    const double p0 = sim.outcome0_probability(delta);
    const int outcome = (coins.uniform() < p0) ? 0 : 1;
    sim.commit(delta, outcome);
    outcomes[idx] = outcome;
    plain_bits.push_back(outcome);
    plain_deltas.push_back(delta);
  }
  REQUIRE(plain_bits.size() <= delegated_bits.size());
  for (std::size_t i = 0; i < plain_bits.size(); ++i) {
    CHECK(plain_bits[i] == delegated_bits[i]);
  }
  // With zero secrets the instructions expose the adapted angles directly.
  REQUIRE(plain_deltas.size() == delegated_deltas.size());
  for (std::size_t i = 0; i < plain_deltas.size(); ++i) {
    CHECK(plain_deltas[i] == delegated_deltas[i]);
  }
}

TEST_CASE("transcript serialization round-trips and hides the secrets") {
  Circuit c(2);
  c.add(Gate::rz(0, 1.234)).add(Gate::cnot(0, 1));
  UbqcOptions opt;
  opt.mode = PatternEvalMode::kSampled;
  opt.shots = 1;
  opt.client_seed = 31;
  Rng rng(8);
  const auto res = run_delegated(c, opt, rng);
  const auto bytes = serialize_transcript(res.transcript);
  const auto parsed = parse_transcript(bytes);
  REQUIRE(parsed.messages.size() == res.transcript.messages.size());
  for (std::size_t i = 0; i < parsed.messages.size(); ++i) {
    CHECK(parsed.messages[i].kind == res.transcript.messages[i].kind);
    CHECK(parsed.messages[i].site == res.transcript.messages[i].site);
    CHECK(parsed.messages[i].delta == res.transcript.messages[i].delta);
    CHECK(parsed.messages[i].bit == res.transcript.messages[i].bit);
  }

  // The wire format has no room for the secrets: qubit preparation frames
  // carry exactly a site (5-byte payload), instructions site+angle (13),
  // results site+bit (6), acks and done nothing (1). The delta angle is
  // the only real-valued field anywhere in the stream.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) {
      len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i]))
             << (8 * i);
    }
    const auto kind = static_cast<MessageKind>(
        static_cast<unsigned char>(bytes[pos + 4]));
    switch (kind) {
      case MessageKind::kQubitPrep: CHECK(len == 5); break;
      case MessageKind::kMeasureInstruction: CHECK(len == 13); break;
      case MessageKind::kMeasureResult: CHECK(len == 6); break;
      case MessageKind::kEntangleAck:
      case MessageKind::kDone: CHECK(len == 1); break;
    }
    pos += 4 + len + 1;
  }

  // Structure: prep messages first, one instruction/result pair per
  // measured site, Done last.
  CHECK(res.transcript.messages.front().kind == MessageKind::kQubitPrep);
  CHECK(res.transcript.messages.back().kind == MessageKind::kDone);
}

TEST_CASE("blindness audit passes honest runs and rejects the sabotage") {
  Circuit f(2);
  f.add(Gate::rz(0, 0.7)).add(Gate::rx(0, 2.1)).add(Gate::rx(1, 1.2));
  Circuit g(2);
  g.add(Gate::rz(0, 2.9)).add(Gate::rx(0, 0.4)).add(Gate::rz(1, 1.9));

  const int n = 1000;
  const auto group_f = run_audit_sessions(f, n, 101);
  const auto group_g = run_audit_sessions(g, n, 202);
  const auto honest = blindness_audit(group_f, group_g);
  CHECK(honest.pass);
  CHECK(honest.tests_run > 0);

  // Same computation in both groups: trivially indistinguishable.
  const auto group_f2 = run_audit_sessions(f, n, 303);
  CHECK(blindness_audit(group_f, group_f2).pass);

  ClientOptions sabotage;
  sabotage.theta_zero_sabotage = true;
  const auto leaky_f = run_audit_sessions(f, n, 404, sabotage);
  const auto leaky_g = run_audit_sessions(g, n, 505, sabotage);
  const auto caught = blindness_audit(leaky_f, leaky_g);
  CHECK_FALSE(caught.pass);
  CHECK(caught.rejections > 0);

  CHECK_THROWS_AS(blindness_audit({group_f.front()}, group_g), std::exception);
}

TEST_CASE("discrete-theta mode stays blind under the binned audit") {
  Circuit f(1);
  f.add(Gate::rz(0, kPi / 4)).add(Gate::rx(0, kPi / 2));
  Circuit g(1);
  g.add(Gate::rz(0, 3 * kPi / 4));

  ClientOptions discrete;
  discrete.discrete_theta = true;
  const auto group_f = run_audit_sessions(f, 1000, 11, discrete);
  const auto group_g = run_audit_sessions(g, 1000, 22, discrete);
  AuditOptions audit;
  audit.discrete_theta = true;
  CHECK(blindness_audit(group_f, group_g, audit).pass);

  // Correctness also holds under the discrete set.
  UbqcOptions opt;
  opt.mode = PatternEvalMode::kDeterministic;
  opt.client.discrete_theta = true;
  Rng rng(5);
  const auto got = run_delegated(f, opt, rng);
  CHECK(total_variation(got.distribution, direct_distribution(f)) < 1e-9);
}
