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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfl/brickwork.hpp"
#include "qfl/window_sim.hpp"

namespace qfl {

enum class MessageKind : std::uint8_t {
  kQubitPrep = 0,
  kEntangleAck = 1,
  kMeasureInstruction = 2,
  kMeasureResult = 3,
  kDone = 4,
};

/**
 * One protocol message as seen by the server. Qubit preparation messages
 * carry only the site: the prepared state travels out of band and its
 * angle theta never appears on the wire.
 */
struct Message {
  MessageKind kind;
  Site site{0, 0};
  double delta = 0.0;  // MeasureInstruction only, in [0, 2pi)
  int bit = 0;         // MeasureResult only
};

struct ProtocolTranscript {
  std::vector<Message> messages;
};

/// Length-prefixed binary frames; format documented in serialize.cpp and
/// the README (u32 length, kind u8, site as two u16, f64 angle, u8 bit,
/// all little-endian, one newline byte after each frame).
std::string serialize_transcript(const ProtocolTranscript &t);
ProtocolTranscript parse_transcript(const std::string &bytes);

struct ClientOptions {
  bool discrete_theta = false;      // draw theta from {k pi/4} instead of [0,2pi)
  bool theta_zero_sabotage = false; // leak phi' by skipping the encryption
  bool force_r_zero = false;        // plain-MBQC reduction mode
};

/**
 * Client half of the protocol: holds the secrets (theta, r), produces
 * encrypted instructions delta = phi' + theta + pi r and decrypts raw
 * outcomes with s = b xor r.
 */
class ClientSession {
 public:
  ClientSession(const MeasurementPattern &pattern, Rng &rng,
                const ClientOptions &options = {});

  /// Replay constructor with pinned secrets (site-indexed theta and r).
  ClientSession(const MeasurementPattern &pattern, std::vector<double> theta,
                std::vector<int> r);

  /// The prepared single-qubit states (|0> + e^{i theta}|1>)/sqrt(2),
  /// site-indexed; this is what gets sent to the server.
  const std::vector<double> &site_thetas() const { return theta_; }

  bool done() const { return cursor_ == pattern_->measurement_order.size(); }
  Site cursor_site() const;

  /// Encrypted instruction for the cursor site. Throws when done.
  Message next_instruction() const;

  /// Consumes the server's raw outcome for the cursor site and advances.
  void record_result(const Message &result);

  /// Decrypted outcome of a measured site (-1 while unknown).
  int decrypted_outcome(Site s) const;

  /// X/Z byproducts accumulated on an output site.
  std::pair<int, int> output_correction(Site s) const;

  const MeasurementPattern &pattern() const { return *pattern_; }

 private:
  double adapted_phi(Site s) const;

  const MeasurementPattern *pattern_;
  std::vector<double> theta_;  // site-indexed secret prep angles
  std::vector<int> r_;         // site-indexed secret outcome pads
  std::vector<int> s_;         // decrypted outcomes, -1 = unknown
  std::size_t cursor_ = 0;
};

/**
 * Honest server: entangles the received qubits on the brickwork graph and
 * measures the site named by each instruction. Backed by the streaming
 * window simulator, so the live register never exceeds 2 x n_rows qubits;
 * entangling lazily is equivalent to entangling everything upfront since
 * CZ commutes with measurements on other sites.
 */
class ServerSession {
 public:
  ServerSession(const BrickworkGraph &graph, const std::vector<double> &thetas);

  /// Measures the instruction's site; the outcome bit is chosen by `coin`.
  Message measure(const Message &instruction, double coin);

  /// Raw outcome probability for the next site at angle delta.
  double outcome0_probability(double delta) const {
    return sim_.outcome0_probability(delta);
  }

  bool all_measured() const { return sim_.done(); }

  /// Joint distribution of the output column in row order (uncorrected).
  std::vector<double> raw_output_distribution() const;

  const std::vector<int> &raw_outcomes() const { return raw_outcomes_; }
  const WindowSim &sim() const { return sim_; }

 private:
  const BrickworkGraph *graph_;
  WindowSim sim_;
  std::vector<int> raw_outcomes_;  // site-indexed, -1 = unmeasured
};

/**
 * Reference entangler for small graphs: the full register (one qubit per
 * site, site-index order) with CZ applied on every edge. Register size is
 * capped at kMaxQubits sites; the streaming server is the scalable path.
 */
Statevector server_entangle(const std::vector<double> &site_thetas,
                            const BrickworkGraph &graph);

struct UbqcOptions {
  PatternEvalMode mode = PatternEvalMode::kDeterministic;
  int shots = 1;  // sampled mode
  ClientOptions client;
  int branch_site_cap = kDefaultBranchSiteCap;
  // Secrets come from this seed when set; otherwise one draw of `rng`
  // seeds them. Pinning it keeps the measurement coin stream aligned with
  // a plain evaluate_pattern run of the same seed.
  std::optional<std::uint64_t> client_seed;
};

struct DelegatedResult {
  std::vector<double> distribution;  // over the logical wires, row order
  ProtocolTranscript transcript;
};

/**
 * Runs the full protocol for a circuit on |0...0>: compiles the circuit
 * behind a layer of Hadamards (the brickwork's natural input is |+>^n),
 * streams encrypted instructions and returns the corrected output
 * distribution. Exact mode sums over raw-outcome branches; sampled mode
 * runs one full session per shot (fresh secrets each time) and returns
 * the first session's transcript.
 */
DelegatedResult run_delegated(const Circuit &circuit, const UbqcOptions &options,
                              Rng &rng);

struct AuditOptions {
  double significance = 0.01;
  bool discrete_theta = false;  // chi-squared over the 8 angle bins instead of KS
};

struct AuditReport {
  bool pass = false;
  int tests_run = 0;
  int rejections = 0;
  double min_p_value = 1.0;
  double corrected_threshold = 0.0;
  std::vector<std::string> rejected_tests;
};

/**
 * Statistical blindness check over two groups of session transcripts from
 * two distinct computations: per-site uniformity of delta within each
 * group, per-site two-sample comparison across groups, and per-site plus
 * pooled uniformity of the raw outcome bits, Bonferroni-corrected. Both
 * groups need at least 1000 transcripts.
 */
AuditReport blindness_audit(const std::vector<ProtocolTranscript> &group_a,
                            const std::vector<ProtocolTranscript> &group_b,
                            const AuditOptions &options = {});

/// One sampled session per transcript, fresh secrets each time.
std::vector<ProtocolTranscript> run_audit_sessions(const Circuit &circuit,
                                                   int n_sessions,
                                                   std::uint64_t seed,
                                                   const ClientOptions &client = {});

}  // namespace qfl
