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

#include "qfl/ubqc.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <stdexcept>

#include "qfl/stats.hpp"

namespace qfl {

namespace {
constexpr double kPi = std::numbers::pi;

void put_u16(std::string &out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string &out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

}  // namespace

std::string serialize_transcript(const ProtocolTranscript &t) {
  std::string out;
  for (const auto &m : t.messages) {
    std::string payload;
    payload.push_back(static_cast<char>(m.kind));
    switch (m.kind) {
      case MessageKind::kQubitPrep:
        put_u16(payload, static_cast<std::uint16_t>(m.site.row));
        put_u16(payload, static_cast<std::uint16_t>(m.site.col));
        break;
      case MessageKind::kMeasureInstruction:
        put_u16(payload, static_cast<std::uint16_t>(m.site.row));
        put_u16(payload, static_cast<std::uint16_t>(m.site.col));
        put_f64(payload, m.delta);
        break;
      case MessageKind::kMeasureResult:
        put_u16(payload, static_cast<std::uint16_t>(m.site.row));
        put_u16(payload, static_cast<std::uint16_t>(m.site.col));
        payload.push_back(static_cast<char>(m.bit));
        break;
      case MessageKind::kEntangleAck:
      case MessageKind::kDone:
        break;
    }
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    out += payload;
    out.push_back('\n');
  }
  return out;
}

ProtocolTranscript parse_transcript(const std::string &bytes) {
  ProtocolTranscript t;
  std::size_t pos = 0;
  auto get_u16 = [&](std::size_t at) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[at]) |
                                      (static_cast<unsigned char>(bytes[at + 1]) << 8));
  };
  while (pos < bytes.size()) {
    if (pos + 4 > bytes.size()) throw std::invalid_argument("truncated frame header");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) {
      len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i]))
             << (8 * i);
    }
    pos += 4;
    if (pos + len + 1 > bytes.size()) throw std::invalid_argument("truncated frame");
    Message m;
    m.kind = static_cast<MessageKind>(static_cast<unsigned char>(bytes[pos]));
    switch (m.kind) {
      case MessageKind::kQubitPrep:
        m.site = {get_u16(pos + 1), get_u16(pos + 3)};
        break;
      case MessageKind::kMeasureInstruction: {
        m.site = {get_u16(pos + 1), get_u16(pos + 3)};
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) {
          bits |= static_cast<std::uint64_t>(
                      static_cast<unsigned char>(bytes[pos + 5 + i]))
                  << (8 * i);
        }
        std::memcpy(&m.delta, &bits, sizeof(m.delta));
        break;
      }
      case MessageKind::kMeasureResult:
        m.site = {get_u16(pos + 1), get_u16(pos + 3)};
        m.bit = static_cast<unsigned char>(bytes[pos + 5]);
        break;
      case MessageKind::kEntangleAck:
      case MessageKind::kDone:
        break;
      default:
        throw std::invalid_argument("unknown message kind");
    }
    pos += len;
    if (bytes[pos] != '\n') throw std::invalid_argument("missing frame terminator");
    ++pos;
    t.messages.push_back(m);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

ClientSession::ClientSession(const MeasurementPattern &pattern, Rng &rng,
                             const ClientOptions &options)
    : pattern_(&pattern) {
  const auto n = pattern.graph.site_count();
  theta_.assign(n, 0.0);
  r_.assign(n, 0);
  s_.assign(n, -1);
  for (auto &t : theta_) {
    if (options.theta_zero_sabotage) {
      t = 0.0;
    } else if (options.discrete_theta) {
      t = static_cast<double>(rng.uniform_int(8)) * kPi / 4.0;
    } else {
      t = rng.uniform_angle();
    }
  }
  for (const auto &site : pattern.measurement_order) {
    r_[pattern.graph.site_index(site)] = options.force_r_zero ? 0 : (rng.bit() ? 1 : 0);
  }
}

ClientSession::ClientSession(const MeasurementPattern &pattern,
                             std::vector<double> theta, std::vector<int> r)
    : pattern_(&pattern), theta_(std::move(theta)), r_(std::move(r)) {
  if (theta_.size() != pattern.graph.site_count() ||
      r_.size() != pattern.graph.site_count()) {
    throw std::invalid_argument("ClientSession: secrets must cover every site");
  }
  s_.assign(pattern.graph.site_count(), -1);
}

Site ClientSession::cursor_site() const {
  if (done()) throw std::logic_error("protocol already finished");
  return pattern_->measurement_order[cursor_];
}

double ClientSession::adapted_phi(Site s) const {
  const auto idx = pattern_->graph.site_index(s);
  int sx = 0, sz = 0;
  for (const auto &d : pattern_->x_deps[idx]) {
    const int v = s_[pattern_->graph.site_index(d)];
    if (v < 0) throw std::logic_error("dependency measured out of order");
    sx ^= v;
  }
  for (const auto &d : pattern_->z_deps[idx]) {
    const int v = s_[pattern_->graph.site_index(d)];
    if (v < 0) throw std::logic_error("dependency measured out of order");
    sz ^= v;
  }
  return adapt_angle(pattern_->phi[idx], sx, sz);
}

Message ClientSession::next_instruction() const {
  const Site site = cursor_site();
  const auto idx = pattern_->graph.site_index(site);
  const double delta =
      wrap_angle(adapted_phi(site) + theta_[idx] + kPi * r_[idx]);
  return Message{MessageKind::kMeasureInstruction, site, delta, 0};
}

void ClientSession::record_result(const Message &result) {
  if (result.kind != MessageKind::kMeasureResult) {
    throw std::invalid_argument("expected a measurement result");
  }
  const Site site = cursor_site();
  if (result.site != site) {
    throw std::invalid_argument("out-of-order measurement result");
  }
  const auto idx = pattern_->graph.site_index(site);
  s_[idx] = result.bit ^ r_[idx];
  ++cursor_;
}

int ClientSession::decrypted_outcome(Site s) const {
  return s_[pattern_->graph.site_index(s)];
}

std::pair<int, int> ClientSession::output_correction(Site s) const {
  const auto idx = pattern_->graph.site_index(s);
  int a = 0, b = 0;
  for (const auto &d : pattern_->x_deps[idx]) {
    a ^= s_[pattern_->graph.site_index(d)];
  }
  for (const auto &d : pattern_->z_deps[idx]) {
    b ^= s_[pattern_->graph.site_index(d)];
  }
  return {a, b};
}

// ---------------------------------------------------------------------------
// Server
// ---------------------------------------------------------------------------

ServerSession::ServerSession(const BrickworkGraph &graph,
                             const std::vector<double> &thetas)
    : graph_(&graph),
      sim_(graph, thetas),
      raw_outcomes_(graph.site_count(), -1) {}

Message ServerSession::measure(const Message &instruction, double coin) {
  if (instruction.kind != MessageKind::kMeasureInstruction) {
    throw std::invalid_argument("expected a measurement instruction");
  }
  if (sim_.done()) throw std::logic_error("all sites already measured");
  const Site expected = sim_.current_site();
  if (instruction.site != expected) {
    const auto idx = graph_->site_index(instruction.site);
    if (idx < raw_outcomes_.size() && raw_outcomes_[idx] >= 0) {
      throw std::invalid_argument("site measured twice");
    }
    throw std::invalid_argument("instruction out of measurement order");
  }
  const double p0 = sim_.outcome0_probability(instruction.delta);
  const int outcome = (coin < p0) ? 0 : 1;
  sim_.commit(instruction.delta, outcome);
  raw_outcomes_[graph_->site_index(expected)] = outcome;
  return Message{MessageKind::kMeasureResult, expected, 0.0, outcome};
}

std::vector<double> ServerSession::raw_output_distribution() const {
  const Statevector out = sim_.output_state();
  std::vector<int> rows(graph_->n_rows);
  for (int r = 0; r < graph_->n_rows; ++r) rows[r] = r;
  return out.marginal_distribution(rows);
}

Statevector server_entangle(const std::vector<double> &site_thetas,
                            const BrickworkGraph &graph) {
  if (site_thetas.size() != graph.site_count()) {
    throw std::invalid_argument("server_entangle: one state per site required");
  }
  const int n = static_cast<int>(graph.site_count());
  if (n > kMaxQubits) {
    throw std::invalid_argument("server_entangle: register exceeds dense cap");
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<cdouble> amp{cdouble{1.0, 0.0}};
  for (int s = 0; s < n; ++s) {
    std::vector<cdouble> next(amp.size() * 2);
    const cdouble c1 = std::polar(inv_sqrt2, site_thetas[s]);
    for (std::size_t i = 0; i < amp.size(); ++i) {
      next[2 * i] = amp[i] * inv_sqrt2;
      next[2 * i + 1] = amp[i] * c1;
    }
    amp = std::move(next);
  }
  Statevector state(n, std::move(amp));
  for (const auto &[a, b] : graph.cz_edges) {
    state.apply_cz_in_place(static_cast<int>(graph.site_index(a)),
                            static_cast<int>(graph.site_index(b)));
  }
  return state;
}

// ---------------------------------------------------------------------------
// Full protocol
// ---------------------------------------------------------------------------

namespace {

Circuit with_h_prefix(const Circuit &c) {
  Circuit out(c.n_qubits);
  for (int q = 0; q < c.n_qubits; ++q) out.add(Gate::h(q));
  out.gates.insert(out.gates.end(), c.gates.begin(), c.gates.end());
  return out;
}

void append_prep_messages(ProtocolTranscript &t, const MeasurementPattern &p) {
  for (int col = 0; col < p.graph.n_cols; ++col) {
    for (int row = 0; row < p.graph.n_rows; ++row) {
      t.messages.push_back({MessageKind::kQubitPrep, Site{row, col}, 0.0, 0});
    }
  }
  t.messages.push_back({MessageKind::kEntangleAck, Site{0, 0}, 0.0, 0});
}

// Client-corrected distribution over the logical wires: XOR the X
// byproducts into the raw joint distribution, then drop padded rows.
std::vector<double> corrected_logical_distribution(
    const MeasurementPattern &pattern, const ClientSession &client,
    const std::vector<double> &raw_joint) {
  const int rows = pattern.graph.n_rows;
  std::uint64_t flip_mask = 0;
  for (const auto &o : pattern.output_sites) {
    const auto [a, b] = client.output_correction(o);
    (void)b;  // Z byproducts do not move computational-basis weight
    if (a) flip_mask |= std::uint64_t{1} << (rows - 1 - o.row);
  }
  const int logical = pattern.logical_wires;
  std::vector<double> out(std::size_t{1} << logical, 0.0);
  const int drop = rows - logical;
  for (std::uint64_t i = 0; i < raw_joint.size(); ++i) {
    const std::uint64_t corrected = i ^ flip_mask;
    out[corrected >> drop] += raw_joint[i];
  }
  return out;
}

struct BranchRunner {
  const MeasurementPattern &pattern;
  std::vector<double> acc;

  void run(ClientSession client, ServerSession server, double weight) {
    while (!client.done()) {
      const Message instr = client.next_instruction();
      const double p0 = server.outcome0_probability(instr.delta);
      const double probs[2] = {p0, 1.0 - p0};
      // Fork on the raw outcome; follow branch 0 iteratively and recurse
      // on branch 1 to keep stack depth at the measured-site count.
      if (probs[1] >= 1e-12) {
        ClientSession c1 = client;
        ServerSession s1 = server;
        Message forced{MessageKind::kMeasureInstruction, instr.site, instr.delta, 0};
        Message res = s1.measure(forced, 1.0);  // coin 1.0 forces outcome 1
        c1.record_result(res);
        run(std::move(c1), std::move(s1), weight * probs[1]);
      }
      if (probs[0] < 1e-12) return;
      Message res = server.measure(instr, 0.0);  // coin 0.0 forces outcome 0
      client.record_result(res);
      weight *= probs[0];
    }
    const auto dist =
        corrected_logical_distribution(pattern, client, server.raw_output_distribution());
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * dist[i];
  }
};

}  // namespace

DelegatedResult run_delegated(const Circuit &circuit, const UbqcOptions &options,
                              Rng &rng) {
  const auto pattern = compile_circuit(with_h_prefix(circuit));
  // value_or would consume a draw even when the seed is pinned, shifting
  // the coin stream; branch explicitly instead.
  const std::uint64_t client_seed =
      options.client_seed.has_value() ? *options.client_seed : rng.next_u64();

  DelegatedResult result;
  result.distribution.assign(std::size_t{1} << pattern.logical_wires, 0.0);

  switch (options.mode) {
    case PatternEvalMode::kExactBranchSum: {
      if (pattern.measured_count() >
          static_cast<std::size_t>(options.branch_site_cap)) {
        throw std::invalid_argument(
            "run_delegated: pattern exceeds the exact-mode branch cap");
      }
      Rng client_rng(client_seed, rng_tag::kProtocol);
      ClientSession client(pattern, client_rng, options.client);
      ServerSession server(pattern.graph, client.site_thetas());
      append_prep_messages(result.transcript, pattern);
      result.transcript.messages.push_back(
          {MessageKind::kDone, Site{0, 0}, 0.0, 0});
      BranchRunner runner{pattern, result.distribution};
      runner.run(std::move(client), std::move(server), 1.0);
      result.distribution = std::move(runner.acc);
      break;
    }
    case PatternEvalMode::kDeterministic:
    case PatternEvalMode::kSampled: {
      const bool sampled = options.mode == PatternEvalMode::kSampled;
      const int shots = sampled ? options.shots : 1;
      if (shots < 1) throw std::invalid_argument("run_delegated: shots < 1");
      for (int shot = 0; shot < shots; ++shot) {
        Rng client_rng(client_seed + shot, rng_tag::kProtocol);
        ClientSession client(pattern, client_rng, options.client);
        ServerSession server(pattern.graph, client.site_thetas());
        ProtocolTranscript transcript;
        append_prep_messages(transcript, pattern);
        while (!client.done()) {
          const Message instr = client.next_instruction();
          double coin;
          if (sampled) {
            coin = rng.uniform();
          } else {
            coin = server.outcome0_probability(instr.delta) >= 0.5 ? 0.0 : 1.0;
          }
          const Message res = server.measure(instr, coin);
          transcript.messages.push_back(instr);
          transcript.messages.push_back(res);
          client.record_result(res);
        }
        const auto raw_joint = server.raw_output_distribution();
        if (sampled) {
          // Bob measures the last column in the computational basis and
          // reports raw bits; Alice flips the X byproducts out.
          double u = rng.uniform();
          std::uint64_t raw = raw_joint.size() - 1;
          for (std::size_t i = 0; i < raw_joint.size(); ++i) {
            if (u < raw_joint[i]) {
              raw = i;
              break;
            }
            u -= raw_joint[i];
          }
          const int rows = pattern.graph.n_rows;
          std::uint64_t flip = 0;
          for (const auto &o : pattern.output_sites) {
            const int bit = static_cast<int>((raw >> (rows - 1 - o.row)) & 1ULL);
            transcript.messages.push_back(
                {MessageKind::kMeasureResult, o, 0.0, bit});
            const auto [a, z] = client.output_correction(o);
            (void)z;
            if (a) flip |= std::uint64_t{1} << (rows - 1 - o.row);
          }
          const std::uint64_t corrected = raw ^ flip;
          result.distribution[corrected >> (rows - pattern.logical_wires)] += 1.0;
        } else {
          result.distribution =
              corrected_logical_distribution(pattern, client, raw_joint);
        }
        transcript.messages.push_back({MessageKind::kDone, Site{0, 0}, 0.0, 0});
        if (shot == 0) result.transcript = std::move(transcript);
      }
      if (sampled) {
        for (auto &v : result.distribution) v /= shots;
      }
      break;
    }
  }
  return result;
}

std::vector<ProtocolTranscript> run_audit_sessions(const Circuit &circuit,
                                                   int n_sessions,
                                                   std::uint64_t seed,
                                                   const ClientOptions &client) {
  std::vector<ProtocolTranscript> transcripts;
  transcripts.reserve(n_sessions);
  for (int i = 0; i < n_sessions; ++i) {
    Rng rng(seed, 1000 + static_cast<std::uint64_t>(i));
    UbqcOptions opt;
    opt.mode = PatternEvalMode::kSampled;
    opt.shots = 1;
    opt.client = client;
    opt.client_seed = seed ^ (0xABCD0000ULL + i);
    transcripts.push_back(run_delegated(circuit, opt, rng).transcript);
  }
  return transcripts;
}

// ---------------------------------------------------------------------------
// Blindness audit
// ---------------------------------------------------------------------------

namespace {

struct SiteSamples {
  std::vector<double> deltas_a, deltas_b;
  std::uint64_t bits0 = 0, bits1 = 0;
};

void collect(const std::vector<ProtocolTranscript> &group, bool is_a,
             std::map<std::pair<int, int>, SiteSamples> &sites) {
  for (const auto &t : group) {
    for (const auto &m : t.messages) {
      if (m.kind == MessageKind::kMeasureInstruction) {
        auto &s = sites[{m.site.row, m.site.col}];
        (is_a ? s.deltas_a : s.deltas_b).push_back(m.delta);
      } else if (m.kind == MessageKind::kMeasureResult) {
        auto &s = sites[{m.site.row, m.site.col}];
        if (m.bit) {
          ++s.bits1;
        } else {
          ++s.bits0;
        }
      }
    }
  }
}

double discrete_uniformity_p(const std::vector<double> &deltas) {
  // theta from {k pi/4} makes delta live on the same 8-point grid.
  std::vector<std::uint64_t> counts(8, 0);
  for (double d : deltas) {
    const int bin =
        static_cast<int>(std::llround(d / (kPi / 4.0))) & 7;
    ++counts[bin];
  }
  return chi2_uniform_bins_p_value(counts);
}

}  // namespace

AuditReport blindness_audit(const std::vector<ProtocolTranscript> &group_a,
                            const std::vector<ProtocolTranscript> &group_b,
                            const AuditOptions &options) {
  if (group_a.size() < 1000 || group_b.size() < 1000) {
    throw std::invalid_argument("blindness_audit: >=1000 transcripts per group");
  }
  std::map<std::pair<int, int>, SiteSamples> sites;
  collect(group_a, true, sites);
  collect(group_b, false, sites);

  struct Test {
    std::string name;
    double p;
  };
  std::vector<Test> tests;
  std::uint64_t pooled0 = 0, pooled1 = 0;
  for (const auto &[key, s] : sites) {
    const std::string tag =
        "site(" + std::to_string(key.first) + "," + std::to_string(key.second) + ")";
    if (!s.deltas_a.empty() && !s.deltas_b.empty()) {
      if (options.discrete_theta) {
        tests.push_back({tag + " delta-uniform-A", discrete_uniformity_p(s.deltas_a)});
        tests.push_back({tag + " delta-uniform-B", discrete_uniformity_p(s.deltas_b)});
      } else {
        tests.push_back(
            {tag + " delta-uniform-A",
             ks_p_value(ks_statistic_uniform(s.deltas_a, 2.0 * kPi),
                        static_cast<double>(s.deltas_a.size()))});
        tests.push_back(
            {tag + " delta-uniform-B",
             ks_p_value(ks_statistic_uniform(s.deltas_b, 2.0 * kPi),
                        static_cast<double>(s.deltas_b.size()))});
      }
      const double n_eff =
          static_cast<double>(s.deltas_a.size()) * s.deltas_b.size() /
          static_cast<double>(s.deltas_a.size() + s.deltas_b.size());
      tests.push_back({tag + " delta-two-sample",
                       ks_p_value(ks_statistic_two_sample(s.deltas_a, s.deltas_b),
                                  n_eff)});
    }
    if (s.bits0 + s.bits1 > 0) {
      tests.push_back({tag + " bit-uniform", chi2_bit_p_value(s.bits0, s.bits1)});
      pooled0 += s.bits0;
      pooled1 += s.bits1;
    }
  }
  tests.push_back({"pooled bit-uniform", chi2_bit_p_value(pooled0, pooled1)});

  AuditReport report;
  report.tests_run = static_cast<int>(tests.size());
  report.corrected_threshold = options.significance / tests.size();
  for (const auto &t : tests) {
    report.min_p_value = std::min(report.min_p_value, t.p);
    if (t.p < report.corrected_threshold) {
      ++report.rejections;
      if (report.rejected_tests.size() < 16) report.rejected_tests.push_back(t.name);
    }
  }
  report.pass = report.rejections == 0;
  return report;
}

}  // namespace qfl
