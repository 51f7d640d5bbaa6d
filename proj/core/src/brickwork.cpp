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

#include "qfl/brickwork.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qfl/window_sim.hpp"

namespace qfl {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

int BrickworkGraph::rung_partner(Site s) const {
  if (s.col < 2 || s.col >= n_cols || s.col % 2 != 0) return -1;
  // Rung columns 4b+2 and 4b+4 belong to brick column b; the parity of b
  // fixes which row pairs they connect.
  const int b = (s.col % 4 == 2) ? (s.col - 2) / 4 : s.col / 4 - 1;
  const int start = (b % 2 == 0) ? 0 : 1;
  if (s.row < start) return -1;
  const int offset = s.row - start;
  const int partner = (offset % 2 == 0) ? s.row + 1 : s.row - 1;
  if (partner < start || partner >= n_rows) return -1;
  return partner;
}

BrickworkGraph build_brickwork(int n_rows, int n_bricks_per_row) {
  if (n_rows < 1 || n_bricks_per_row < 1) {
    throw std::invalid_argument("build_brickwork: nonpositive dimensions");
  }
  BrickworkGraph g;
  g.n_rows = n_rows;
  g.n_cols = 4 * n_bricks_per_row + 1;
  for (int r = 0; r < n_rows; ++r) {
    for (int c = 0; c + 1 < g.n_cols; ++c) {
      g.cz_edges.push_back({Site{r, c}, Site{r, c + 1}});
    }
  }
  for (int b = 0; b < n_bricks_per_row; ++b) {
    const int start = (b % 2 == 0) ? 0 : 1;
    for (int r = start; r + 1 < n_rows; r += 2) {
      for (int c : {4 * b + 2, 4 * b + 4}) {
        g.cz_edges.push_back({Site{r, c}, Site{r + 1, c}});
      }
    }
  }
  return g;
}

double wrap_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

double adapt_angle(double phi, int s_x, int s_z) {
  const double sign = (s_x & 1) ? -1.0 : 1.0;
  return wrap_angle(sign * phi + (s_z & 1) * std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Circuit -> pattern compilation
// ---------------------------------------------------------------------------

namespace {

struct Mat2 {
  cdouble m[2][2];

  static Mat2 identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

  Mat2 operator*(const Mat2 &o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
      }
    }
    return r;
  }

  bool is_identity_up_to_phase() const {
    // |tr U| = 2 iff a unitary U is a phase times the identity.
    return std::abs(std::abs(m[0][0] + m[1][1]) - 2.0) < 1e-12;
  }
};

Mat2 gate_matrix(const Gate &g) {
  const double h = g.angle / 2.0;
  switch (g.kind) {
    case GateKind::RX:
      return {{{std::cos(h), cdouble{0.0, -std::sin(h)}},
               {cdouble{0.0, -std::sin(h)}, std::cos(h)}}};
    case GateKind::RZ:
      return {{{std::polar(1.0, -h), 0.0}, {0.0, std::polar(1.0, h)}}};
    case GateKind::H: {
      const double s = 1.0 / std::sqrt(2.0);
      return {{{s, s}, {s, -s}}};
    }
    default:
      throw std::logic_error("gate_matrix: not a single-qubit kind");
  }
}

// ZXZ Euler angles of a 2x2 unitary: U = phase * Rz(gamma) Rx(beta) Rz(alpha).
std::array<double, 3> euler_zxz(const Mat2 &u) {
  const cdouble det = u.m[0][0] * u.m[1][1] - u.m[0][1] * u.m[1][0];
  const cdouble inv_phase = std::polar(1.0, -std::arg(det) / 2.0);
  const cdouble v00 = u.m[0][0] * inv_phase;
  const cdouble v10 = u.m[1][0] * inv_phase;
  const double c = std::abs(v00), s = std::abs(v10);
  const double beta = 2.0 * std::atan2(s, c);
  if (s < 1e-12) return {-2.0 * std::arg(v00), beta, 0.0};
  if (c < 1e-12) return {0.0, beta, 2.0 * (std::arg(v10) + std::numbers::pi / 2.0)};
  const double sum_half = -std::arg(v00);                          // (gamma+alpha)/2
  const double diff_half = std::arg(v10) + std::numbers::pi / 2.0;  // (gamma-alpha)/2
  return {sum_half - diff_half, beta, sum_half + diff_half};
}

struct SlabPlan {
  struct CnotSpec {
    int top = 0;
    bool control_on_top = true;
  };
  std::vector<std::array<double, 3>> euler;  // per row; {0,0,0} = idle wire
  std::vector<CnotSpec> cnots;
};

}  // namespace

MeasurementPattern compile_circuit(const Circuit &c) {
  c.validate();
  if (c.n_qubits < 1) throw std::invalid_argument("compile_circuit: empty register");
  const int wires = c.n_qubits;
  const int rows = (wires > 1 && wires % 2 == 1) ? wires + 1 : wires;

  std::vector<Mat2> pending(rows, Mat2::identity());
  std::vector<bool> dirty(rows, false);
  std::vector<SlabPlan> slabs;

  auto flush_all = [&]() {
    bool any = false;
    for (int r = 0; r < rows; ++r) {
      if (dirty[r] && !pending[r].is_identity_up_to_phase()) any = true;
    }
    if (!any) {
      for (int r = 0; r < rows; ++r) {
        pending[r] = Mat2::identity();
        dirty[r] = false;
      }
      return;
    }
    SlabPlan plan;
    plan.euler.assign(rows, {0.0, 0.0, 0.0});
    for (int r = 0; r < rows; ++r) {
      if (dirty[r]) plan.euler[r] = euler_zxz(pending[r]);
      pending[r] = Mat2::identity();
      dirty[r] = false;
    }
    slabs.push_back(std::move(plan));
  };

  for (const auto &g : c.gates) {
    switch (g.kind) {
      case GateKind::RX:
      case GateKind::RZ:
      case GateKind::H:
        pending[g.q0] = gate_matrix(g) * pending[g.q0];
        dirty[g.q0] = true;
        break;
      case GateKind::CNOT: {
        if (std::abs(g.q0 - g.q1) != 1) {
          throw std::invalid_argument(
              "compile_circuit: CNOT wires must be adjacent (route first)");
        }
        flush_all();
        const int top = std::min(g.q0, g.q1);
        // Pair (top, top+1) only exists in brick columns of matching parity.
        while (static_cast<int>(slabs.size()) % 2 != top % 2) {
          SlabPlan idle;
          idle.euler.assign(rows, {0.0, 0.0, 0.0});
          slabs.push_back(std::move(idle));
        }
        SlabPlan plan;
        plan.euler.assign(rows, {0.0, 0.0, 0.0});
        plan.cnots.push_back({top, g.q0 < g.q1});
        slabs.push_back(std::move(plan));
        break;
      }
      default:
        throw std::invalid_argument("compile_circuit: unsupported gate kind " +
                                    gate_kind_name(g.kind));
    }
  }
  flush_all();
  if (slabs.empty()) {
    SlabPlan idle;
    idle.euler.assign(rows, {0.0, 0.0, 0.0});
    slabs.push_back(std::move(idle));
  }

  MeasurementPattern p;
  p.graph = build_brickwork(rows, static_cast<int>(slabs.size()));
  p.logical_wires = wires;
  p.phi.assign(p.graph.site_count(), 0.0);

  const double half_pi = std::numbers::pi / 2.0;
  for (std::size_t b = 0; b < slabs.size(); ++b) {
    const auto &plan = slabs[b];
    const int col = static_cast<int>(4 * b);
    auto set_phi = [&](int row, std::array<double, 4> angles) {
      for (int k = 0; k < 4; ++k) {
        p.phi[p.graph.site_index(Site{row, col + k})] = wrap_angle(angles[k]);
      }
    };
    for (int r = 0; r < rows; ++r) {
      const auto &e = plan.euler[r];
      if (e[0] != 0.0 || e[1] != 0.0 || e[2] != 0.0) {
        set_phi(r, {-e[0], -e[1], -e[2], 0.0});
        Brick brick;
        brick.top_row = r;
        brick.start_col = col;
        brick.kind = BrickKind::kSingleQubitPair;
        brick.euler_top[0] = e[0];
        brick.euler_top[1] = e[1];
        brick.euler_top[2] = e[2];
        p.bricks.push_back(brick);
      }
    }
    for (const auto &cn : plan.cnots) {
      const int rc = cn.control_on_top ? cn.top : cn.top + 1;
      const int rt = cn.control_on_top ? cn.top + 1 : cn.top;
      set_phi(rc, {half_pi, 0.0, 0.0, 0.0});
      set_phi(rt, {0.0, half_pi, 0.0, -half_pi});
      Brick brick;
      brick.top_row = cn.top;
      brick.bottom_row = cn.top + 1;
      brick.start_col = col;
      brick.kind = BrickKind::kCnot;
      brick.control_on_top = cn.control_on_top;
      p.bricks.push_back(brick);
    }
  }

  // Flow dependencies: the X correction of a site comes from its row
  // predecessor, the Z correction from the predecessor's predecessor and
  // from the previous-column site of any rung partner at this column.
  p.x_deps.assign(p.graph.site_count(), {});
  p.z_deps.assign(p.graph.site_count(), {});
  for (int col = 1; col < p.graph.n_cols; ++col) {
    for (int r = 0; r < rows; ++r) {
      const Site s{r, col};
      const auto idx = p.graph.site_index(s);
      p.x_deps[idx].push_back(Site{r, col - 1});
      if (col >= 2) p.z_deps[idx].push_back(Site{r, col - 2});
      const int partner = p.graph.rung_partner(s);
      if (partner >= 0) p.z_deps[idx].push_back(Site{partner, col - 1});
    }
  }

  for (int col = 0; col + 1 < p.graph.n_cols; ++col) {
    for (int r = 0; r < rows; ++r) p.measurement_order.push_back(Site{r, col});
  }
  for (int r = 0; r < rows; ++r) {
    p.output_sites.push_back(Site{r, p.graph.n_cols - 1});
  }
  return p;
}

// ---------------------------------------------------------------------------
// Window simulator
// ---------------------------------------------------------------------------

WindowSim::WindowSim(const BrickworkGraph &graph,
                     std::vector<double> site_thetas,
                     std::optional<Statevector> input)
    : graph_(&graph), thetas_(std::move(site_thetas)) {
  if (thetas_.size() != graph.site_count()) {
    throw std::invalid_argument("WindowSim: theta table size mismatch");
  }
  if (graph.n_cols < 2) throw std::invalid_argument("WindowSim: degenerate graph");
  total_measured_ =
      static_cast<std::size_t>(graph.n_cols - 1) * graph.n_rows;
  if (input.has_value()) {
    if (input->n_qubits() != graph.n_rows) {
      throw std::invalid_argument("WindowSim: injected input register mismatch");
    }
    amp_ = input->amplitudes();
    for (int r = 0; r < graph.n_rows; ++r) active_.push_back(Site{r, 0});
  } else {
    amp_ = {cdouble{1.0, 0.0}};
    create_column(0);
  }
  create_column(1);
}

void WindowSim::create_column(int col) {
  const int n = graph_->n_rows;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int r = 0; r < n; ++r) {
    const double theta = thetas_[graph_->site_index(Site{r, col})];
    const cdouble c0{inv_sqrt2, 0.0};
    const cdouble c1 = std::polar(inv_sqrt2, theta);
    std::vector<cdouble> next(amp_.size() * 2);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      next[2 * i] = amp_[i] * c0;
      next[2 * i + 1] = amp_[i] * c1;
    }
    amp_ = std::move(next);
    active_.push_back(Site{r, col});
  }
  const int count = static_cast<int>(active_.size());
  auto cz = [&](int pos_a, int pos_b) {
    const std::uint64_t mask = (std::uint64_t{1} << (count - 1 - pos_a)) |
                               (std::uint64_t{1} << (count - 1 - pos_b));
    for (std::uint64_t i = 0; i < amp_.size(); ++i) {
      if ((i & mask) == mask) amp_[i] = -amp_[i];
    }
  };
  // Apply every graph edge whose later endpoint sits in this column; the
  // partner is either in the same column (rung) or the previous one.
  for (const auto &[a, b] : graph_->cz_edges) {
    const Site hi = (a.col > b.col || (a.col == b.col && a.row > b.row)) ? a : b;
    const Site lo = (hi == a) ? b : a;
    if (hi.col != col) continue;
    const int pos_hi = active_position(hi);
    const int pos_lo = active_position(lo);
    if (pos_hi >= 0 && pos_lo >= 0) cz(pos_lo, pos_hi);
  }
}

int WindowSim::active_position(Site s) const {
  for (std::size_t k = 0; k < active_.size(); ++k) {
    if (active_[k] == s) return static_cast<int>(k);
  }
  return -1;
}

Site WindowSim::current_site() const {
  const int n = graph_->n_rows;
  return Site{static_cast<int>(cursor_) % n, static_cast<int>(cursor_) / n};
}

double WindowSim::outcome0_probability(double delta) const {
  const Site s = current_site();
  const int pos = active_position(s);
  const int count = static_cast<int>(active_.size());
  const std::uint64_t st = std::uint64_t{1} << (count - 1 - pos);
  const cdouble phase = std::polar(1.0, -delta);
  double p0 = 0.0;
  for (std::uint64_t i = 0; i < amp_.size(); ++i) {
    if (i & st) continue;
    p0 += 0.5 * std::norm(amp_[i] + phase * amp_[i | st]);
  }
  return p0;
}

double WindowSim::commit(double delta, int outcome) {
  const Site s = current_site();
  const int pos = active_position(s);
  const int count = static_cast<int>(active_.size());
  const int bitpos = count - 1 - pos;
  const std::uint64_t st = std::uint64_t{1} << bitpos;
  const double sign = (outcome == 0) ? 1.0 : -1.0;
  const cdouble phase = std::polar(1.0, -delta);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::vector<cdouble> next(amp_.size() / 2);
  double prob = 0.0;
  std::size_t j = 0;
  for (std::uint64_t i = 0; i < amp_.size(); ++i) {
    if (i & st) continue;
    const cdouble v = (amp_[i] + sign * phase * amp_[i | st]) * inv_sqrt2;
    prob += std::norm(v);
    next[j++] = v;
  }
  if (prob > 0.0) {
    const double inv = 1.0 / std::sqrt(prob);
    for (auto &v : next) v *= inv;
  }
  amp_ = std::move(next);
  active_.erase(active_.begin() + pos);
  ++cursor_;
  if (!done() && cursor_ % graph_->n_rows == 0) {
    const int next_col = static_cast<int>(cursor_) / graph_->n_rows + 1;
    if (next_col <= graph_->n_cols - 1) create_column(next_col);
  }
  return prob;
}

Statevector WindowSim::output_state() const {
  if (!done()) throw std::logic_error("WindowSim: pattern not fully measured");
  // Remaining actives are the last column in row order already.
  return Statevector(graph_->n_rows, amp_);
}

// ---------------------------------------------------------------------------
// Pattern evaluation
// ---------------------------------------------------------------------------

namespace {

struct EvalContext {
  const MeasurementPattern *pattern;
  bool apply_corrections;
  std::vector<int> outcomes;  // site-indexed, -1 = unmeasured

  double adapted_angle(Site s) const {
    const auto idx = pattern->graph.site_index(s);
    const double phi = pattern->phi[idx];
    if (!apply_corrections) return phi;
    int sx = 0, sz = 0;
    for (const auto &d : pattern->x_deps[idx]) {
      sx ^= outcomes[pattern->graph.site_index(d)];
    }
    for (const auto &d : pattern->z_deps[idx]) {
      sz ^= outcomes[pattern->graph.site_index(d)];
    }
    return adapt_angle(phi, sx, sz);
  }

  Statevector corrected_output(const WindowSim &sim) const {
    Statevector out = sim.output_state();
    if (!apply_corrections) return out;
    for (const auto &o : pattern->output_sites) {
      const auto idx = pattern->graph.site_index(o);
      int a = 0, b = 0;
      for (const auto &d : pattern->x_deps[idx]) {
        a ^= outcomes[pattern->graph.site_index(d)];
      }
      for (const auto &d : pattern->z_deps[idx]) {
        b ^= outcomes[pattern->graph.site_index(d)];
      }
      if (a) out.apply_x_in_place(o.row);
      if (b) out.apply_z_in_place(o.row);
    }
    return out;
  }
};

std::vector<double> marginalize_rows(const Statevector &state, int logical) {
  const int rows = state.n_qubits();
  std::vector<int> qubits(logical);
  for (int i = 0; i < logical; ++i) qubits[i] = i;
  (void)rows;
  return state.marginal_distribution(qubits);
}

void branch_dfs(EvalContext &ctx, const WindowSim &sim, double weight,
                std::vector<double> &acc) {
  if (sim.done()) {
    const auto dist =
        marginalize_rows(ctx.corrected_output(sim), ctx.pattern->logical_wires);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * dist[i];
    return;
  }
  const Site s = sim.current_site();
  const auto idx = ctx.pattern->graph.site_index(s);
  const double delta = ctx.adapted_angle(s);
  const double p0 = sim.outcome0_probability(delta);
  const double probs[2] = {p0, 1.0 - p0};
  for (int outcome = 0; outcome < 2; ++outcome) {
    if (probs[outcome] < 1e-12) continue;
    WindowSim child = sim;
    child.commit(delta, outcome);
    ctx.outcomes[idx] = outcome;
    branch_dfs(ctx, child, weight * probs[outcome], acc);
  }
  ctx.outcomes[idx] = -1;
}

}  // namespace

std::vector<double> evaluate_pattern(const MeasurementPattern &pattern,
                                     const Circuit &input_prep,
                                     const PatternEvalOptions &options) {
  if (input_prep.n_qubits != 0 &&
      input_prep.n_qubits != pattern.logical_wires) {
    throw std::invalid_argument("evaluate_pattern: input prep register mismatch");
  }
  const int rows = pattern.graph.n_rows;
  Statevector logical(pattern.logical_wires);
  if (input_prep.n_qubits != 0) {
    run_circuit_in_place(logical, input_prep);
  }
  Statevector injected = [&] {
    if (rows == pattern.logical_wires) return logical;
    // Dummy padded row rides along in |+>.
    std::vector<cdouble> amp(std::uint64_t{1} << rows);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const auto &src = logical.amplitudes();
    for (std::size_t i = 0; i < src.size(); ++i) {
      amp[2 * i] = src[i] * inv_sqrt2;
      amp[2 * i + 1] = src[i] * inv_sqrt2;
    }
    return Statevector(rows, std::move(amp));
  }();

  const std::vector<double> thetas(pattern.graph.site_count(), 0.0);
  EvalContext ctx{&pattern, options.apply_corrections,
                  std::vector<int>(pattern.graph.site_count(), -1)};

  const std::size_t out_dim = std::size_t{1} << pattern.logical_wires;
  std::vector<double> result(out_dim, 0.0);

  switch (options.mode) {
    case PatternEvalMode::kExactBranchSum: {
      if (pattern.measured_count() >
          static_cast<std::size_t>(options.branch_site_cap)) {
        throw std::invalid_argument(
            "evaluate_pattern: measured site count exceeds the exact-mode "
            "branch cap");
      }
      WindowSim sim(pattern.graph, thetas, injected);
      branch_dfs(ctx, sim, 1.0, result);
      break;
    }
    case PatternEvalMode::kDeterministic: {
      WindowSim sim(pattern.graph, thetas, injected);
      while (!sim.done()) {
        const Site s = sim.current_site();
        const double delta = ctx.adapted_angle(s);
        const double p0 = sim.outcome0_probability(delta);
        const int outcome = (p0 >= 0.5) ? 0 : 1;
        sim.commit(delta, outcome);
        ctx.outcomes[pattern.graph.site_index(s)] = outcome;
      }
      result = marginalize_rows(ctx.corrected_output(sim), pattern.logical_wires);
      break;
    }
    case PatternEvalMode::kSampled: {
      if (options.shots < 1 || options.rng == nullptr) {
        throw std::invalid_argument("evaluate_pattern: sampled mode needs shots and rng");
      }
      for (int shot = 0; shot < options.shots; ++shot) {
        std::fill(ctx.outcomes.begin(), ctx.outcomes.end(), -1);
        WindowSim sim(pattern.graph, thetas, injected);
        while (!sim.done()) {
          const Site s = sim.current_site();
          const double delta = ctx.adapted_angle(s);
          const double p0 = sim.outcome0_probability(delta);
          const int outcome = (options.rng->uniform() < p0) ? 0 : 1;
          sim.commit(delta, outcome);
          ctx.outcomes[pattern.graph.site_index(s)] = outcome;
        }
        const auto dist = marginalize_rows(ctx.corrected_output(sim),
                                           pattern.logical_wires);
        double u = options.rng->uniform();
        std::size_t drawn = dist.size() - 1;
        for (std::size_t i = 0; i < dist.size(); ++i) {
          if (u < dist[i]) {
            drawn = i;
            break;
          }
          u -= dist[i];
        }
        result[drawn] += 1.0;
      }
      for (auto &v : result) v /= options.shots;
      break;
    }
  }
  return result;
}

std::string pattern_to_text(const MeasurementPattern &pattern) {
  std::ostringstream os;
  os << "brickwork-pattern v1 rows=" << pattern.graph.n_rows
     << " cols=" << pattern.graph.n_cols
     << " logical=" << pattern.logical_wires << "\n";
  auto put_site_list = [&os](const std::vector<Site> &sites) {
    os << "[";
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (i) os << ";";
      os << sites[i].row << ":" << sites[i].col;
    }
    os << "]";
  };
  for (const auto &s : pattern.measurement_order) {
    const auto idx = pattern.graph.site_index(s);
    os << "site " << s.row << " " << s.col << " phi=" << pattern.phi[idx]
       << " xdep=";
    put_site_list(pattern.x_deps[idx]);
    os << " zdep=";
    put_site_list(pattern.z_deps[idx]);
    os << "\n";
  }
  for (const auto &o : pattern.output_sites) {
    os << "output " << o.row << " " << o.col << "\n";
  }
  return os.str();
}

}  // namespace qfl
