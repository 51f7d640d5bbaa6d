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
#include <string>
#include <vector>

#include "qfl/circuit.hpp"
#include "qfl/rng.hpp"

namespace qfl {

struct Site {
  int row = 0;
  int col = 0;
  auto operator<=>(const Site &) const = default;
};

/**
 * Brickwork resource-state geometry. Columns come in groups of four per
 * brick position plus one output column (n_cols = 4*n_bricks + 1). Every
 * site has a horizontal edge to its column neighbor; vertical edges (the
 * brick "rungs") sit at columns 4b+2 and 4b+4 and connect row pairs
 * starting at even rows for even b and odd rows for odd b, giving the
 * period-8 tiling with the pair offset alternating every four columns.
 */
struct BrickworkGraph {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<std::pair<Site, Site>> cz_edges;

  std::size_t site_count() const {
    return static_cast<std::size_t>(n_rows) * n_cols;
  }
  std::size_t site_index(Site s) const {
    return static_cast<std::size_t>(s.col) * n_rows + s.row;
  }
  /// Partner row of a vertical edge at (row, col), or -1 when none exists.
  int rung_partner(Site s) const;
};

BrickworkGraph build_brickwork(int n_rows, int n_bricks_per_row);

enum class BrickKind { kSingleQubitPair, kCnot };

struct Brick {
  int top_row = 0;
  int bottom_row = -1;  // -1 for an unpaired boundary wire
  int start_col = 0;
  BrickKind kind = BrickKind::kSingleQubitPair;
  // ZXZ Euler angles per wire for rotation bricks: U = Rz(g) Rx(b) Rz(a).
  double euler_top[3] = {0.0, 0.0, 0.0};
  double euler_bottom[3] = {0.0, 0.0, 0.0};
  bool control_on_top = true;  // CNOT bricks only
};

/**
 * Compiled measurement pattern: target angles phi per measured site plus
 * the outcome dependencies that adapt them, in column-major measurement
 * order. Rows may include one padded dummy wire when the source circuit
 * has an odd wire count; `logical_wires` is the original register and
 * evaluation marginalizes the dummy out.
 */
struct MeasurementPattern {
  BrickworkGraph graph;
  int logical_wires = 0;
  std::vector<double> phi;                  // site-indexed via graph.site_index
  std::vector<std::vector<Site>> x_deps;    // site-indexed
  std::vector<std::vector<Site>> z_deps;    // site-indexed
  std::vector<Site> measurement_order;      // column-major, all but last column
  std::vector<Site> output_sites;           // last column, row order
  std::vector<Brick> bricks;

  std::size_t measured_count() const { return measurement_order.size(); }
};

/**
 * Byproduct-corrected measurement angle: (-1)^{s_x} phi + s_z pi,
 * reduced mod 2pi into [0, 2pi).
 */
double adapt_angle(double phi, int s_x, int s_z);

/// Reduces any angle into [0, 2pi).
double wrap_angle(double angle);

/**
 * Compiles a circuit of single-qubit gates (RX/RZ/H on any wire) and
 * adjacent-wire CNOTs to a brickwork pattern. Consecutive single-qubit
 * gates on a wire merge into one Euler brick; each CNOT occupies one brick
 * column of the matching parity. Throws for non-adjacent CNOTs and for
 * CZ/SWAP kinds (route_to_adjacent rewrites those first).
 *
 * The pattern maps a logical input state injected on the first column to
 * the circuit's image of it; an empty circuit compiles to one all-zero
 * identity brick column.
 */
MeasurementPattern compile_circuit(const Circuit &c);

enum class PatternEvalMode {
  kExactBranchSum,  // weighted sum over all outcome branches (capped)
  kDeterministic,   // single greedy branch; exact for corrected patterns
  kSampled,         // empirical frequencies over outcome trajectories
};

/// Exact branch enumeration is limited to this many measured sites, which
/// covers two-wire patterns up to three brick columns (2 x 12 sites).
inline constexpr int kDefaultBranchSiteCap = 24;

struct PatternEvalOptions {
  PatternEvalMode mode = PatternEvalMode::kExactBranchSum;
  int shots = 0;          // sampled mode
  Rng *rng = nullptr;     // sampled mode
  bool apply_corrections = true;  // off only for the negative-control tests
  int branch_site_cap = kDefaultBranchSiteCap;
};

/**
 * Evaluates a pattern on the logical input prepared by `input_prep` from
 * |0...0> (empty circuit = |0...0> itself) and returns the distribution
 * over the logical output wires in row order.
 */
std::vector<double> evaluate_pattern(const MeasurementPattern &pattern,
                                     const Circuit &input_prep,
                                     const PatternEvalOptions &options);

/// Line-oriented debug dump of a pattern (sites, angles, dependencies).
std::string pattern_to_text(const MeasurementPattern &pattern);

}  // namespace qfl
