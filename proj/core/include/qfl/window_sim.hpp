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

#include <optional>
#include <vector>

#include "qfl/brickwork.hpp"
#include "qfl/statevector.hpp"

namespace qfl {

/**
 * Streaming simulator of single-site measurements on a brickwork state.
 *
 * Sites are measured in column-major order, so only two columns of qubits
 * are ever live: fresh qubits are created and entangled when the
 * measurement frontier reaches them, which is equivalent to entangling
 * everything upfront because CZ and qubit creation commute with
 * measurements of other sites. Peak register size is 2*n_rows qubits
 * regardless of pattern length.
 *
 * The value semantics are cheap enough to copy for branch enumeration.
 */
class WindowSim {
 public:
  /**
   * Per-site preparation: |+_theta> with the given angle per site
   * (site-indexed via graph.site_index); with `input` set, the first
   * column instead holds the injected logical state (row 0 = most
   * significant bit) and per-site angles apply from column 1 on.
   */
  WindowSim(const BrickworkGraph &graph, std::vector<double> site_thetas,
            std::optional<Statevector> input = std::nullopt);

  bool done() const { return cursor_ == total_measured_; }
  Site current_site() const;

  /// p(outcome 0) for measuring the current site at angle delta.
  double outcome0_probability(double delta) const;

  /**
   * Projects the current site onto the XY outcome, renormalizes, drops the
   * qubit and advances the frontier. Returns the branch probability of the
   * committed outcome.
   */
  double commit(double delta, int outcome);

  /// After all sites are measured: the last-column state in row order.
  Statevector output_state() const;

 private:
  void create_column(int col);
  int active_position(Site s) const;

  const BrickworkGraph *graph_;  // owned by the caller, outlives the sim
  std::vector<double> thetas_;
  std::vector<Site> active_;
  std::vector<cdouble> amp_;
  std::size_t cursor_ = 0;
  std::size_t total_measured_ = 0;
};

}  // namespace qfl
