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

#include "qfl/circuit.hpp"
#include "qfl/rng.hpp"

namespace qfl {

/// Probabilities below this are clamped before taking logs.
inline constexpr double kLogClamp = 1e-12;

/**
 * Layered rotation/entangler ansatz. Each layer applies the configured
 * rotation kinds to every qubit (one fresh parameter per rotation) and
 * then a CNOT chain on adjacent pairs (0,1), (1,2), ..., (n-2,n-1).
 * Parameter layout: theta[(layer * n_qubits + qubit) * r + k] for the
 * k-th rotation kind, so parameter count = n_qubits * r * depth.
 */
struct ClassifierTemplate {
  int n_qubits = 0;
  int depth = 0;
  std::vector<GateKind> rotation_layout;  // e.g. {RZ, RX}
  std::vector<int> readout_qubits;

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(n_qubits) * depth * rotation_layout.size();
  }
  std::size_t n_classes() const {
    return std::size_t{1} << readout_qubits.size();
  }
};

struct ModelParams {
  std::vector<double> theta;
  int step_count = 0;
};

struct GradientVector {
  std::vector<double> values;
};

/// Encoded input state plus its one-hot label.
struct LabeledSample {
  Statevector input;
  std::vector<double> label;
};

/// Default layout: RZ then RX per qubit per layer, readout on the given
/// qubits. Throws for depth < 1 or invalid readout indices.
ClassifierTemplate build_classifier(int n_qubits, int depth,
                                    std::vector<int> readout_qubits,
                                    std::vector<GateKind> rotation_layout = {
                                        GateKind::RZ, GateKind::RX});

/// Realizes the ansatz at concrete angles. theta length must match.
Circuit realize_classifier(const ClassifierTemplate &tpl,
                           const std::vector<double> &theta);

/// Class probabilities g = readout marginal of the circuit output.
std::vector<double> forward(const ClassifierTemplate &tpl,
                            const ModelParams &params,
                            const Statevector &input);

/// -sum_k a_k log g_k with g clamped at kLogClamp.
double cross_entropy(const std::vector<double> &g, const std::vector<double> &a);

enum class GradientMethod {
  kParameterShift,  // g_k(theta +- pi/2) differences, the reference rule
  kAdjoint,         // reverse-sweep evaluation of the same derivative
};

/**
 * Mean over the batch of dL/dtheta. Both methods compute the same analytic
 * derivative: the shift rule evaluates (g_k(+) - g_k(-))/2 per parameter
 * and combines with dL/dg_k = -a_k/g_k at the unshifted point; the adjoint
 * method evaluates it in O(gates) with two sweeps.
 */
GradientVector gradient(const ClassifierTemplate &tpl, const ModelParams &params,
                        const std::vector<LabeledSample> &batch,
                        GradientMethod method = GradientMethod::kParameterShift);

/// Single-sample gradient (used by the inversion attack's loss).
GradientVector sample_gradient(const ClassifierTemplate &tpl,
                               const ModelParams &params,
                               const Statevector &input,
                               const std::vector<double> &label,
                               GradientMethod method);

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  int t = 0;

  static AdamState zeros(std::size_t n) {
    AdamState s;
    s.first_moment.assign(n, 0.0);
    s.second_moment.assign(n, 0.0);
    return s;
  }
};

/// One bias-corrected Adam update: theta <- theta - lr * mhat/(sqrt(vhat)+eps).
void adam_step(std::vector<double> &theta, const std::vector<double> &grad,
               AdamState &state, double learning_rate);

/// Uniform [0, 2pi) per angle.
ModelParams init_params(const ClassifierTemplate &tpl, Rng &rng);

}  // namespace qfl
