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

#include "qfl/classifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfl {

ClassifierTemplate build_classifier(int n_qubits, int depth,
                                    std::vector<int> readout_qubits,
                                    std::vector<GateKind> rotation_layout) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("build_classifier: bad qubit count");
  }
  if (depth < 1) throw std::invalid_argument("build_classifier: depth < 1");
  if (readout_qubits.empty()) {
    throw std::invalid_argument("build_classifier: empty readout list");
  }
  for (int q : readout_qubits) {
    if (q < 0 || q >= n_qubits) {
      throw std::invalid_argument("build_classifier: readout qubit out of range");
    }
  }
  if (rotation_layout.empty()) {
    throw std::invalid_argument("build_classifier: empty rotation layout");
  }
  for (GateKind k : rotation_layout) {
    if (k != GateKind::RX && k != GateKind::RZ) {
      throw std::invalid_argument(
          "build_classifier: layout must contain rotation kinds only");
    }
  }
  return {n_qubits, depth, std::move(rotation_layout), std::move(readout_qubits)};
}

Circuit realize_classifier(const ClassifierTemplate &tpl,
                           const std::vector<double> &theta) {
  if (theta.size() != tpl.parameter_count()) {
    throw std::invalid_argument("parameter vector does not match template");
  }
  Circuit c(tpl.n_qubits);
  const int r = static_cast<int>(tpl.rotation_layout.size());
  std::size_t p = 0;
  for (int layer = 0; layer < tpl.depth; ++layer) {
    for (int q = 0; q < tpl.n_qubits; ++q) {
      for (int k = 0; k < r; ++k) {
        c.add(Gate{tpl.rotation_layout[k], q, -1, theta[p++]});
      }
    }
    for (int q = 0; q + 1 < tpl.n_qubits; ++q) c.add(Gate::cnot(q, q + 1));
  }
  return c;
}

std::vector<double> forward(const ClassifierTemplate &tpl,
                            const ModelParams &params,
                            const Statevector &input) {
  if (input.n_qubits() != tpl.n_qubits) {
    throw std::invalid_argument("input register does not match template");
  }
  Statevector state = input;
  run_circuit_in_place(state, realize_classifier(tpl, params.theta));
  return state.marginal_distribution(tpl.readout_qubits);
}

double cross_entropy(const std::vector<double> &g, const std::vector<double> &a) {
  if (g.size() != a.size()) {
    throw std::invalid_argument("cross_entropy: length mismatch");
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (a[k] != 0.0) loss -= a[k] * std::log(std::max(g[k], kLogClamp));
  }
  return loss;
}

namespace {

// dL/dg_k at the unshifted point, shared by both gradient engines.
std::vector<double> loss_weights(const std::vector<double> &g,
                                 const std::vector<double> &a) {
  std::vector<double> w(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (a[k] != 0.0) w[k] = -a[k] / std::max(g[k], kLogClamp);
  }
  return w;
}

// Applies the diagonal observable sum_k w_k P_k, where P_k projects the
// readout qubits onto bucket k.
void apply_readout_observable(Statevector &state,
                              const std::vector<int> &readout,
                              const std::vector<double> &w) {
  const int n = state.n_qubits();
  auto &amp = state.amplitudes();
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    std::uint64_t bucket = 0;
    for (int q : readout) bucket = (bucket << 1) | ((i >> (n - 1 - q)) & 1ULL);
    amp[i] *= w[bucket];
  }
}

struct RealizedGate {
  Gate gate;
  long param = -1;  // parameter index, -1 for entangler gates
};

std::vector<RealizedGate> realize_with_params(const ClassifierTemplate &tpl,
                                              const std::vector<double> &theta) {
  std::vector<RealizedGate> gates;
  const int r = static_cast<int>(tpl.rotation_layout.size());
  std::size_t p = 0;
  for (int layer = 0; layer < tpl.depth; ++layer) {
    for (int q = 0; q < tpl.n_qubits; ++q) {
      for (int k = 0; k < r; ++k) {
        gates.push_back({Gate{tpl.rotation_layout[k], q, -1, theta[p]},
                         static_cast<long>(p)});
        ++p;
      }
    }
    for (int q = 0; q + 1 < tpl.n_qubits; ++q) {
      gates.push_back({Gate::cnot(q, q + 1), -1});
    }
  }
  return gates;
}

void unapply(Statevector &state, const Gate &g) {
  Gate inv = g;
  if (gate_kind_has_angle(g.kind)) inv.angle = -g.angle;
  apply_gate_in_place(state, inv);
}

void sample_gradient_shift(const ClassifierTemplate &tpl, std::vector<double> theta,
                           const Statevector &input,
                           const std::vector<double> &w, double *out) {
  const double shift = std::numbers::pi / 2.0;
  ModelParams probe;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double saved = theta[j];
    theta[j] = saved + shift;
    probe.theta = theta;
    const auto g_plus = forward(tpl, probe, input);
    theta[j] = saved - shift;
    probe.theta = theta;
    const auto g_minus = forward(tpl, probe, input);
    theta[j] = saved;
    double d = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] != 0.0) d += w[k] * (g_plus[k] - g_minus[k]) / 2.0;
    }
    out[j] += d;
  }
}

void sample_gradient_adjoint(const ClassifierTemplate &tpl,
                             const std::vector<double> &theta,
                             const Statevector &input,
                             const std::vector<double> &w, double *out) {
  const auto gates = realize_with_params(tpl, theta);
  Statevector phi = input;
  for (const auto &rg : gates) apply_gate_in_place(phi, rg.gate);
  Statevector lambda = phi;
  apply_readout_observable(lambda, tpl.readout_qubits, w);
  // Walking backwards: phi holds the state after gate j, lambda holds
  // O U phi pulled back through the same suffix. For a rotation about
  // generator P the derivative contribution is Im(<lambda|P|phi>).
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    const Gate &g = it->gate;
    if (it->param >= 0) {
      const auto &la = lambda.amplitudes();
      const auto &pa = phi.amplitudes();
      const std::uint64_t st = std::uint64_t{1}
                               << (tpl.n_qubits - 1 - g.q0);
      cdouble inner{0.0, 0.0};
      if (g.kind == GateKind::RX) {
        for (std::uint64_t i = 0; i < phi.dim(); ++i) {
          inner += std::conj(la[i]) * pa[i ^ st];
        }
      } else {  // RZ
        for (std::uint64_t i = 0; i < phi.dim(); ++i) {
          const double sign = (i & st) ? -1.0 : 1.0;
          inner += std::conj(la[i]) * pa[i] * sign;
        }
      }
      out[it->param] += inner.imag();
    }
    unapply(phi, g);
    unapply(lambda, g);
  }
}

}  // namespace

GradientVector sample_gradient(const ClassifierTemplate &tpl,
                               const ModelParams &params,
                               const Statevector &input,
                               const std::vector<double> &label,
                               GradientMethod method) {
  const auto g = forward(tpl, params, input);
  const auto w = loss_weights(g, label);
  GradientVector grad;
  grad.values.assign(params.theta.size(), 0.0);
  if (method == GradientMethod::kParameterShift) {
    sample_gradient_shift(tpl, params.theta, input, w, grad.values.data());
  } else {
    sample_gradient_adjoint(tpl, params.theta, input, w, grad.values.data());
  }
  return grad;
}

GradientVector gradient(const ClassifierTemplate &tpl, const ModelParams &params,
                        const std::vector<LabeledSample> &batch,
                        GradientMethod method) {
  if (batch.empty()) throw std::invalid_argument("gradient: empty batch");
  GradientVector total;
  total.values.assign(params.theta.size(), 0.0);
  for (const auto &sample : batch) {
    const auto g = sample_gradient(tpl, params, sample.input, sample.label, method);
    for (std::size_t j = 0; j < total.values.size(); ++j) {
      total.values[j] += g.values[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto &v : total.values) v *= inv;
  return total;
}

void adam_step(std::vector<double> &theta, const std::vector<double> &grad,
               AdamState &state, double learning_rate) {
  if (grad.size() != theta.size() || state.first_moment.size() != theta.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, state.t);
  const double bc2 = 1.0 - std::pow(state.beta2, state.t);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    auto &m = state.first_moment[j];
    auto &v = state.second_moment[j];
    m = state.beta1 * m + (1.0 - state.beta1) * grad[j];
    v = state.beta2 * v + (1.0 - state.beta2) * grad[j] * grad[j];
    theta[j] -= learning_rate * (m / bc1) / (std::sqrt(v / bc2) + state.eps_hat);
  }
}

ModelParams init_params(const ClassifierTemplate &tpl, Rng &rng) {
  ModelParams p;
  p.theta.resize(tpl.parameter_count());
  for (auto &t : p.theta) t = rng.uniform_angle();
  return p;
}

}  // namespace qfl
