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

#include "qfl/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qfl {

namespace {

Statevector normalized_from_coords(int n_qubits, const std::vector<double> &x) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<cdouble> amp(dim);
  for (std::size_t i = 0; i < dim; ++i) amp[i] = cdouble{x[i], x[dim + i]};
  Statevector s(n_qubits, std::move(amp));
  s.normalize();
  return s;
}

std::vector<double> coords_from_state(const Statevector &s) {
  const auto &amp = s.amplitudes();
  std::vector<double> x(2 * amp.size());
  for (std::size_t i = 0; i < amp.size(); ++i) {
    x[i] = amp[i].real();
    x[amp.size() + i] = amp[i].imag();
  }
  return x;
}

double loss_of_gradient(const GradientVector &g, const GradientVector &target) {
  double sum = 0.0;
  for (std::size_t j = 0; j < g.values.size(); ++j) {
    const double d = g.values[j] - target.values[j];
    sum += d * d;
  }
  return sum;
}

}  // namespace

double attack_loss(const ClassifierTemplate &tpl, const ModelParams &params,
                   const Statevector &candidate, const std::vector<double> &label,
                   const GradientVector &target_grad, GradientMethod grad_method) {
  const auto g = sample_gradient(tpl, params, candidate, label, grad_method);
  if (g.values.size() != target_grad.values.size()) {
    throw std::invalid_argument("attack_loss: target gradient length mismatch");
  }
  return loss_of_gradient(g, target_grad);
}

namespace {

std::vector<double> fd_input_gradient(const ClassifierTemplate &tpl,
                                      const ModelParams &params,
                                      const Statevector &candidate,
                                      const std::vector<double> &label,
                                      const GradientVector &target, double h) {
  std::vector<double> x = coords_from_state(candidate);
  std::vector<double> grad(x.size(), 0.0);
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double saved = x[m];
    x[m] = saved + h;
    const double lp = attack_loss(tpl, params,
                                  normalized_from_coords(tpl.n_qubits, x), label,
                                  target, GradientMethod::kAdjoint);
    x[m] = saved - h;
    const double lm = attack_loss(tpl, params,
                                  normalized_from_coords(tpl.n_qubits, x), label,
                                  target, GradientMethod::kAdjoint);
    x[m] = saved;
    if (!std::isfinite(lp) || !std::isfinite(lm)) {
      throw std::domain_error("input_gradient: non-finite loss during probing");
    }
    grad[m] = (lp - lm) / (2.0 * h);
  }
  return grad;
}

// Analytic gradient of || D(phi) - t ||^2 with D_j = sum_k w_k(phi) s_kj(phi),
// where every ingredient is a quadratic form <phi|M|phi> of the input.
// For a single readout qubit the shifted differences satisfy
// s_1j = -s_0j, so s_0j is recoverable from D_j and no extra circuit
// evaluations are needed per class.
std::vector<double> analytic_input_gradient(const ClassifierTemplate &tpl,
                                            const ModelParams &params,
                                            const Statevector &candidate,
                                            const std::vector<double> &label,
                                            const GradientVector &target) {
  if (tpl.readout_qubits.size() != 1) {
    throw std::invalid_argument(
        "analytic input gradient supports single-readout templates");
  }
  const Circuit circuit = realize_classifier(tpl, params.theta);
  const int n = tpl.n_qubits;
  const std::size_t dim = candidate.dim();

  const auto g = forward(tpl, params, candidate);
  std::vector<double> w(2, 0.0);
  for (int k = 0; k < 2; ++k) {
    if (label[k] != 0.0) w[k] = -label[k] / std::max(g[k], kLogClamp);
  }
  const auto D = sample_gradient(tpl, params, candidate, label,
                                 GradientMethod::kAdjoint);

  auto apply_bucket_weights = [&](Statevector &s, double w0, double w1) {
    auto &amp = s.amplitudes();
    const std::uint64_t st = std::uint64_t{1} << (n - 1 - tpl.readout_qubits[0]);
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
      amp[i] *= (i & st) ? w1 : w0;
    }
  };
  auto run_reverse = [&](Statevector &s, const Circuit &c) {
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
      Gate inv = *it;
      if (gate_kind_has_angle(inv.kind)) inv.angle = -inv.angle;
      apply_gate_in_place(s, inv);
    }
  };

  const double w_diff = w[0] - w[1];
  if (w_diff == 0.0) {
    throw std::domain_error("analytic input gradient: degenerate weights");
  }

  // Residuals c_j = D_j - t_j and the scalar S = sum_j 2 c_j s_0j.
  std::vector<double> residual(D.values.size());
  double S = 0.0;
  for (std::size_t j = 0; j < D.values.size(); ++j) {
    residual[j] = D.values[j] - target.values[j];
    S += 2.0 * residual[j] * (D.values[j] / w_diff);
  }

  // Term 1: gradient through the w_k(phi) = -a_k/g_k(phi) dependence.
  // c1_k = (a_k / g_k^2) * S with alternating sign via s_1j = -s_0j.
  Statevector vec1 = run_circuit(candidate, circuit);
  const double c1_0 =
      (label[0] != 0.0) ? label[0] / std::pow(std::max(g[0], kLogClamp), 2) * S
                        : 0.0;
  const double c1_1 =
      (label[1] != 0.0) ? -label[1] / std::pow(std::max(g[1], kLogClamp), 2) * S
                        : 0.0;
  apply_bucket_weights(vec1, c1_0, c1_1);
  run_reverse(vec1, circuit);

  // Term 2: gradient through the shifted quadratic forms, one plus/minus
  // circuit pair per parameter.
  std::vector<cdouble> vec2(dim, cdouble{0.0, 0.0});
  const double shift = std::numbers::pi / 2.0;
  Circuit shifted = circuit;
  std::vector<std::size_t> param_gate;  // parameter index -> gate index
  param_gate.reserve(params.theta.size());
  {
    std::size_t p = 0;
    for (std::size_t gi = 0; gi < shifted.gates.size(); ++gi) {
      if (gate_kind_has_angle(shifted.gates[gi].kind)) {
        param_gate.push_back(gi);
        ++p;
      }
    }
    if (p != params.theta.size()) {
      throw std::logic_error("parameter/gate bookkeeping mismatch");
    }
  }
  for (std::size_t j = 0; j < params.theta.size(); ++j) {
    if (residual[j] == 0.0) continue;
    for (double sgn : {1.0, -1.0}) {
      auto &gate = shifted.gates[param_gate[j]];
      gate.angle += sgn * shift;
      Statevector z = run_circuit(candidate, shifted);
      apply_bucket_weights(z, w[0], w[1]);
      run_reverse(z, shifted);
      gate.angle -= sgn * shift;
      const double coef = residual[j] * sgn;  // (+) minus (-), halves cancel 2x
      for (std::size_t i = 0; i < dim; ++i) vec2[i] += coef * z.amplitudes()[i];
    }
  }

  std::vector<double> grad(2 * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    const cdouble total = vec1.amplitudes()[i] + vec2[i];
    grad[i] = 2.0 * total.real();
    grad[dim + i] = 2.0 * total.imag();
  }

  // Project onto the sphere's tangent: the loss is evaluated on the
  // normalized candidate, so the radial component is zero.
  const auto x = coords_from_state(candidate);
  double radial = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) radial += x[m] * grad[m];
  for (std::size_t m = 0; m < x.size(); ++m) grad[m] -= radial * x[m];
  return grad;
}

}  // namespace

std::vector<double> input_gradient(const ClassifierTemplate &tpl,
                                   const ModelParams &params,
                                   const Statevector &candidate,
                                   const std::vector<double> &label,
                                   const GradientVector &target_grad,
                                   InputGradMethod method, double fd_step) {
  if (std::abs(candidate.norm_sq() - 1.0) > 1e-8) {
    throw std::invalid_argument("input_gradient: candidate not normalized");
  }
  if (method == InputGradMethod::kCentralFiniteDifference) {
    return fd_input_gradient(tpl, params, candidate, label, target_grad, fd_step);
  }
  return analytic_input_gradient(tpl, params, candidate, label, target_grad);
}

AttackResult run_attack(const GradientVector &target_grad,
                        const ClassifierTemplate &tpl, const ModelParams &params,
                        const AttackConfig &config, Rng &rng) {
  if (target_grad.values.size() != tpl.parameter_count()) {
    throw std::invalid_argument("run_attack: target gradient length mismatch");
  }
  if (config.candidate_labels.empty()) {
    throw std::invalid_argument("run_attack: no candidate labels");
  }
  const std::size_t dim = std::size_t{1} << tpl.n_qubits;

  AttackResult best;
  best.final_loss = std::numeric_limits<double>::infinity();
  for (std::size_t li = 0; li < config.candidate_labels.size(); ++li) {
    const auto &label = config.candidate_labels[li];
    // Uniform initial state |phi_0> = 2^{-n/2} (1, ..., 1).
    std::vector<double> x(2 * dim, 0.0);
    if (config.random_init) {
      for (std::size_t i = 0; i < 2 * dim; ++i) x[i] = rng.normal();
    } else {
      for (std::size_t i = 0; i < dim; ++i) x[i] = 1.0;
    }
    Statevector candidate = normalized_from_coords(tpl.n_qubits, x);
    x = coords_from_state(candidate);

    AdamState adam = AdamState::zeros(x.size());
    adam.beta1 = config.beta1;
    adam.beta2 = config.beta2;
    adam.eps_hat = config.eps_hat;
    for (int iter = 0; iter < config.iterations; ++iter) {
      const auto grad = input_gradient(tpl, params, candidate, label,
                                       target_grad, config.input_grad_method,
                                       config.fd_step);
      adam_step(x, grad, adam, config.learning_rate);
      candidate = normalized_from_coords(tpl.n_qubits, x);
      x = coords_from_state(candidate);
    }
    const double loss = attack_loss(tpl, params, candidate, label, target_grad);
    best.per_label_losses[li] = loss;
    if (loss < best.final_loss) {
      best.final_loss = loss;
      best.recovered_state = candidate;
      best.recovered_label = label;
    }
  }
  return best;
}

double fidelity(const Statevector &a, const Statevector &b) {
  return Statevector::fidelity(a, b);
}

void write_amplitude_pgm(const std::string &path,
                         const std::vector<cdouble> &amplitudes, int width,
                         int height) {
  if (static_cast<std::size_t>(width) * height != amplitudes.size()) {
    throw std::invalid_argument("write_amplitude_pgm: geometry mismatch");
  }
  double peak = 0.0;
  for (const auto &a : amplitudes) peak = std::max(peak, std::abs(a));
  if (peak == 0.0) peak = 1.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "P5\n" << width << " " << height << "\n255\n";
  for (const auto &a : amplitudes) {
    const int v =
        static_cast<int>(std::lround(std::abs(a) / peak * 255.0));
    out.put(static_cast<char>(std::clamp(v, 0, 255)));
  }
}

}  // namespace qfl
