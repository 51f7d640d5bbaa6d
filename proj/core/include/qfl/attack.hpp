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

#include <map>
#include <string>
#include <vector>

#include "qfl/classifier.hpp"
#include "qfl/rng.hpp"

namespace qfl {

enum class InputGradMethod { kCentralFiniteDifference, kAnalytic };

struct AttackConfig {
  int iterations = 300;
  double learning_rate = 0.05;
  std::vector<std::vector<double>> candidate_labels;  // one-hot candidates
  InputGradMethod input_grad_method = InputGradMethod::kCentralFiniteDifference;
  double fd_step = 1e-4;
  bool random_init = false;  // uniform state by default, as prescribed
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

struct AttackResult {
  Statevector recovered_state{1};
  std::vector<double> recovered_label;
  double final_loss = 0.0;
  std::map<std::size_t, double> per_label_losses;  // candidate index -> loss
  double fidelity_vs_truth = -1.0;  // filled only when truth is supplied
};

/// Squared Euclidean distance between the candidate's parameter gradient
/// and the uploaded target gradient.
double attack_loss(const ClassifierTemplate &tpl, const ModelParams &params,
                   const Statevector &candidate, const std::vector<double> &label,
                   const GradientVector &target_grad,
                   GradientMethod grad_method = GradientMethod::kAdjoint);

/**
 * Gradient of the attack loss with respect to the candidate amplitudes,
 * packed as (d/dRe a_0..a_{N-1}, d/dIm a_0..a_{N-1}), for the composition
 * with renormalization (candidates are projected back to the sphere, and
 * finite differences renormalize before every probe). The analytic path
 * supports single-readout-qubit templates and matches finite differences
 * to 1e-4 relative error.
 */
std::vector<double> input_gradient(const ClassifierTemplate &tpl,
                                   const ModelParams &params,
                                   const Statevector &candidate,
                                   const std::vector<double> &label,
                                   const GradientVector &target_grad,
                                   InputGradMethod method, double fd_step = 1e-4);

/**
 * Gradient inversion: starting from the uniform state, Adam-descend the
 * attack loss over the input amplitudes for every candidate label,
 * renormalizing after each step, and keep the best label by final loss.
 */
AttackResult run_attack(const GradientVector &target_grad,
                        const ClassifierTemplate &tpl, const ModelParams &params,
                        const AttackConfig &config, Rng &rng);

/// |<a|b>|^2.
double fidelity(const Statevector &a, const Statevector &b);

/// Binary P5 image of |a_j| mapped linearly onto [0, 255] (max to 255).
void write_amplitude_pgm(const std::string &path,
                         const std::vector<cdouble> &amplitudes, int width,
                         int height);

}  // namespace qfl
