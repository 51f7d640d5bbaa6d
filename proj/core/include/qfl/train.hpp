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

#include <vector>

#include "qfl/classifier.hpp"
#include "qfl/rng.hpp"

namespace qfl {

enum class Backend { kDirect, kMbqc, kUbqc };

/**
 * Forward pass through the selected backend. The direct backend runs the
 * circuit on the statevector; mbqc compiles input preparation plus the
 * realized classifier onto the brickwork and evaluates the pattern
 * exactly; ubqc additionally wraps the evaluation in the delegation
 * protocol. All three agree on the readout distribution.
 */
std::vector<double> forward_with_backend(const ClassifierTemplate &tpl,
                                         const ModelParams &params,
                                         const LabeledSample &sample,
                                         Backend backend);

enum class ParamInit {
  kUniformAngle,  // uniform [0, 2pi) per angle
  kSmall,         // uniform [-0.1, 0.1): near-identity start
};

struct TrainConfig {
  int iterations = 100;
  int batch_size = 16;
  double learning_rate = 1e-3;
  GradientMethod gradient_method = GradientMethod::kAdjoint;
  Backend backend = Backend::kDirect;
  ParamInit param_init = ParamInit::kUniformAngle;
  double input_noise_sigma = 0.0;      // N(0, sigma^2) per input element
  double gradient_noise_scale = 0.0;   // scale * N(0,1) per gradient element
  int eval_every = 1;                  // accuracy refresh cadence
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

struct IterationRecord {
  int iteration = 0;
  double loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  int client_id = -1;     // federated runs only
  double mu_used = 0.0;   // federated runs only (0 = not applicable)
};

struct TrainResult {
  std::vector<IterationRecord> history;
  ModelParams params;
};

/**
 * Single-party mini-batch training with Adam. Deterministic for a given
 * seed: parameter init, batch draws and noise draws all come from fixed
 * substreams of `seed`.
 */
TrainResult train_single(const std::vector<LabeledSample> &train,
                         const std::vector<LabeledSample> &validation,
                         const ClassifierTemplate &tpl, const TrainConfig &config,
                         std::uint64_t seed);

/// As train_single but continuing from the supplied parameters.
TrainResult train_single_from(const std::vector<LabeledSample> &train,
                              const std::vector<LabeledSample> &validation,
                              const ClassifierTemplate &tpl,
                              ModelParams initial_params,
                              const TrainConfig &config, std::uint64_t seed);

/// Fraction of samples whose argmax prediction matches the label; argmax
/// ties resolve toward the lower index.
double evaluate(const ClassifierTemplate &tpl, const ModelParams &params,
                const std::vector<LabeledSample> &samples);

/// Adds N(0, sigma^2) to the real part of every input amplitude, then
/// renormalizes.
LabeledSample perturb_input(const LabeledSample &sample, double sigma, Rng &rng);

/// Adds scale * N(0,1) independently to every gradient element.
GradientVector perturb_gradient(const GradientVector &grad, double scale,
                                Rng &rng);

/// Argmax with ties toward the lower index.
std::size_t argmax_index(const std::vector<double> &v);

/// Draws `k` distinct indices from [0, n) (partial Fisher-Yates).
std::vector<std::size_t> draw_batch_indices(std::size_t n, std::size_t k,
                                            Rng &rng);

}  // namespace qfl
