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

#include <limits>
#include <optional>
#include <vector>

#include "qfl/train.hpp"

namespace qfl {

enum class DpNoiseKind { kGaussian, kLaplace };
enum class ClipMode { kPerElement, kL2 };

struct FederationConfig {
  int n_clients = 1;
  int samples_per_client = 0;  // 0 = whatever the shard holds
  int batch_size = 16;
  int iterations = 100;
  double learning_rate = 1e-3;
  double clip_bound = 0.01;  // R
  // Noise strength mu; +infinity disables the noise entirely.
  double noise_mu = std::numeric_limits<double>::infinity();
  std::optional<std::vector<double>> per_client_mu;
  DpNoiseKind noise_kind = DpNoiseKind::kGaussian;
  ClipMode clip_mode = ClipMode::kPerElement;
  GradientMethod gradient_method = GradientMethod::kAdjoint;
  Backend backend = Backend::kDirect;
  double input_noise_sigma = 0.0;
  double gradient_noise_scale = 0.0;
  int eval_every = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

/// Uniform i.i.d. client indices, one per iteration.
std::vector<int> make_schedule(int iterations, int n_clients, Rng &rng);

/// Per-element clipping: g[j] / max(1, |g[j]|/R).
GradientVector clip_gradient(const GradientVector &grad, double clip_bound,
                             ClipMode mode = ClipMode::kPerElement);

/// Adds (2R/mu) * N(0,1) (or Laplace of that scale) per element;
/// mu = +infinity returns the input unchanged.
GradientVector add_dp_noise(const GradientVector &clipped, double clip_bound,
                            double mu, Rng &rng,
                            DpNoiseKind kind = DpNoiseKind::kGaussian);

/**
 * One client's private shard. The orchestrator never touches the samples:
 * the only thing that leaves is the clipped-and-noised batch gradient.
 */
class ClientShard {
 public:
  ClientShard(int client_id, std::vector<LabeledSample> samples,
              std::uint64_t master_seed);

  int client_id() const { return client_id_; }
  std::size_t size() const { return samples_.size(); }

  struct Update {
    GradientVector grad;  // clipped and noised, ready for upload
    double batch_loss = 0.0;
  };

  /// Batch gradient, clipped then noised, ready for upload.
  Update compute_update(const ClassifierTemplate &tpl, const ModelParams &params,
                        const FederationConfig &config, double mu);

  /// Accuracy of the current model on this client's private data.
  double local_accuracy(const ClassifierTemplate &tpl,
                        const ModelParams &params) const;

 private:
  int client_id_;
  std::vector<LabeledSample> samples_;
  Rng rng_;
};

struct FederatedResult {
  std::vector<IterationRecord> history;
  ModelParams params;
  std::vector<int> schedule;
};

/**
 * One round per iteration: pick the scheduled client, pull its noised
 * update, apply Adam to the shared parameters, evaluate on the held-out
 * pool. Strictly sequential, reproducing the single-shared-model update
 * rule.
 */
FederatedResult federated_train(std::vector<ClientShard> &shards,
                                const ClassifierTemplate &tpl,
                                const FederationConfig &config,
                                const std::vector<LabeledSample> &validation,
                                std::uint64_t seed);

}  // namespace qfl
