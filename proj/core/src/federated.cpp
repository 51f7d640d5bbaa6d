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

#include "qfl/federated.hpp"

#include <cmath>
#include <stdexcept>

namespace qfl {

std::vector<int> make_schedule(int iterations, int n_clients, Rng &rng) {
  if (iterations < 1 || n_clients < 1) {
    throw std::invalid_argument("make_schedule: nonpositive dimensions");
  }
  std::vector<int> schedule(iterations);
  for (auto &s : schedule) {
    s = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_clients)));
  }
  return schedule;
}

GradientVector clip_gradient(const GradientVector &grad, double clip_bound,
                             ClipMode mode) {
  if (clip_bound <= 0.0) throw std::invalid_argument("clip bound must be > 0");
  GradientVector out = grad;
  if (mode == ClipMode::kPerElement) {
    for (auto &v : out.values) {
      v /= std::max(1.0, std::abs(v) / clip_bound);
    }
  } else {
    double norm = 0.0;
    for (double v : out.values) norm += v * v;
    norm = std::sqrt(norm);
    const double scale = 1.0 / std::max(1.0, norm / clip_bound);
    for (auto &v : out.values) v *= scale;
  }
  return out;
}

GradientVector add_dp_noise(const GradientVector &clipped, double clip_bound,
                            double mu, Rng &rng, DpNoiseKind kind) {
  if (!(mu > 0.0)) throw std::invalid_argument("noise strength must be > 0");
  GradientVector out = clipped;
  if (std::isinf(mu)) return out;  // mu = +infinity means no noise
  const double scale = 2.0 * clip_bound / mu;
  for (auto &v : out.values) {
    v += (kind == DpNoiseKind::kGaussian) ? scale * rng.normal()
                                          : rng.laplace(scale);
  }
  return out;
}

ClientShard::ClientShard(int client_id, std::vector<LabeledSample> samples,
                         std::uint64_t master_seed)
    : client_id_(client_id),
      samples_(std::move(samples)),
      rng_(master_seed, rng_tag::kClientBase + client_id) {
  if (samples_.empty()) throw std::invalid_argument("empty client shard");
}

ClientShard::Update ClientShard::compute_update(const ClassifierTemplate &tpl,
                                                const ModelParams &params,
                                                const FederationConfig &config,
                                                double mu) {
  const auto idx = draw_batch_indices(
      samples_.size(), static_cast<std::size_t>(config.batch_size), rng_);
  std::vector<LabeledSample> batch;
  batch.reserve(idx.size());
  for (auto i : idx) {
    batch.push_back(config.input_noise_sigma > 0.0
                        ? perturb_input(samples_[i], config.input_noise_sigma, rng_)
                        : samples_[i]);
  }
  Update update;
  for (const auto &s : batch) {
    update.batch_loss += cross_entropy(forward(tpl, params, s.input), s.label);
  }
  update.batch_loss /= batch.size();
  auto grad = gradient(tpl, params, batch, config.gradient_method);
  if (config.gradient_noise_scale > 0.0) {
    grad = perturb_gradient(grad, config.gradient_noise_scale, rng_);
  }
  const auto clipped = clip_gradient(grad, config.clip_bound, config.clip_mode);
  update.grad =
      add_dp_noise(clipped, config.clip_bound, mu, rng_, config.noise_kind);
  return update;
}

double ClientShard::local_accuracy(const ClassifierTemplate &tpl,
                                   const ModelParams &params) const {
  return evaluate(tpl, params, samples_);
}

FederatedResult federated_train(std::vector<ClientShard> &shards,
                                const ClassifierTemplate &tpl,
                                const FederationConfig &config,
                                const std::vector<LabeledSample> &validation,
                                std::uint64_t seed) {
  if (shards.empty() ||
      static_cast<int>(shards.size()) != config.n_clients) {
    throw std::invalid_argument("federated_train: shard count != n_clients");
  }
  if (config.per_client_mu &&
      config.per_client_mu->size() != shards.size()) {
    throw std::invalid_argument("federated_train: per-client mu length");
  }
  for (const auto &shard : shards) {
    if (config.batch_size < 1 ||
        static_cast<std::size_t>(config.batch_size) > shard.size()) {
      throw std::invalid_argument("federated_train: bad batch size for shard");
    }
  }

  Rng init_rng(seed, rng_tag::kParamInit);
  Rng schedule_rng(seed, rng_tag::kSchedule);

  FederatedResult result;
  result.params = init_params(tpl, init_rng);
  result.schedule = make_schedule(config.iterations, config.n_clients, schedule_rng);

  AdamState adam = AdamState::zeros(result.params.theta.size());
  adam.beta1 = config.beta1;
  adam.beta2 = config.beta2;
  adam.eps_hat = config.eps_hat;

  double last_train_acc = 0.0, last_val_acc = 0.0;
  for (int iter = 0; iter < config.iterations; ++iter) {
    const int cid = result.schedule[iter];
    auto &client = shards[cid];
    const double mu =
        config.per_client_mu ? (*config.per_client_mu)[cid] : config.noise_mu;
    const auto update = client.compute_update(tpl, result.params, config, mu);
    adam_step(result.params.theta, update.grad.values, adam,
              config.learning_rate);
    result.params.step_count += 1;

    const bool eval_now =
        (iter % config.eval_every == 0) || (iter + 1 == config.iterations);
    if (eval_now) {
      last_train_acc = client.local_accuracy(tpl, result.params);
      last_val_acc =
          validation.empty() ? 0.0 : evaluate(tpl, result.params, validation);
    }
    result.history.push_back(
        {iter, update.batch_loss, last_train_acc, last_val_acc, cid, mu});
  }
  return result;
}

}  // namespace qfl
