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

#include "qfl/train.hpp"

#include <cmath>
#include <stdexcept>

#include "qfl/brickwork.hpp"
#include "qfl/encoding.hpp"
#include "qfl/ubqc.hpp"

namespace qfl {

namespace {

std::vector<double> marginal_from_joint(const std::vector<double> &joint,
                                        int n_qubits,
                                        const std::vector<int> &readout) {
  std::vector<double> out(std::size_t{1} << readout.size(), 0.0);
  for (std::size_t i = 0; i < joint.size(); ++i) {
    std::size_t bucket = 0;
    for (int q : readout) {
      bucket = (bucket << 1) | ((i >> (n_qubits - 1 - q)) & 1ULL);
    }
    out[bucket] += joint[i];
  }
  return out;
}

Circuit prep_then_classifier(const ClassifierTemplate &tpl,
                             const ModelParams &params,
                             const LabeledSample &sample) {
  const auto prep =
      amplitude_encode_complex(sample.input.amplitudes(), tpl.n_qubits);
  Circuit combined(tpl.n_qubits);
  combined.gates = prep.circuit.gates;
  const Circuit classifier = realize_classifier(tpl, params.theta);
  combined.gates.insert(combined.gates.end(), classifier.gates.begin(),
                        classifier.gates.end());
  return combined;
}

}  // namespace

std::vector<double> forward_with_backend(const ClassifierTemplate &tpl,
                                         const ModelParams &params,
                                         const LabeledSample &sample,
                                         Backend backend) {
  switch (backend) {
    case Backend::kDirect:
      return forward(tpl, params, sample.input);
    case Backend::kMbqc: {
      const auto prep =
          amplitude_encode_complex(sample.input.amplitudes(), tpl.n_qubits);
      const Circuit classifier = realize_classifier(tpl, params.theta);
      const auto pattern = compile_circuit(classifier);
      PatternEvalOptions opt;
      opt.mode = PatternEvalMode::kDeterministic;
      const auto joint = evaluate_pattern(pattern, prep.circuit, opt);
      return marginal_from_joint(joint, tpl.n_qubits, tpl.readout_qubits);
    }
    case Backend::kUbqc: {
      const Circuit combined = prep_then_classifier(tpl, params, sample);
      UbqcOptions opt;
      opt.mode = PatternEvalMode::kDeterministic;
      opt.client_seed = 0;
      Rng rng(0);
      const auto res = run_delegated(combined, opt, rng);
      return marginal_from_joint(res.distribution, tpl.n_qubits,
                                 tpl.readout_qubits);
    }
  }
  throw std::logic_error("unknown backend");
}

std::size_t argmax_index(const std::vector<double> &v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

double evaluate(const ClassifierTemplate &tpl, const ModelParams &params,
                const std::vector<LabeledSample> &samples) {
  if (samples.empty()) throw std::invalid_argument("evaluate: empty dataset");
  std::size_t correct = 0;
  for (const auto &s : samples) {
    const auto g = forward(tpl, params, s.input);
    if (argmax_index(g) == argmax_index(s.label)) ++correct;
  }
  return static_cast<double>(correct) / samples.size();
}

LabeledSample perturb_input(const LabeledSample &sample, double sigma, Rng &rng) {
  if (sigma < 0.0) throw std::invalid_argument("perturb_input: sigma < 0");
  if (sigma == 0.0) return sample;
  LabeledSample out = sample;
  auto &amp = out.input.amplitudes();
  for (auto &a : amp) a += sigma * rng.normal();
  out.input.normalize();
  return out;
}

GradientVector perturb_gradient(const GradientVector &grad, double scale,
                                Rng &rng) {
  if (scale < 0.0) throw std::invalid_argument("perturb_gradient: scale < 0");
  GradientVector out = grad;
  if (scale == 0.0) return out;
  for (auto &v : out.values) v += scale * rng.normal();
  return out;
}

std::vector<std::size_t> draw_batch_indices(std::size_t n, std::size_t k,
                                            Rng &rng) {
  if (k > n) throw std::invalid_argument("batch larger than pool");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_int(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

namespace {

GradientVector batch_gradient_backend(const ClassifierTemplate &tpl,
                                      const ModelParams &params,
                                      const std::vector<LabeledSample> &batch,
                                      const TrainConfig &config) {
  if (config.backend == Backend::kDirect) {
    return gradient(tpl, params, batch, config.gradient_method);
  }
  // Pattern backends evaluate the shift rule through pattern forwards.
  GradientVector total;
  total.values.assign(params.theta.size(), 0.0);
  const double shift = std::numbers::pi / 2.0;
  for (const auto &sample : batch) {
    const auto g = forward_with_backend(tpl, params, sample, config.backend);
    std::vector<double> w(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (sample.label[k] != 0.0) {
        w[k] = -sample.label[k] / std::max(g[k], kLogClamp);
      }
    }
    ModelParams probe = params;
    for (std::size_t j = 0; j < params.theta.size(); ++j) {
      probe.theta[j] = params.theta[j] + shift;
      const auto gp = forward_with_backend(tpl, probe, sample, config.backend);
      probe.theta[j] = params.theta[j] - shift;
      const auto gm = forward_with_backend(tpl, probe, sample, config.backend);
      probe.theta[j] = params.theta[j];
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] != 0.0) total.values[j] += w[k] * (gp[k] - gm[k]) / 2.0;
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto &v : total.values) v *= inv;
  return total;
}

}  // namespace

TrainResult train_single_from(const std::vector<LabeledSample> &train,
                              const std::vector<LabeledSample> &validation,
                              const ClassifierTemplate &tpl,
                              ModelParams initial_params,
                              const TrainConfig &config, std::uint64_t seed) {
  if (train.empty()) throw std::invalid_argument("train_single: empty train set");
  if (config.batch_size < 1 ||
      static_cast<std::size_t>(config.batch_size) > train.size()) {
    throw std::invalid_argument("train_single: bad batch size");
  }
  Rng batch_rng(seed, rng_tag::kClientBase + 0);
  Rng input_noise_rng(seed, rng_tag::kInputNoise);
  Rng grad_noise_rng(seed, rng_tag::kGradientNoise);

  TrainResult result;
  result.params = std::move(initial_params);
  AdamState adam = AdamState::zeros(result.params.theta.size());
  adam.beta1 = config.beta1;
  adam.beta2 = config.beta2;
  adam.eps_hat = config.eps_hat;

  double last_train_acc = 0.0, last_val_acc = 0.0;
  for (int iter = 0; iter < config.iterations; ++iter) {
    const auto idx =
        draw_batch_indices(train.size(), config.batch_size, batch_rng);
    std::vector<LabeledSample> batch;
    batch.reserve(idx.size());
    for (auto i : idx) {
      batch.push_back(config.input_noise_sigma > 0.0
                          ? perturb_input(train[i], config.input_noise_sigma,
                                          input_noise_rng)
                          : train[i]);
    }
    double loss = 0.0;
    for (const auto &s : batch) {
      loss += cross_entropy(
          forward_with_backend(tpl, result.params, s, config.backend), s.label);
    }
    loss /= batch.size();

    auto grad = batch_gradient_backend(tpl, result.params, batch, config);
    if (config.gradient_noise_scale > 0.0) {
      grad = perturb_gradient(grad, config.gradient_noise_scale, grad_noise_rng);
    }
    adam_step(result.params.theta, grad.values, adam, config.learning_rate);
    result.params.step_count += 1;

    const bool eval_now =
        (iter % config.eval_every == 0) || (iter + 1 == config.iterations);
    if (eval_now) {
      last_train_acc = evaluate(tpl, result.params, train);
      last_val_acc =
          validation.empty() ? 0.0 : evaluate(tpl, result.params, validation);
    }
    result.history.push_back(
        {iter, loss, last_train_acc, last_val_acc, -1, 0.0});
  }
  return result;
}

TrainResult train_single(const std::vector<LabeledSample> &train,
                         const std::vector<LabeledSample> &validation,
                         const ClassifierTemplate &tpl, const TrainConfig &config,
                         std::uint64_t seed) {
  Rng init_rng(seed, rng_tag::kParamInit);
  ModelParams initial;
  if (config.param_init == ParamInit::kUniformAngle) {
    initial = init_params(tpl, init_rng);
  } else {
    initial.theta.resize(tpl.parameter_count());
    for (auto &t : initial.theta) t = 0.2 * init_rng.uniform() - 0.1;
  }
  return train_single_from(train, validation, tpl, std::move(initial), config,
                           seed);
}

}  // namespace qfl
