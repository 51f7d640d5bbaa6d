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

#include "qfl/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace qfl {

MlpClassifier::MlpClassifier(int n_inputs, int hidden1, int hidden2,
                             int n_classes, Rng &rng) {
  auto make_layer = [&rng](int in, int out) {
    Layer l;
    l.in = in;
    l.out = out;
    l.w.resize(static_cast<std::size_t>(in) * out);
    l.b.assign(out, 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (auto &w : l.w) w = (2.0 * rng.uniform() - 1.0) * bound;
    l.mw.assign(l.w.size(), 0.0);
    l.vw.assign(l.w.size(), 0.0);
    l.mb.assign(l.b.size(), 0.0);
    l.vb.assign(l.b.size(), 0.0);
    return l;
  };
  layers_.push_back(make_layer(n_inputs, hidden1));
  layers_.push_back(make_layer(hidden1, hidden2));
  layers_.push_back(make_layer(hidden2, n_classes));
}

std::vector<double> MlpClassifier::layer_forward(const Layer &l,
                                                 const std::vector<double> &x,
                                                 bool relu) const {
  std::vector<double> y(l.out, 0.0);
  for (int o = 0; o < l.out; ++o) {
    double acc = l.b[o];
    const double *row = &l.w[static_cast<std::size_t>(o) * l.in];
    for (int i = 0; i < l.in; ++i) acc += row[i] * x[i];
    y[o] = relu ? std::max(0.0, acc) : acc;
  }
  return y;
}

std::vector<double> MlpClassifier::predict(const std::vector<double> &x) const {
  auto h1 = layer_forward(layers_[0], x, true);
  auto h2 = layer_forward(layers_[1], h1, true);
  auto logits = layer_forward(layers_[2], h2, false);
  double peak = logits[0];
  for (double v : logits) peak = std::max(peak, v);
  double z = 0.0;
  for (auto &v : logits) {
    v = std::exp(v - peak);
    z += v;
  }
  for (auto &v : logits) v /= z;
  return logits;
}

double MlpClassifier::accuracy(const std::vector<std::vector<double>> &xs,
                               const std::vector<std::vector<double>> &labels) const {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (argmax_index(predict(xs[i])) == argmax_index(labels[i])) ++correct;
  }
  return xs.empty() ? 0.0 : static_cast<double>(correct) / xs.size();
}

double MlpClassifier::train_batch(const std::vector<std::vector<double>> &xs,
                                  const std::vector<std::vector<double>> &labels,
                                  double learning_rate) {
  if (xs.empty()) throw std::invalid_argument("mlp: empty batch");
  // Accumulate gradients over the batch with plain backprop.
  struct Grads {
    std::vector<double> w, b;
  };
  std::vector<Grads> grads(layers_.size());
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    grads[li].w.assign(layers_[li].w.size(), 0.0);
    grads[li].b.assign(layers_[li].b.size(), 0.0);
  }
  double total_loss = 0.0;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const auto &x = xs[s];
    auto h1 = layer_forward(layers_[0], x, true);
    auto h2 = layer_forward(layers_[1], h1, true);
    auto p = layer_forward(layers_[2], h2, false);
    double peak = p[0];
    for (double v : p) peak = std::max(peak, v);
    double z = 0.0;
    for (auto &v : p) {
      v = std::exp(v - peak);
      z += v;
    }
    for (auto &v : p) v /= z;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (labels[s][k] != 0.0) {
        total_loss -= labels[s][k] * std::log(std::max(p[k], kLogClamp));
      }
    }
    // softmax+CE delta, then walk backwards.
    std::vector<double> d3(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) d3[k] = p[k] - labels[s][k];
    auto backward = [&](const Layer &l, Grads &g, const std::vector<double> &input,
                        const std::vector<double> &delta) {
      std::vector<double> dprev(l.in, 0.0);
      for (int o = 0; o < l.out; ++o) {
        g.b[o] += delta[o];
        const std::size_t row = static_cast<std::size_t>(o) * l.in;
        for (int i = 0; i < l.in; ++i) {
          g.w[row + i] += delta[o] * input[i];
          dprev[i] += l.w[row + i] * delta[o];
        }
      }
      return dprev;
    };
    auto d2 = backward(layers_[2], grads[2], h2, d3);
    for (std::size_t i = 0; i < d2.size(); ++i) {
      if (h2[i] <= 0.0) d2[i] = 0.0;
    }
    auto d1 = backward(layers_[1], grads[1], h1, d2);
    for (std::size_t i = 0; i < d1.size(); ++i) {
      if (h1[i] <= 0.0) d1[i] = 0.0;
    }
    backward(layers_[0], grads[0], x, d1);
  }
  const double inv = 1.0 / static_cast<double>(xs.size());
  adam_meta_.t += 1;
  const double bc1 = 1.0 - std::pow(adam_meta_.beta1, adam_meta_.t);
  const double bc2 = 1.0 - std::pow(adam_meta_.beta2, adam_meta_.t);
  auto update = [&](std::vector<double> &param, std::vector<double> &m,
                    std::vector<double> &v, const std::vector<double> &g) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double gi = g[i] * inv;
      m[i] = adam_meta_.beta1 * m[i] + (1.0 - adam_meta_.beta1) * gi;
      v[i] = adam_meta_.beta2 * v[i] + (1.0 - adam_meta_.beta2) * gi * gi;
      param[i] -=
          learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + adam_meta_.eps_hat);
    }
  };
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    update(layers_[li].w, layers_[li].mw, layers_[li].vw, grads[li].w);
    update(layers_[li].b, layers_[li].mb, layers_[li].vb, grads[li].b);
  }
  return total_loss * inv;
}

MlpResult train_classical_baseline(const std::vector<std::vector<double>> &train_x,
                                   const std::vector<std::vector<double>> &train_y,
                                   const std::vector<std::vector<double>> &val_x,
                                   const std::vector<std::vector<double>> &val_y,
                                   const MlpTrainConfig &config,
                                   std::uint64_t seed) {
  if (train_x.empty() || train_x.size() != train_y.size()) {
    throw std::invalid_argument("mlp: bad training data");
  }
  Rng init_rng(seed, rng_tag::kParamInit);
  MlpClassifier net(static_cast<int>(train_x[0].size()), config.hidden1,
                    config.hidden2, static_cast<int>(train_y[0].size()),
                    init_rng);
  Rng batch_rng(seed, rng_tag::kClientBase + 0);

  MlpResult result;
  double last_train = 0.0, last_val = 0.0;
  const std::size_t batch =
      std::min<std::size_t>(config.batch_size, train_x.size());
  for (int iter = 0; iter < config.iterations; ++iter) {
    const auto idx = draw_batch_indices(train_x.size(), batch, batch_rng);
    std::vector<std::vector<double>> bx, by;
    bx.reserve(idx.size());
    by.reserve(idx.size());
    for (auto i : idx) {
      bx.push_back(train_x[i]);
      by.push_back(train_y[i]);
    }
    const double loss = net.train_batch(bx, by, config.learning_rate);
    if (iter % config.eval_every == 0 || iter + 1 == config.iterations) {
      last_train = net.accuracy(train_x, train_y);
      last_val = val_x.empty() ? 0.0 : net.accuracy(val_x, val_y);
    }
    result.history.push_back({iter, loss, last_train, last_val, -1, 0.0});
  }
  return result;
}

}  // namespace qfl
