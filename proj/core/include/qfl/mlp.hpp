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
#include "qfl/train.hpp"

namespace qfl {

/**
 * Small dense feed-forward classifier with two ReLU hidden layers and a
 * softmax head, trained with the same cross-entropy loss and Adam
 * optimizer as the quantum model. Comparison baseline only.
 */
class MlpClassifier {
 public:
  MlpClassifier(int n_inputs, int hidden1, int hidden2, int n_classes, Rng &rng);

  std::vector<double> predict(const std::vector<double> &x) const;
  double accuracy(const std::vector<std::vector<double>> &xs,
                  const std::vector<std::vector<double>> &labels) const;

  /// One Adam step on a mini-batch; returns the mean batch loss.
  double train_batch(const std::vector<std::vector<double>> &xs,
                     const std::vector<std::vector<double>> &labels,
                     double learning_rate);

 private:
  struct Layer {
    int in = 0, out = 0;
    std::vector<double> w, b;       // row-major out x in
    std::vector<double> mw, vw, mb, vb;  // Adam moments
  };
  std::vector<double> layer_forward(const Layer &l, const std::vector<double> &x,
                                    bool relu) const;

  std::vector<Layer> layers_;
  AdamState adam_meta_;  // shared step counter / constants
};

struct MlpTrainConfig {
  int iterations = 300;
  int batch_size = 50;
  double learning_rate = 1e-3;
  int hidden1 = 64;
  int hidden2 = 32;
  int eval_every = 1;
};

struct MlpResult {
  std::vector<IterationRecord> history;
};

/// Mini-batch training on dense features; mirrors train_single's stream
/// layout so runs are reproducible from the seed.
MlpResult train_classical_baseline(const std::vector<std::vector<double>> &train_x,
                                   const std::vector<std::vector<double>> &train_y,
                                   const std::vector<std::vector<double>> &val_x,
                                   const std::vector<std::vector<double>> &val_y,
                                   const MlpTrainConfig &config,
                                   std::uint64_t seed);

}  // namespace qfl
