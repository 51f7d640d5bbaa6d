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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qfl/classifier.hpp"
#include "qfl/encoding.hpp"
#include "qfl/rng.hpp"

namespace qfl {

struct RawImage {
  std::array<std::uint8_t, 28 * 28> pixels;
  int label = 0;
};

/**
 * Reads an IDX image/label pair (plain or gzip, auto-detected). Enforces
 * the magic numbers (0x803 images, 0x801 labels), 28x28 geometry and
 * matching counts; truncated files fail without producing partial data.
 */
std::vector<RawImage> load_mnist(const std::string &images_path,
                                 const std::string &labels_path);

enum class DownsampleMode {
  kAreaResample,  // fractional-overlap area average 28x28 -> 16x16
  kPoolPad,       // 2x2 average pool to 14x14, zero-pad to 16x16 centered
};

/// 16x16 grayscale in [0,1], row-major.
std::vector<double> mnist_to_pixels16(const RawImage &img,
                                      DownsampleMode mode = DownsampleMode::kAreaResample);

/// Downsampled, scaled to [0,1] and L2-normalized; digit "1" maps to class
/// 0 and "9" to class 1. Rejects all-zero images (nothing to normalize).
FeatureVector mnist_to_features(const RawImage &img,
                                DownsampleMode mode = DownsampleMode::kAreaResample);

struct WdbcRecord {
  std::string id;
  char diagnosis = 'B';  // 'M' or 'B'
  std::array<double, 30> features;
};

/// Parses the UCI wdbc.data layout (id, diagnosis, 30 reals per row);
/// malformed rows are reported with their line number.
std::vector<WdbcRecord> load_wdbc(const std::string &csv_path);

enum class WdbcScalingMode {
  // Per-feature z-score from training statistics. The class signal in
  // this dataset sits mostly in the overall feature magnitude; zero-mean
  // features move it into the vector direction, which survives the state
  // normalization. Default for the experiments.
  kStandardize,
  // Per-feature min-max to [0,1] (values outside the fitted range clamp).
  kMinMax,
  // Min-max scaling divided by the largest training-vector norm, with the
  // residual sqrt(1 - |v|^2/B^2) stored in slot 32 (the first basis state
  // of the readout qubit's |1> half) so the scaled magnitude survives
  // normalization and shows up in the readout marginal.
  kMinMaxNormSlot,
};

struct WdbcScaling {
  std::array<double, 30> mins;
  std::array<double, 30> maxs;
  std::array<double, 30> means;
  std::array<double, 30> stds;
  double norm_bound = 1.0;  // largest min-max-scaled training norm
  WdbcScalingMode mode = WdbcScalingMode::kStandardize;
};

/// Per-feature statistics over the given record indices (training split).
WdbcScaling fit_wdbc_scaling(const std::vector<WdbcRecord> &records,
                             const std::vector<std::size_t> &train_indices,
                             WdbcScalingMode mode = WdbcScalingMode::kStandardize);

/**
 * Scales per the fitted statistics, zero-pads 30 -> 64 and L2-normalizes.
 * Records that scale to the zero vector (degenerate) are rejected. M maps
 * to class 0, B to class 1.
 */
FeatureVector wdbc_to_features(const WdbcRecord &rec, const WdbcScaling &scaling);

/// One-hot encoding over two classes.
std::vector<double> one_hot(int index, int n_classes = 2);

/// Feature vector as an amplitude-encoded register state plus label.
LabeledSample sample_from_features(const FeatureVector &features, int n_qubits);

struct ShardSplit {
  std::vector<std::vector<LabeledSample>> shards;
  std::vector<LabeledSample> validation;
};

/**
 * Disjoint random shards, label-balanced within each shard to +-1 sample,
 * plus a validation pool disjoint from all shards. Deterministic for a
 * given rng state.
 */
ShardSplit make_shards(const std::vector<LabeledSample> &dataset, int n_clients,
                       int n_per_client, int validation_size, Rng &rng);

/// Binary feature cache (version tag, counts, dims, little-endian doubles).
void save_feature_cache(const std::string &path,
                        const std::vector<FeatureVector> &features);
std::vector<FeatureVector> load_feature_cache(const std::string &path);

}  // namespace qfl
