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

#include "qfl/dataio.hpp"

#include "qfl/train.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qfl {

namespace {

// gzread handles both gzip and plain files, which gives the auto-detect
// behavior for free.
std::vector<std::uint8_t> read_all_bytes(const std::string &path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> data;
  std::uint8_t buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) {
    data.insert(data.end(), buf, buf + n);
  }
  const bool error = n < 0;
  gzclose(f);
  if (error) throw std::runtime_error("decompression error in " + path);
  return data;
}

std::uint32_t read_be32(const std::vector<std::uint8_t> &d, std::size_t at) {
  if (at + 4 > d.size()) throw std::runtime_error("truncated IDX header");
  return (static_cast<std::uint32_t>(d[at]) << 24) |
         (static_cast<std::uint32_t>(d[at + 1]) << 16) |
         (static_cast<std::uint32_t>(d[at + 2]) << 8) |
         static_cast<std::uint32_t>(d[at + 3]);
}

}  // namespace

std::vector<RawImage> load_mnist(const std::string &images_path,
                                 const std::string &labels_path) {
  const auto img_bytes = read_all_bytes(images_path);
  const auto lab_bytes = read_all_bytes(labels_path);

  if (read_be32(img_bytes, 0) != 0x00000803u) {
    throw std::runtime_error(images_path + ": bad image magic number");
  }
  if (read_be32(lab_bytes, 0) != 0x00000801u) {
    throw std::runtime_error(labels_path + ": bad label magic number");
  }
  const std::uint32_t n_images = read_be32(img_bytes, 4);
  const std::uint32_t rows = read_be32(img_bytes, 8);
  const std::uint32_t cols = read_be32(img_bytes, 12);
  const std::uint32_t n_labels = read_be32(lab_bytes, 4);
  if (rows != 28 || cols != 28) {
    throw std::runtime_error(images_path + ": expected 28x28 images");
  }
  if (n_images != n_labels) {
    throw std::runtime_error("image/label count mismatch: " +
                             std::to_string(n_images) + " vs " +
                             std::to_string(n_labels));
  }
  if (img_bytes.size() != 16 + static_cast<std::size_t>(n_images) * 784) {
    throw std::runtime_error(images_path + ": truncated image data");
  }
  if (lab_bytes.size() != 8 + static_cast<std::size_t>(n_labels)) {
    throw std::runtime_error(labels_path + ": truncated label data");
  }

  std::vector<RawImage> out(n_images);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    std::memcpy(out[i].pixels.data(), img_bytes.data() + 16 + i * 784, 784);
    out[i].label = lab_bytes[8 + i];
  }
  return out;
}

std::vector<double> mnist_to_pixels16(const RawImage &img, DownsampleMode mode) {
  std::vector<double> out(256, 0.0);
  if (mode == DownsampleMode::kAreaResample) {
    // Target cell (r, c) covers source rows [r*28/16, (r+1)*28/16) with
    // fractional overlap weights.
    const double ratio = 28.0 / 16.0;
    for (int r = 0; r < 16; ++r) {
      for (int c = 0; c < 16; ++c) {
        const double r0 = r * ratio, r1 = (r + 1) * ratio;
        const double c0 = c * ratio, c1 = (c + 1) * ratio;
        double acc = 0.0;
        for (int sr = static_cast<int>(r0); sr < 28 && sr < r1; ++sr) {
          const double wr =
              std::min<double>(r1, sr + 1) - std::max<double>(r0, sr);
          if (wr <= 0.0) continue;
          for (int sc = static_cast<int>(c0); sc < 28 && sc < c1; ++sc) {
            const double wc =
                std::min<double>(c1, sc + 1) - std::max<double>(c0, sc);
            if (wc <= 0.0) continue;
            acc += wr * wc * img.pixels[sr * 28 + sc];
          }
        }
        out[r * 16 + c] = acc / (ratio * ratio) / 255.0;
      }
    }
  } else {
    // 2x2 average pool to 14x14, then center inside 16x16 (one-pixel rim).
    for (int r = 0; r < 14; ++r) {
      for (int c = 0; c < 14; ++c) {
        const double acc = img.pixels[(2 * r) * 28 + 2 * c] +
                           img.pixels[(2 * r) * 28 + 2 * c + 1] +
                           img.pixels[(2 * r + 1) * 28 + 2 * c] +
                           img.pixels[(2 * r + 1) * 28 + 2 * c + 1];
        out[(r + 1) * 16 + (c + 1)] = acc / 4.0 / 255.0;
      }
    }
  }
  return out;
}

FeatureVector mnist_to_features(const RawImage &img, DownsampleMode mode) {
  FeatureVector f;
  f.values = mnist_to_pixels16(img, mode);
  f.source_label = (img.label == 1) ? 0 : 1;
  double norm = 0.0;
  for (double v : f.values) norm += v * v;
  if (norm <= 0.0) {
    throw std::domain_error("all-zero image cannot be amplitude-normalized");
  }
  const double inv = 1.0 / std::sqrt(norm);
  for (auto &v : f.values) v *= inv;
  return f;
}

std::vector<WdbcRecord> load_wdbc(const std::string &csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::vector<WdbcRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    WdbcRecord rec;
    if (!std::getline(ss, rec.id, ',') || rec.id.empty()) {
      throw std::runtime_error(csv_path + ":" + std::to_string(line_no) +
                               ": missing id field");
    }
    if (!std::getline(ss, field, ',') || field.size() != 1 ||
        (field[0] != 'M' && field[0] != 'B')) {
      throw std::runtime_error(csv_path + ":" + std::to_string(line_no) +
                               ": diagnosis must be M or B");
    }
    rec.diagnosis = field[0];
    for (int i = 0; i < 30; ++i) {
      if (!std::getline(ss, field, ',')) {
        throw std::runtime_error(csv_path + ":" + std::to_string(line_no) +
                                 ": expected 30 features, got " +
                                 std::to_string(i));
      }
      try {
        rec.features[i] = std::stod(field);
      } catch (const std::exception &) {
        throw std::runtime_error(csv_path + ":" + std::to_string(line_no) +
                                 ": malformed feature value '" + field + "'");
      }
      if (!std::isfinite(rec.features[i])) {
        throw std::runtime_error(csv_path + ":" + std::to_string(line_no) +
                                 ": non-finite feature value");
      }
    }
    if (std::getline(ss, field, ',')) {
      throw std::runtime_error(csv_path + ":" + std::to_string(line_no) +
                               ": trailing fields after 30 features");
    }
    out.push_back(rec);
  }
  return out;
}

WdbcScaling fit_wdbc_scaling(const std::vector<WdbcRecord> &records,
                             const std::vector<std::size_t> &train_indices,
                             WdbcScalingMode mode) {
  if (train_indices.empty()) {
    throw std::invalid_argument("fit_wdbc_scaling: empty training split");
  }
  WdbcScaling s;
  s.mode = mode;
  s.mins.fill(std::numeric_limits<double>::infinity());
  s.maxs.fill(-std::numeric_limits<double>::infinity());
  s.means.fill(0.0);
  s.stds.fill(0.0);
  for (auto idx : train_indices) {
    const auto &rec = records.at(idx);
    for (int i = 0; i < 30; ++i) {
      s.mins[i] = std::min(s.mins[i], rec.features[i]);
      s.maxs[i] = std::max(s.maxs[i], rec.features[i]);
      s.means[i] += rec.features[i];
    }
  }
  const double n = static_cast<double>(train_indices.size());
  for (int i = 0; i < 30; ++i) s.means[i] /= n;
  for (auto idx : train_indices) {
    const auto &rec = records.at(idx);
    for (int i = 0; i < 30; ++i) {
      const double d = rec.features[i] - s.means[i];
      s.stds[i] += d * d;
    }
  }
  for (int i = 0; i < 30; ++i) s.stds[i] = std::sqrt(s.stds[i] / n);
  s.norm_bound = 0.0;
  for (auto idx : train_indices) {
    const auto &rec = records.at(idx);
    double norm_sq = 0.0;
    for (int i = 0; i < 30; ++i) {
      const double span = s.maxs[i] - s.mins[i];
      const double v = span > 0.0 ? (rec.features[i] - s.mins[i]) / span : 0.0;
      norm_sq += v * v;
    }
    s.norm_bound = std::max(s.norm_bound, std::sqrt(norm_sq));
  }
  if (s.norm_bound <= 0.0) s.norm_bound = 1.0;
  return s;
}

FeatureVector wdbc_to_features(const WdbcRecord &rec, const WdbcScaling &scaling) {
  FeatureVector f;
  f.values.assign(64, 0.0);
  f.source_label = (rec.diagnosis == 'M') ? 0 : 1;
  double norm_sq = 0.0;
  for (int i = 0; i < 30; ++i) {
    double v = 0.0;
    if (scaling.mode == WdbcScalingMode::kStandardize) {
      v = scaling.stds[i] > 0.0
              ? (rec.features[i] - scaling.means[i]) / scaling.stds[i]
              : 0.0;
    } else {
      const double span = scaling.maxs[i] - scaling.mins[i];
      v = span > 0.0 ? (rec.features[i] - scaling.mins[i]) / span : 0.0;
      v = std::clamp(v, 0.0, 1.0);
    }
    if (scaling.mode == WdbcScalingMode::kMinMaxNormSlot) v /= scaling.norm_bound;
    f.values[i] = v;
    norm_sq += v * v;
  }
  if (scaling.mode == WdbcScalingMode::kMinMaxNormSlot) {
    f.values[32] = std::sqrt(std::max(0.0, 1.0 - norm_sq));
    norm_sq += f.values[32] * f.values[32];
  }
  if (norm_sq <= 0.0) {
    throw std::domain_error("degenerate record scales to the zero vector");
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (auto &v : f.values) v *= inv;
  return f;
}

std::vector<double> one_hot(int index, int n_classes) {
  std::vector<double> v(n_classes, 0.0);
  v.at(index) = 1.0;
  return v;
}

LabeledSample sample_from_features(const FeatureVector &features, int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (features.values.size() > dim) {
    throw std::invalid_argument("features exceed the register dimension");
  }
  std::vector<cdouble> amp(dim, cdouble{0.0, 0.0});
  for (std::size_t i = 0; i < features.values.size(); ++i) {
    amp[i] = features.values[i];
  }
  LabeledSample s{Statevector(n_qubits, std::move(amp)),
                  one_hot(features.source_label)};
  return s;
}

ShardSplit make_shards(const std::vector<LabeledSample> &dataset, int n_clients,
                       int n_per_client, int validation_size, Rng &rng) {
  if (n_clients < 1 || n_per_client < 1 || validation_size < 0) {
    throw std::invalid_argument("make_shards: nonpositive sizes");
  }
  const std::size_t need =
      static_cast<std::size_t>(n_clients) * n_per_client + validation_size;
  if (need > dataset.size()) {
    throw std::invalid_argument("make_shards: dataset too small (" +
                                std::to_string(dataset.size()) + " < " +
                                std::to_string(need) + ")");
  }
  // Shuffle indices per class, then deal them round-robin so every shard
  // stays label-balanced to within one sample.
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class[argmax_index(dataset[i].label)].push_back(i);
  }
  for (auto &[cls, idx] : by_class) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
    }
  }
  std::vector<std::size_t> dealt;
  dealt.reserve(dataset.size());
  bool more = true;
  std::size_t round = 0;
  while (more) {
    more = false;
    for (auto &[cls, idx] : by_class) {
      if (round < idx.size()) {
        dealt.push_back(idx[round]);
        more = true;
      }
    }
    ++round;
  }

  ShardSplit split;
  split.shards.assign(n_clients, {});
  std::size_t cursor = 0;
  for (int c = 0; c < n_clients; ++c) {
    for (int i = 0; i < n_per_client; ++i) {
      split.shards[c].push_back(dataset[dealt[cursor++]]);
    }
  }
  for (int i = 0; i < validation_size; ++i) {
    split.validation.push_back(dataset[dealt[cursor++]]);
  }
  return split;
}

namespace {
constexpr char kCacheMagic[8] = {'q', 'f', 'l', 'f', 'e', 'a', 't', '1'};
}

void save_feature_cache(const std::string &path,
                        const std::vector<FeatureVector> &features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(kCacheMagic, 8);
  const std::uint64_t count = features.size();
  const std::uint64_t dim = features.empty() ? 0 : features[0].values.size();
  out.write(reinterpret_cast<const char *>(&count), 8);
  out.write(reinterpret_cast<const char *>(&dim), 8);
  for (const auto &f : features) {
    if (f.values.size() != dim) {
      throw std::invalid_argument("feature cache requires uniform dimensions");
    }
    const std::int32_t label = f.source_label;
    out.write(reinterpret_cast<const char *>(&label), 4);
    out.write(reinterpret_cast<const char *>(f.values.data()),
              static_cast<std::streamsize>(dim * sizeof(double)));
  }
}

std::vector<FeatureVector> load_feature_cache(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCacheMagic, 8) != 0) {
    throw std::runtime_error(path + ": not a qfl feature cache");
  }
  std::uint64_t count = 0, dim = 0;
  in.read(reinterpret_cast<char *>(&count), 8);
  in.read(reinterpret_cast<char *>(&dim), 8);
  std::vector<FeatureVector> out(count);
  for (auto &f : out) {
    std::int32_t label = 0;
    in.read(reinterpret_cast<char *>(&label), 4);
    f.source_label = label;
    f.values.resize(dim);
    in.read(reinterpret_cast<char *>(f.values.data()),
            static_cast<std::streamsize>(dim * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated feature cache");
  }
  return out;
}

}  // namespace qfl
