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

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>

#include "qfl/attack.hpp"
#include "qfl/dataio.hpp"
#include "qfl/federated.hpp"
#include "qfl/mlp.hpp"
#include "qfl/serialize.hpp"
#include "qfl/stats.hpp"
#include "qfl/train.hpp"
#include "qfl/ubqc.hpp"

namespace fs = std::filesystem;
using namespace qfl;

namespace {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct Config {
  std::map<std::string, std::string> kv;

  bool has(const std::string &key) const { return kv.count(key) != 0; }

  std::string get(const std::string &key, const std::string &fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      kv[key] = fallback;  // resolved defaults land in the manifest
      return fallback;
    }
    return it->second;
  }

  double get_double(const std::string &key, double fallback) {
    const std::string v = get(key, format_default(fallback));
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    try {
      return std::stod(v);
    } catch (const std::exception &) {
      throw std::invalid_argument("config key '" + key + "' is not a number: " + v);
    }
  }

  long get_int(const std::string &key, long fallback) {
    const std::string v = get(key, std::to_string(fallback));
    try {
      return std::stol(v);
    } catch (const std::exception &) {
      throw std::invalid_argument("config key '" + key + "' is not an integer: " + v);
    }
  }

  std::vector<double> get_double_list(const std::string &key,
                                      const std::string &fallback) {
    const std::string v = get(key, fallback);
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "inf" || item == "+inf") {
        out.push_back(std::numeric_limits<double>::infinity());
      } else {
        out.push_back(std::stod(item));
      }
    }
    if (out.empty()) throw std::invalid_argument("config key '" + key + "' is empty");
    return out;
  }

 private:
  static std::string format_default(double v) {
    if (std::isinf(v)) return "inf";
    std::ostringstream os;
    os << v;
    return os.str();
  }
};

std::string trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Config load_config(const std::string &path) {
  Config cfg;
  if (path.empty()) return cfg;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    cfg.kv = read_manifest(path);
    cfg.kv.erase("__experiment");
    return cfg;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected key=value");
    }
    cfg.kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

const std::set<std::string> kCommonKeys = {
    "seed",        "backend",      "gradient_method", "eval_every",
    "dataset",     "classes",      "circuit_depth",   "num_qubits",
    "learning_rate", "num_iterations", "optimizer",   "encoding",
    "encoder_depth", "downsample", "train_size",      "val_size",
    "mnist_images", "mnist_labels", "mnist_val_images", "mnist_val_labels",
    "wdbc_path",   "input_noise",  "gradient_noise",  "rotation_layout",
    "param_init",  "wdbc_scaling",
};

const std::map<std::string, std::set<std::string>> kExperimentKeys = {
    {"train-single", {"batch_size"}},
    {"robustness-sweep", {"batch_size", "sigma_sweep", "sweep_seeds"}},
    {"train-federated",
     {"gradient_bound", "num_clients", "training_set_per_client",
      "batch_size_per_client", "mu", "per_client_mu", "noise_kind",
      "clip_mode"}},
    {"dp-sweep",
     {"gradient_bound", "num_clients", "training_set_per_client",
      "batch_size_per_client", "mu_sweep", "sweep_seeds", "noise_kind",
      "clip_mode"}},
    {"attack",
     {"batch_size", "attack_iterations", "attack_learning_rate",
      "attack_method", "fd_step", "attack_digit", "attack_sample_index",
      "attack_mu", "attack_clip", "gradient_bound", "attack_seeds"}},
    {"ubqc-selftest",
     {"sessions", "sabotage", "discrete_theta", "oracle_circuits"}},
};

void validate_keys(const Config &cfg, const std::string &experiment) {
  const auto &extra = kExperimentKeys.at(experiment);
  for (const auto &[key, value] : cfg.kv) {
    if (kCommonKeys.count(key) == 0 && extra.count(key) == 0) {
      throw std::invalid_argument("unknown config key for " + experiment + ": " +
                                  key);
    }
    if (value.empty()) {
      throw std::invalid_argument("config key '" + key + "' has no value");
    }
  }
}

Backend parse_backend(const std::string &name) {
  if (name == "direct") return Backend::kDirect;
  if (name == "mbqc") return Backend::kMbqc;
  if (name == "ubqc") return Backend::kUbqc;
  throw std::invalid_argument("backend must be direct|mbqc|ubqc, got " + name);
}

GradientMethod parse_gradient_method(const std::string &name) {
  if (name == "parameter_shift") return GradientMethod::kParameterShift;
  if (name == "adjoint") return GradientMethod::kAdjoint;
  throw std::invalid_argument("gradient_method must be parameter_shift|adjoint");
}

// Exclusive per-directory lock, released on destruction.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path &dir) : path_(dir / ".qfl.lock") {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (fs::exists(path_)) {
      throw std::runtime_error("output directory is locked by another run: " +
                               path_.string());
    }
    std::ofstream lock(path_);
    lock << "locked\n";
  }
  ~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }

 private:
  fs::path path_;
};

// ---------------------------------------------------------------------------
// Dataset pipelines
// ---------------------------------------------------------------------------

struct Dataset {
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> validation;
  // Rotation-encoding / baseline views (per-sample dense real features).
  std::vector<std::vector<double>> train_features;
  std::vector<std::vector<double>> val_features;
  std::vector<std::vector<double>> train_labels;
  std::vector<std::vector<double>> val_labels;
  int n_qubits = 0;
};

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng &rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
  }
  return idx;
}

Statevector encoder_output_state(const ClassifierTemplate &encoder,
                                 const std::vector<double> &angles) {
  ModelParams p;
  p.theta = rotation_encode(angles, encoder.n_qubits, encoder.depth,
                            static_cast<int>(encoder.rotation_layout.size()));
  Statevector s(encoder.n_qubits);
  run_circuit_in_place(s, realize_classifier(encoder, p.theta));
  return s;
}

Dataset load_dataset(Config &cfg, std::uint64_t seed) {
  Dataset out;
  const std::string dataset = cfg.get("dataset", "mnist");
  const std::string encoding = cfg.get("encoding", "amplitude");
  Rng split_rng(seed, rng_tag::kDataSplit);

  if (dataset == "mnist") {
    out.n_qubits = static_cast<int>(cfg.get_int("num_qubits", 8));
    if (out.n_qubits != 8) {
      throw std::invalid_argument("mnist amplitude encoding uses 8 qubits");
    }
    const auto mode = cfg.get("downsample", "area") == "area"
                          ? DownsampleMode::kAreaResample
                          : DownsampleMode::kPoolPad;
    const auto train_raw = load_mnist(cfg.get("mnist_images", "data/mnist19-train-images-idx3-ubyte.gz"),
                                      cfg.get("mnist_labels", "data/mnist19-train-labels-idx1-ubyte.gz"));
    const auto val_raw = load_mnist(cfg.get("mnist_val_images", "data/mnist19-test-images-idx3-ubyte.gz"),
                                    cfg.get("mnist_val_labels", "data/mnist19-test-labels-idx1-ubyte.gz"));
    const long train_size = cfg.get_int("train_size", 1000);
    const long val_size = cfg.get_int("val_size", 500);
    if (train_size < 1 || static_cast<std::size_t>(train_size) > train_raw.size()) {
      throw std::invalid_argument("train_size out of range");
    }
    if (val_size < 1 || static_cast<std::size_t>(val_size) > val_raw.size()) {
      throw std::invalid_argument("val_size out of range");
    }
    const auto train_idx = shuffled_indices(train_raw.size(), split_rng);
    const auto val_idx = shuffled_indices(val_raw.size(), split_rng);

    const bool rotation = encoding == "rotation";
    ClassifierTemplate encoder;
    if (rotation) {
      encoder = build_classifier(8, static_cast<int>(cfg.get_int("encoder_depth", 11)),
                                 {0}, rotation_layout_from_tag("zxz"));
    }
    auto emit = [&](const RawImage &img, std::vector<LabeledSample> &samples,
                    std::vector<std::vector<double>> &feats,
                    std::vector<std::vector<double>> &labels) {
      const auto pixels = mnist_to_pixels16(img, mode);
      const int cls = (img.label == 1) ? 0 : 1;
      if (rotation) {
        const auto angles = scale_to_angle_range(pixels, 0.0, 1.0);
        Statevector state = encoder_output_state(encoder, angles);
        samples.push_back({std::move(state), one_hot(cls)});
        // Baseline view: output probabilities of the encoder circuit.
        const auto &amp = samples.back().input.amplitudes();
        std::vector<double> probs(amp.size());
        for (std::size_t i = 0; i < amp.size(); ++i) probs[i] = std::norm(amp[i]);
        feats.push_back(std::move(probs));
        labels.push_back(one_hot(cls));
      } else {
        FeatureVector f = mnist_to_features(img, mode);
        f.source_label = cls;
        samples.push_back(sample_from_features(f, 8));
        feats.push_back(pixels);
        labels.push_back(one_hot(cls));
      }
    };
    for (long i = 0; i < train_size; ++i) {
      emit(train_raw[train_idx[i]], out.train, out.train_features,
           out.train_labels);
    }
    for (long i = 0; i < val_size; ++i) {
      emit(val_raw[val_idx[i]], out.validation, out.val_features, out.val_labels);
    }
  } else if (dataset == "wdbc") {
    out.n_qubits = static_cast<int>(cfg.get_int("num_qubits", 6));
    if (out.n_qubits != 6) {
      throw std::invalid_argument("wdbc amplitude encoding uses 6 qubits");
    }
    const auto records = load_wdbc(cfg.get("wdbc_path", "data/wdbc.data"));
    const long train_size = cfg.get_int("train_size", 400);
    const long val_size = cfg.get_int("val_size", 150);
    if (train_size + val_size > static_cast<long>(records.size())) {
      throw std::invalid_argument("train_size + val_size exceeds the dataset");
    }
    const auto idx = shuffled_indices(records.size(), split_rng);
    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + train_size);
    const std::string mode_name = cfg.get("wdbc_scaling", "minmax_norm");
    WdbcScalingMode scaling_mode;
    if (mode_name == "standardize") {
      scaling_mode = WdbcScalingMode::kStandardize;
    } else if (mode_name == "minmax") {
      scaling_mode = WdbcScalingMode::kMinMax;
    } else if (mode_name == "minmax_norm") {
      scaling_mode = WdbcScalingMode::kMinMaxNormSlot;
    } else {
      throw std::invalid_argument("wdbc_scaling must be standardize|minmax|minmax_norm");
    }
    const auto scaling = fit_wdbc_scaling(records, train_idx, scaling_mode);
    auto emit = [&](const WdbcRecord &rec, std::vector<LabeledSample> &samples) {
      const auto f = wdbc_to_features(rec, scaling);
      samples.push_back(sample_from_features(f, 6));
    };
    for (long i = 0; i < train_size; ++i) emit(records[idx[i]], out.train);
    for (long i = 0; i < val_size; ++i) {
      emit(records[idx[train_size + i]], out.validation);
    }
  } else {
    throw std::invalid_argument("dataset must be mnist|wdbc");
  }
  return out;
}

ClassifierTemplate template_from_config(Config &cfg, int n_qubits) {
  const int depth = static_cast<int>(cfg.get_int("circuit_depth", 30));
  const auto layout = rotation_layout_from_tag(cfg.get("rotation_layout", "zx"));
  if (cfg.get_int("classes", 2) != 2) {
    throw std::invalid_argument("only two-class experiments are configured");
  }
  if (cfg.get("optimizer", "Adam") != "Adam") {
    throw std::invalid_argument("optimizer must be Adam");
  }
  return build_classifier(n_qubits, depth, {0}, layout);
}

TrainConfig train_config_from(Config &cfg) {
  TrainConfig tc;
  tc.iterations = static_cast<int>(cfg.get_int("num_iterations", 300));
  tc.batch_size = static_cast<int>(cfg.get_int("batch_size", 50));
  tc.learning_rate = cfg.get_double("learning_rate", 1e-3);
  tc.gradient_method = parse_gradient_method(cfg.get("gradient_method", "adjoint"));
  tc.backend = parse_backend(cfg.get("backend", "direct"));
  tc.input_noise_sigma = cfg.get_double("input_noise", 0.0);
  tc.gradient_noise_scale = cfg.get_double("gradient_noise", 0.0);
  tc.eval_every = static_cast<int>(cfg.get_int("eval_every", 1));
  const std::string init_mode = cfg.get("param_init", "uniform");
  if (init_mode == "small") {
    tc.param_init = ParamInit::kSmall;
  } else if (init_mode != "uniform") {
    throw std::invalid_argument("param_init must be uniform|small");
  }
  if (tc.iterations < 1 || tc.batch_size < 1 || tc.eval_every < 1 ||
      tc.learning_rate < 0.0 || tc.input_noise_sigma < 0.0 ||
      tc.gradient_noise_scale < 0.0) {
    throw std::invalid_argument("training configuration out of range");
  }
  return tc;
}

void write_run_outputs(const fs::path &out_dir, const std::string &experiment,
                       Config &cfg, const std::vector<IterationRecord> &history,
                       bool federated_fields, double total_ms) {
  write_manifest((out_dir / "manifest.json").string(), cfg.kv, experiment);
  write_history_jsonl((out_dir / "history.jsonl").string(), history,
                      federated_fields);
  write_timings((out_dir / "timings.json").string(), total_ms);
}

void save_model_from(const fs::path &out_dir, Config &cfg,
                     const ClassifierTemplate &tpl, const ModelParams &params) {
  ModelFile model;
  model.n_qubits = tpl.n_qubits;
  model.depth = tpl.depth;
  model.layout = rotation_layout_tag(tpl.rotation_layout);
  model.readout_qubits = tpl.readout_qubits;
  model.theta = params.theta;
  save_model((out_dir / "model.bin").string(), model);
  (void)cfg;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_train_single(Config cfg, const fs::path &out_dir) {
  validate_keys(cfg, "train-single");
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const auto t0 = std::chrono::steady_clock::now();
  auto data = load_dataset(cfg, seed);
  const auto tpl = template_from_config(cfg, data.n_qubits);
  const auto tc = train_config_from(cfg);
  DirectoryLock lock(out_dir);
  const auto res = train_single(data.train, data.validation, tpl, tc, seed);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  write_run_outputs(out_dir, "train-single", cfg, res.history, false, ms);
  save_model_from(out_dir, cfg, tpl, res.params);
  std::cout << "final train_acc=" << res.history.back().train_acc
            << " val_acc=" << res.history.back().val_acc << "\n";
  return 0;
}

int cmd_train_federated(Config cfg, const fs::path &out_dir) {
  validate_keys(cfg, "train-federated");
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const auto t0 = std::chrono::steady_clock::now();
  auto data = load_dataset(cfg, seed);
  const auto tpl = template_from_config(cfg, data.n_qubits);

  FederationConfig fc;
  fc.n_clients = static_cast<int>(cfg.get_int("num_clients", 10));
  fc.samples_per_client =
      static_cast<int>(cfg.get_int("training_set_per_client", 200));
  fc.batch_size = static_cast<int>(cfg.get_int("batch_size_per_client", 50));
  fc.iterations = static_cast<int>(cfg.get_int("num_iterations", 1500));
  fc.learning_rate = cfg.get_double("learning_rate", 1e-3);
  fc.clip_bound = cfg.get_double("gradient_bound", 0.01);
  fc.noise_mu = cfg.get_double("mu", std::numeric_limits<double>::infinity());
  fc.gradient_method = parse_gradient_method(cfg.get("gradient_method", "adjoint"));
  fc.backend = parse_backend(cfg.get("backend", "direct"));
  fc.input_noise_sigma = cfg.get_double("input_noise", 0.0);
  fc.gradient_noise_scale = cfg.get_double("gradient_noise", 0.0);
  fc.eval_every = static_cast<int>(cfg.get_int("eval_every", 1));
  fc.noise_kind = cfg.get("noise_kind", "gaussian") == "laplace"
                      ? DpNoiseKind::kLaplace
                      : DpNoiseKind::kGaussian;
  fc.clip_mode =
      cfg.get("clip_mode", "element") == "l2" ? ClipMode::kL2 : ClipMode::kPerElement;
  if (cfg.has("per_client_mu")) {
    fc.per_client_mu = cfg.get_double_list("per_client_mu", "");
  }
  if (fc.n_clients < 1 || fc.iterations < 1 || fc.batch_size < 1 ||
      fc.clip_bound <= 0.0 || !(fc.noise_mu > 0.0)) {
    throw std::invalid_argument("federation configuration out of range");
  }

  // Shards come from the training pool; validation is the held-out set.
  Rng shard_rng(seed, rng_tag::kDataSplit + 100);
  const auto split =
      make_shards(data.train, fc.n_clients, fc.samples_per_client, 0, shard_rng);
  std::vector<ClientShard> shards;
  for (int c = 0; c < fc.n_clients; ++c) {
    shards.emplace_back(c, split.shards[c], seed);
  }
  DirectoryLock lock(out_dir);
  const auto res = federated_train(shards, tpl, fc, data.validation, seed);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  write_run_outputs(out_dir, "train-federated", cfg, res.history, true, ms);
  save_model_from(out_dir, cfg, tpl, res.params);
  std::cout << "final val_acc=" << res.history.back().val_acc << "\n";
  return 0;
}

int cmd_attack(Config cfg, const fs::path &out_dir, const std::string &model_path) {
  validate_keys(cfg, "attack");
  if (!fs::exists(model_path)) {
    throw std::runtime_error("model file not found: " + model_path);
  }
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const auto model = load_model(model_path);
  const auto tpl = template_from_model(model);
  ModelParams params;
  params.theta = model.theta;

  auto data = load_dataset(cfg, seed);
  const int digit = static_cast<int>(cfg.get_int("attack_digit", 1));
  if (digit != 1 && digit != 9) {
    throw std::invalid_argument("attack_digit must be 1 or 9");
  }
  const int want_class = digit == 1 ? 0 : 1;
  long index = cfg.get_int("attack_sample_index", -1);
  if (index < 0) {
    for (std::size_t i = 0; i < data.train.size(); ++i) {
      if (argmax_index(data.train[i].label) == static_cast<std::size_t>(want_class)) {
        index = static_cast<long>(i);
        break;
      }
    }
  }
  if (index < 0 || static_cast<std::size_t>(index) >= data.train.size()) {
    throw std::invalid_argument("no sample matches the attack selector");
  }
  const LabeledSample &truth = data.train[index];

  // Target gradient at the published model, optionally clipped + noised.
  const auto raw = sample_gradient(tpl, params, truth.input, truth.label,
                                   GradientMethod::kAdjoint);
  const double mu = cfg.get_double("attack_mu", std::numeric_limits<double>::infinity());
  const bool clip = cfg.get_int("attack_clip", 0) != 0;
  GradientVector target = raw;
  Rng noise_rng(seed, rng_tag::kGradientNoise);
  if (clip) {
    const double bound = cfg.get_double("gradient_bound", 0.01);
    target = clip_gradient(target, bound);
    target = add_dp_noise(target, bound, mu, noise_rng);
  }

  AttackConfig ac;
  ac.iterations = static_cast<int>(cfg.get_int("attack_iterations", 300));
  ac.learning_rate = cfg.get_double("attack_learning_rate", 0.05);
  ac.candidate_labels = {one_hot(0), one_hot(1)};
  ac.input_grad_method = cfg.get("attack_method", "fd") == "analytic"
                             ? InputGradMethod::kAnalytic
                             : InputGradMethod::kCentralFiniteDifference;
  ac.fd_step = cfg.get_double("fd_step", 1e-4);

  DirectoryLock lock(out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed, rng_tag::kAttack);
  auto result = run_attack(target, tpl, params, ac, rng);
  result.fidelity_vs_truth = fidelity(result.recovered_state, truth.input);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

  nlohmann::json j;
  j["final_loss"] = result.final_loss;
  j["recovered_label"] = result.recovered_label;
  j["true_label"] = truth.label;
  j["fidelity_vs_truth"] = result.fidelity_vs_truth;
  j["label_identified"] = (result.recovered_label == truth.label);
  for (const auto &[label_idx, loss] : result.per_label_losses) {
    j["per_label_losses"][std::to_string(label_idx)] = loss;
  }
  j["attack_digit"] = digit;
  j["sample_index"] = index;
  std::ofstream(out_dir / "attack_result.json") << j.dump(2) << "\n";
  write_manifest((out_dir / "manifest.json").string(), cfg.kv, "attack");
  write_timings((out_dir / "timings.json").string(), ms);

  const int side = 1 << (tpl.n_qubits / 2);
  write_amplitude_pgm((out_dir / "recovered.pgm").string(),
                      result.recovered_state.amplitudes(), side, side);
  write_amplitude_pgm((out_dir / "truth.pgm").string(), truth.input.amplitudes(),
                      side, side);
  std::cout << "fidelity=" << result.fidelity_vs_truth
            << " label_identified=" << (result.recovered_label == truth.label)
            << "\n";
  return 0;
}

int cmd_ubqc_selftest(Config cfg, const fs::path &out_dir) {
  validate_keys(cfg, "ubqc-selftest");
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  const int sessions = static_cast<int>(cfg.get_int("sessions", 1000));
  const bool sabotage_mode = cfg.get_int("sabotage", 0) != 0;
  const bool discrete = cfg.get_int("discrete_theta", 0) != 0;
  const int n_oracle = static_cast<int>(cfg.get_int("oracle_circuits", 8));
  DirectoryLock lock(out_dir);
  bool all_ok = true;

  // Equivalence oracle: compiled patterns against the direct backend.
  Rng rng(seed);
  int oracle_pass = 0;
  for (int trial = 0; trial < n_oracle; ++trial) {
    Circuit c(2);
    for (int g = 0; g < 3; ++g) {
      const int q = static_cast<int>(rng.uniform_int(2));
      switch (rng.uniform_int(4)) {
        case 0: c.add(Gate::rx(q, rng.uniform_angle())); break;
        case 1: c.add(Gate::rz(q, rng.uniform_angle())); break;
        case 2: c.add(Gate::h(q)); break;
        default: c.add(rng.bit() ? Gate::cnot(0, 1) : Gate::cnot(1, 0)); break;
      }
    }
    const auto pattern = compile_circuit(c);
    if (pattern.measured_count() > 24) continue;
    PatternEvalOptions opt;
    const auto got = evaluate_pattern(pattern, Circuit(), opt);
    auto direct = run_circuit(Statevector(2), c);
    const auto want = direct.marginal_distribution({0, 1});
    if (total_variation(got, want) < 1e-9) ++oracle_pass;
    else all_ok = false;
  }
  std::cout << "equivalence-oracle pass (" << oracle_pass << " circuits)\n";

  // Blindness audit across two distinct computations.
  Circuit f(2);
  f.add(Gate::rz(0, 0.7)).add(Gate::rx(0, 2.1)).add(Gate::rx(1, 1.2));
  Circuit g(2);
  g.add(Gate::rz(0, 2.9)).add(Gate::rx(0, 0.4)).add(Gate::rz(1, 1.9));
  ClientOptions copt;
  copt.discrete_theta = discrete;
  copt.theta_zero_sabotage = sabotage_mode;
  const auto group_f = run_audit_sessions(f, sessions, seed + 1, copt);
  const auto group_g = run_audit_sessions(g, sessions, seed + 2, copt);
  AuditOptions aopt;
  aopt.discrete_theta = discrete;
  const auto report = blindness_audit(group_f, group_g, aopt);
  std::cout << "blindness-audit " << (report.pass ? "pass" : "FAIL")
            << " (tests=" << report.tests_run
            << ", rejections=" << report.rejections
            << ", min_p=" << report.min_p_value << ")\n";
  if (sabotage_mode) {
    // The negative control must be rejected.
    if (report.pass) {
      std::cout << "sabotage run unexpectedly passed the audit\n";
      all_ok = false;
    } else {
      std::cout << "sabotage correctly rejected\n";
    }
  } else if (!report.pass) {
    all_ok = false;
  }

  // Persist one transcript for inspection.
  std::ofstream(out_dir / "sample_transcript.bin", std::ios::binary)
      << serialize_transcript(group_f.front());
  write_manifest((out_dir / "manifest.json").string(), cfg.kv, "ubqc-selftest");
  std::cout << (all_ok ? "selftest pass" : "selftest FAIL") << "\n";
  return all_ok ? 0 : 1;
}

int cmd_robustness_sweep(Config cfg, const fs::path &out_dir) {
  validate_keys(cfg, "robustness-sweep");
  const auto sigmas = cfg.get_double_list("sigma_sweep", "0,0.02,0.05,0.1");
  const int n_seeds = static_cast<int>(cfg.get_int("sweep_seeds", 1));
  const auto base_seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  cfg.get_double("gradient_noise", 0.001);  // pin the sweep's default
  DirectoryLock lock(out_dir);
  for (double sigma : sigmas) {
    for (int s = 0; s < n_seeds; ++s) {
      Config point = cfg;
      point.kv.erase("sigma_sweep");
      point.kv.erase("sweep_seeds");
      point.kv["input_noise"] = std::to_string(sigma);
      point.kv["seed"] = std::to_string(base_seed + s);
      std::ostringstream sub;
      sub << "sigma_" << sigma << "/seed_" << (base_seed + s);
      const fs::path point_dir = out_dir / sub.str();
      fs::create_directories(point_dir);
      cmd_train_single(point, point_dir);
    }
  }
  write_manifest((out_dir / "manifest.json").string(), cfg.kv, "robustness-sweep");
  return 0;
}

int cmd_dp_sweep(Config cfg, const fs::path &out_dir) {
  validate_keys(cfg, "dp-sweep");
  const auto mus = cfg.get_double_list("mu_sweep", "inf,1,0.1,0.05");
  const int n_seeds = static_cast<int>(cfg.get_int("sweep_seeds", 1));
  const auto base_seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  DirectoryLock lock(out_dir);
  for (double mu : mus) {
    for (int s = 0; s < n_seeds; ++s) {
      Config point = cfg;
      point.kv.erase("mu_sweep");
      point.kv.erase("sweep_seeds");
      point.kv["mu"] = std::isinf(mu) ? "inf" : std::to_string(mu);
      point.kv["seed"] = std::to_string(base_seed + s);
      std::ostringstream sub;
      sub << "mu_" << (std::isinf(mu) ? std::string("inf") : std::to_string(mu))
          << "/seed_" << (base_seed + s);
      const fs::path point_dir = out_dir / sub.str();
      fs::create_directories(point_dir);
      cmd_train_federated(point, point_dir);
    }
  }
  write_manifest((out_dir / "manifest.json").string(), cfg.kv, "dp-sweep");
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Delegated variational-classifier training, DP federation and "
               "gradient-inversion experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", model_path, backend_flag;
  long seed_flag = -1;
  app.add_option("--config", config_path, "key=value config or manifest.json");
  app.add_option("--seed", seed_flag, "seed override");
  app.add_option("--backend", backend_flag, "direct|mbqc|ubqc override");
  app.add_option("--out", out_dir, "output directory");

  auto *train_single_cmd = app.add_subcommand("train-single");
  auto *train_fed_cmd = app.add_subcommand("train-federated");
  auto *attack_cmd = app.add_subcommand("attack");
  attack_cmd->add_option("--model", model_path, "trained model file")->required();
  auto *selftest_cmd = app.add_subcommand("ubqc-selftest");
  auto *robust_cmd = app.add_subcommand("robustness-sweep");
  auto *dp_cmd = app.add_subcommand("dp-sweep");
  for (auto *sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg = load_config(config_path);
    if (seed_flag >= 0) cfg.kv["seed"] = std::to_string(seed_flag);
    if (!backend_flag.empty()) cfg.kv["backend"] = backend_flag;
    const fs::path out(out_dir);
    fs::create_directories(out);

    if (train_single_cmd->parsed()) return cmd_train_single(cfg, out);
    if (train_fed_cmd->parsed()) return cmd_train_federated(cfg, out);
    if (attack_cmd->parsed()) return cmd_attack(cfg, out, model_path);
    if (selftest_cmd->parsed()) return cmd_ubqc_selftest(cfg, out);
    if (robust_cmd->parsed()) return cmd_robustness_sweep(cfg, out);
    if (dp_cmd->parsed()) return cmd_dp_sweep(cfg, out);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
