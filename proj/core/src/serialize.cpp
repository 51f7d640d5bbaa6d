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

#include "qfl/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qfl {

std::vector<GateKind> rotation_layout_from_tag(const std::string &tag) {
  if (tag == "zx") return {GateKind::RZ, GateKind::RX};
  if (tag == "zxz") return {GateKind::RZ, GateKind::RX, GateKind::RZ};
  throw std::invalid_argument("unknown rotation layout tag: " + tag);
}

std::string rotation_layout_tag(const std::vector<GateKind> &layout) {
  if (layout == std::vector<GateKind>{GateKind::RZ, GateKind::RX}) return "zx";
  if (layout == std::vector<GateKind>{GateKind::RZ, GateKind::RX, GateKind::RZ}) {
    return "zxz";
  }
  throw std::invalid_argument("rotation layout has no tag");
}

ClassifierTemplate template_from_model(const ModelFile &model) {
  return build_classifier(model.n_qubits, model.depth, model.readout_qubits,
                          rotation_layout_from_tag(model.layout));
}

void save_model(const std::string &path, const ModelFile &model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "qfl-model v1 n_qubits=" << model.n_qubits << " depth=" << model.depth
      << " layout=" << model.layout << " readout=";
  for (std::size_t i = 0; i < model.readout_qubits.size(); ++i) {
    if (i) out << ",";
    out << model.readout_qubits[i];
  }
  out << " params=" << model.theta.size() << "\n";
  out.write(reinterpret_cast<const char *>(model.theta.data()),
            static_cast<std::streamsize>(model.theta.size() * sizeof(double)));
}

ModelFile load_model(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::stringstream ss(header);
  std::string token;
  ss >> token;
  if (token != "qfl-model") throw std::runtime_error(path + ": not a model file");
  ss >> token;
  if (token != "v1") throw std::runtime_error(path + ": unsupported version");
  ModelFile model;
  std::size_t n_params = 0;
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "n_qubits") {
      model.n_qubits = std::stoi(value);
    } else if (key == "depth") {
      model.depth = std::stoi(value);
    } else if (key == "layout") {
      model.layout = value;
    } else if (key == "params") {
      n_params = std::stoul(value);
    } else if (key == "readout") {
      std::stringstream rs(value);
      std::string item;
      while (std::getline(rs, item, ',')) {
        model.readout_qubits.push_back(std::stoi(item));
      }
    }
  }
  model.theta.resize(n_params);
  in.read(reinterpret_cast<char *>(model.theta.data()),
          static_cast<std::streamsize>(n_params * sizeof(double)));
  if (!in) throw std::runtime_error(path + ": truncated parameter vector");
  return model;
}

namespace {
// Shortest decimal that round-trips the exact double.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}
}  // namespace

void write_history_jsonl(const std::string &path,
                         const std::vector<IterationRecord> &history,
                         bool federated_fields) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto &r : history) {
    out << "{\"iteration\":" << r.iteration << ",\"loss\":" << format_double(r.loss)
        << ",\"train_acc\":" << format_double(r.train_acc)
        << ",\"val_acc\":" << format_double(r.val_acc);
    if (federated_fields) {
      out << ",\"client_id\":" << r.client_id
          << ",\"mu_used\":" << format_double(r.mu_used);
    }
    out << "}\n";
  }
}

void write_timings(const std::string &path, double total_ms) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "{\"total_ms\":" << format_double(total_ms) << "}\n";
}

void write_manifest(const std::string &path,
                    const std::map<std::string, std::string> &config,
                    const std::string &experiment) {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["version"] = kVersionTag;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto &[k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

std::map<std::string, std::string> read_manifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  std::map<std::string, std::string> config;
  for (const auto &[k, v] : j.at("config").items()) {
    config[k] = v.get<std::string>();
  }
  config["__experiment"] = j.at("experiment").get<std::string>();
  return config;
}

}  // namespace qfl
