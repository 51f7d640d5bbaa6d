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

#include <map>
#include <string>
#include <vector>

#include "qfl/classifier.hpp"
#include "qfl/train.hpp"

namespace qfl {

inline constexpr const char *kVersionTag = "qfl-0.1.0";

struct ModelFile {
  int n_qubits = 0;
  int depth = 0;
  std::string layout = "zx";  // rotation layout tag: "zx" or "zxz"
  std::vector<int> readout_qubits;
  std::vector<double> theta;
};

/// Text header line followed by the flat little-endian f64 vector.
void save_model(const std::string &path, const ModelFile &model);
ModelFile load_model(const std::string &path);

ClassifierTemplate template_from_model(const ModelFile &model);
std::vector<GateKind> rotation_layout_from_tag(const std::string &tag);
std::string rotation_layout_tag(const std::vector<GateKind> &layout);

/**
 * History records as JSON lines with a fixed key order, one record per
 * iteration. Deterministic content only: wall-clock timings go to the
 * separate timings file so identical reruns produce byte-identical
 * histories.
 */
void write_history_jsonl(const std::string &path,
                         const std::vector<IterationRecord> &history,
                         bool federated_fields);

/// {"total_ms": ...} style sidecar, excluded from determinism checks.
void write_timings(const std::string &path, double total_ms);

/// Resolved key=value configuration plus seed and version tag.
void write_manifest(const std::string &path,
                    const std::map<std::string, std::string> &config,
                    const std::string &experiment);

/// Reads a manifest back into the flat key=value map.
std::map<std::string, std::string> read_manifest(const std::string &path);

}  // namespace qfl
