// Copyright 2026 The qbm Authors
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

// Parameter storage: trained (Theta, beta, gamma) records as JSON files and
// checksummed archives of record sets.
//
// Record schema (schema_version 1):
//   { "schema_version": 1, "n_qubits": N, "p": p,
//     "beta": [..], "gamma": [..], "b": [..],
//     "w": [{"i": i, "j": j, "value": v}, ..],
//     "noise": {"p1": .., "p2": ..}, "seed": s,
//     "final_loss": .., "created_at": "YYYY-MM-DDTHH:MM:SSZ" }
// Every real number is written as a decimal string with 17 significant
// digits, which reads back to the identical double.

#pragma once

#include "qbm/ising.hpp"
#include "qbm/qaoa.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbm::store {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

struct ParamRecord {
  int n_qubits = 0;
  int p = 0;
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;
  Eigen::VectorXd b;
  Eigen::VectorXd w;  // packed pair order, see ising::IsingModel
  qsim::NoiseModel noise{};
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  std::string created_at;

  static ParamRecord from(const ising::IsingModel& model, const qaoa::QaoaParams& params,
                          const qsim::NoiseModel& noise, std::uint64_t seed, double final_loss,
                          std::string created_at);

  ising::IsingModel model() const;
  qaoa::QaoaParams params() const;
  void validate() const;

  friend bool operator==(const ParamRecord& a, const ParamRecord& b);
};

std::string to_json(const ParamRecord& record);
ParamRecord from_json(const std::string& text);

/// Writes via a temporary sibling file and a rename.
void save(const ParamRecord& record, const std::filesystem::path& path);
ParamRecord load(const std::filesystem::path& path);

/// Writes `text` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

inline constexpr const char* kManifestName = "MANIFEST.json";

/// Saves `records` as record_000.json, record_001.json, ... in `dir` and
/// writes a manifest listing each file with its SHA-256. Returns the
/// manifest path.
std::filesystem::path archive_set(const std::vector<ParamRecord>& records, const std::filesystem::path& dir,
                                  const std::vector<std::string>& names = {});

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> mismatched;  // files whose checksum differs or are missing
};

VerifyReport verify_archive(const std::filesystem::path& dir);

/// UTC timestamp in ISO-8601 form. Honours SOURCE_DATE_EPOCH when set.
std::string utc_timestamp();

}  // namespace qbm::store
