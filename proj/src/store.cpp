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

#include "qbm/store.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <cerrno>
#include <cmath>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>

namespace qbm::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string encode_real(double v) {
  std::array<char, 64> buf{};
  const int len = std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

double decode_real(const json& j, const char* field) {
  if (!j.is_string()) throw StoreError(std::string("field '") + field + "' must be a decimal string");
  const std::string s = j.get<std::string>();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  // Underflow to a subnormal also sets ERANGE; only overflow is an error.
  if (s.empty() || end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(v))) {
    throw StoreError(std::string("field '") + field + "' is not a valid number: " + s);
  }
  return v;
}

json encode_vector(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(encode_real(v(i)));
  return arr;
}

Eigen::VectorXd decode_vector(const json& j, const char* field) {
  if (!j.is_array()) throw StoreError(std::string("field '") + field + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = decode_real(j[i], field);
  return v;
}

const json& require(const json& j, const char* field) {
  if (!j.contains(field)) throw StoreError(std::string("missing field '") + field + "'");
  return j.at(field);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ParamRecord ParamRecord::from(const ising::IsingModel& model, const qaoa::QaoaParams& params,
                              const qsim::NoiseModel& noise, std::uint64_t seed, double final_loss,
                              std::string created_at) {
  ParamRecord r;
  r.n_qubits = model.n();
  r.p = params.layers();
  r.beta = params.beta;
  r.gamma = params.gamma;
  r.b = model.biases();
  r.w = model.couplings();
  r.noise = noise;
  r.seed = seed;
  r.final_loss = final_loss;
  r.created_at = std::move(created_at);
  r.validate();
  return r;
}

ising::IsingModel ParamRecord::model() const { return {b, w}; }

qaoa::QaoaParams ParamRecord::params() const { return {beta, gamma}; }

void ParamRecord::validate() const {
  if (n_qubits < 1 || p < 1) throw StoreError("n_qubits and p must be positive");
  if (beta.size() != p || gamma.size() != p) throw StoreError("beta/gamma length does not match p");
  if (b.size() != n_qubits) throw StoreError("bias count does not match n_qubits");
  if (w.size() != ising::pair_count(n_qubits)) throw StoreError("coupling count does not match n_qubits");
  if (!(final_loss >= 0.0)) throw StoreError("final_loss must be nonnegative");
}

bool operator==(const ParamRecord& a, const ParamRecord& b) {
  return a.n_qubits == b.n_qubits && a.p == b.p && a.beta == b.beta && a.gamma == b.gamma && a.b == b.b &&
         a.w == b.w && a.noise == b.noise && a.seed == b.seed && a.final_loss == b.final_loss &&
         a.created_at == b.created_at;
}

std::string to_json(const ParamRecord& record) {
  record.validate();
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n_qubits"] = record.n_qubits;
  j["p"] = record.p;
  j["beta"] = encode_vector(record.beta);
  j["gamma"] = encode_vector(record.gamma);
  j["b"] = encode_vector(record.b);
  json w = json::array();
  const ising::IsingModel m = record.model();
  for (int k = 0; k < m.num_pairs(); ++k) {
    const auto [i, jj] = m.pair_at(k);
    w.push_back({{"i", i}, {"j", jj}, {"value", encode_real(record.w(k))}});
  }
  j["w"] = std::move(w);
  j["noise"] = {{"p1", encode_real(record.noise.p1)}, {"p2", encode_real(record.noise.p2)}};
  j["seed"] = record.seed;
  j["final_loss"] = encode_real(record.final_loss);
  j["created_at"] = record.created_at;
  return j.dump(2) + "\n";
}

ParamRecord from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw StoreError(std::string("malformed parameter file: ") + e.what());
  }
  if (!j.is_object()) throw StoreError("malformed parameter file: top level must be an object");
  try {
    const json& version = require(j, "schema_version");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
      throw StoreError("unsupported schema_version " + version.dump());
    }
    ParamRecord r;
    r.n_qubits = require(j, "n_qubits").get<int>();
    r.p = require(j, "p").get<int>();
    r.beta = decode_vector(require(j, "beta"), "beta");
    r.gamma = decode_vector(require(j, "gamma"), "gamma");
    r.b = decode_vector(require(j, "b"), "b");
    if (r.n_qubits < 1 || r.n_qubits > ising::kMaxEnumerationNodes) throw StoreError("n_qubits out of range");
    const json& w = require(j, "w");
    if (!w.is_array()) throw StoreError("field 'w' must be an array");
    ising::IsingModel m(r.n_qubits);
    if (static_cast<int>(w.size()) != m.num_pairs()) throw StoreError("coupling count does not match n_qubits");
    std::vector<bool> seen(static_cast<std::size_t>(m.num_pairs()), false);
    for (const json& entry : w) {
      const int i = require(entry, "i").get<int>();
      const int jj = require(entry, "j").get<int>();
      if (i >= jj) throw StoreError("coupling entries need i < j");
      int k = 0;
      try {
        k = m.pair_index(i, jj);
      } catch (const ising::IsingError& e) {
        throw StoreError(e.what());
      }
      if (seen[static_cast<std::size_t>(k)]) throw StoreError("duplicate coupling entry");
      seen[static_cast<std::size_t>(k)] = true;
      m.couplings()(k) = decode_real(require(entry, "value"), "w.value");
    }
    r.w = m.couplings();
    const json& noise = require(j, "noise");
    r.noise = {decode_real(require(noise, "p1"), "noise.p1"), decode_real(require(noise, "p2"), "noise.p2")};
    r.seed = require(j, "seed").get<std::uint64_t>();
    r.final_loss = decode_real(require(j, "final_loss"), "final_loss");
    r.created_at = require(j, "created_at").get<std::string>();
    r.validate();
    return r;
  } catch (const json::exception& e) {
    throw StoreError(std::string("malformed parameter file: ") + e.what());
  }
}

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw StoreError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StoreError("cannot move " + tmp.string() + " into place: " + ec.message());
}

void save(const ParamRecord& record, const fs::path& path) { write_atomic(path, to_json(record)); }

ParamRecord load(const fs::path& path) { return from_json(read_file(path)); }

std::string sha256_file(const fs::path& path) {
  const std::string data = read_file(path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw StoreError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

fs::path archive_set(const std::vector<ParamRecord>& records, const fs::path& dir,
                     const std::vector<std::string>& names) {
  if (records.empty()) throw StoreError("cannot archive an empty record set");
  if (!names.empty() && names.size() != records.size()) throw StoreError("one file name per record required");
  fs::create_directories(dir);
  json files = json::array();
  for (std::size_t k = 0; k < records.size(); ++k) {
    std::string name = names.empty() ? "" : names[k];
    if (name.empty()) {
      std::array<char, 32> buf{};
      std::snprintf(buf.data(), buf.size(), "record_%03zu.json", k);
      name = buf.data();
    }
    save(records[k], dir / name);
    files.push_back({{"file", name}, {"sha256", sha256_file(dir / name)}});
  }
  json manifest{{"schema_version", kSchemaVersion}, {"count", records.size()}, {"files", std::move(files)}};
  const fs::path path = dir / kManifestName;
  write_atomic(path, manifest.dump(2) + "\n");
  return path;
}

VerifyReport verify_archive(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_file(dir / kManifestName));
  } catch (const json::parse_error& e) {
    throw StoreError(std::string("malformed manifest: ") + e.what());
  }
  VerifyReport report;
  for (const json& entry : require(manifest, "files")) {
    const std::string name = require(entry, "file").get<std::string>();
    const std::string expected = require(entry, "sha256").get<std::string>();
    const fs::path file = dir / name;
    if (!fs::exists(file) || sha256_file(file) != expected) {
      report.ok = false;
      report.mismatched.push_back(name);
    }
  }
  return report;
}

std::string utc_timestamp() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(epoch, epoch + std::char_traits<char>::length(epoch), v);
    if (ec != std::errc{} || *ptr != '\0') throw StoreError("SOURCE_DATE_EPOCH must be an integer");
    t = static_cast<std::time_t>(v);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

}  // namespace qbm::store
