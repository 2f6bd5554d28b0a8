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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>

namespace {

using namespace qbm;
using namespace qbm::store;
namespace fs = std::filesystem;

ParamRecord random_record(std::mt19937_64& rng, int n, int p) {
  std::normal_distribution<double> g(0.0, 3.0);
  ParamRecord r;
  r.n_qubits = n;
  r.p = p;
  r.beta = Eigen::VectorXd::NullaryExpr(p, [&] { return g(rng); });
  r.gamma = Eigen::VectorXd::NullaryExpr(p, [&] { return g(rng); });
  r.b = Eigen::VectorXd::NullaryExpr(n, [&] { return g(rng); });
  r.w = Eigen::VectorXd::NullaryExpr(ising::pair_count(n), [&] { return g(rng) * 1e-7; });
  r.noise = {0.005, 0.02};
  r.seed = rng();
  r.final_loss = std::abs(g(rng));
  r.created_at = "2026-01-01T00:00:00Z";
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qbm_store_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(Record, RoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  const fs::path dir = fresh_dir("roundtrip");
  for (int t = 0; t < 50; ++t) {
    const ParamRecord r = random_record(rng, 1 + t % 6, 1 + t % 3);
    EXPECT_EQ(from_json(to_json(r)), r);
    save(r, dir / "r.json");
    EXPECT_EQ(load(dir / "r.json"), r);
  }
}

TEST(Record, SpecialValuesSurvive) {
  std::mt19937_64 rng(4);
  ParamRecord r = random_record(rng, 4, 1);
  r.b << 0.1, -0.0, 5e-324, 1.7976931348623157e308;
  const ParamRecord back = from_json(to_json(r));
  EXPECT_EQ(back, r);
  EXPECT_TRUE(std::signbit(back.b(1)));
}

TEST(Record, TruncatedFileIsMalformed) {
  std::mt19937_64 rng(5);
  const std::string text = to_json(random_record(rng, 4, 2));
  try {
    from_json(text.substr(0, text.size() / 2));
    FAIL() << "expected StoreError";
  } catch (const StoreError& e) {
    EXPECT_NE(std::string(e.what()).find("malformed"), std::string::npos);
  }
}

TEST(Record, SchemaMismatchIsRejected) {
  std::mt19937_64 rng(6);
  std::string text = to_json(random_record(rng, 4, 1));
  const auto pos = text.find("\"schema_version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 19, "\"schema_version\": 2");
  EXPECT_THROW(from_json(text), StoreError);
}

TEST(Record, StructuralErrors) {
  std::mt19937_64 rng(7);
  const ParamRecord r = random_record(rng, 3, 1);
  EXPECT_THROW(from_json("[]"), StoreError);
  EXPECT_THROW(from_json("{\"schema_version\": 1}"), StoreError);
  std::string text = to_json(r);
  text.replace(text.find("\"j\": 1"), 6, "\"j\": 0");
  EXPECT_THROW(from_json(text), StoreError);
  ParamRecord bad = r;
  bad.beta = Eigen::VectorXd::Zero(2);
  EXPECT_THROW(to_json(bad), StoreError);
  bad = r;
  bad.final_loss = -1.0;
  EXPECT_THROW(to_json(bad), StoreError);
  EXPECT_THROW(load("/nonexistent/r.json"), StoreError);
}

TEST(Record, FromModelCopiesEveryField) {
  ising::IsingModel m(4);
  m.biases() << 1, 2, 3, 4;
  m.couplings().setConstant(0.5);
  const qaoa::QaoaParams params(Eigen::VectorXd::Constant(2, 0.1), Eigen::VectorXd::Constant(2, 0.2));
  const ParamRecord r = ParamRecord::from(m, params, {0.01, 0.04}, 9, 0.5, "t");
  EXPECT_EQ(r.model().biases(), m.biases());
  EXPECT_EQ(r.params().gamma, params.gamma);
  EXPECT_EQ(r.p, 2);
}

TEST(Archive, EightyRecordsVerifyClean) {
  std::mt19937_64 rng(8);
  std::vector<ParamRecord> records;
  for (int k = 0; k < 80; ++k) records.push_back(random_record(rng, 4, 1));
  const fs::path dir = fresh_dir("archive");
  const fs::path manifest = archive_set(records, dir);
  EXPECT_EQ(manifest.filename(), kManifestName);
  EXPECT_TRUE(verify_archive(dir).ok);
  EXPECT_EQ(load(dir / "record_079.json"), records[79]);
}

TEST(Archive, BitFlipIsDetectedAndNamed) {
  std::mt19937_64 rng(9);
  std::vector<ParamRecord> records;
  for (int k = 0; k < 5; ++k) records.push_back(random_record(rng, 4, 1));
  const fs::path dir = fresh_dir("flip");
  archive_set(records, dir);
  std::string text = read_text(dir / "record_003.json");
  text[text.size() / 2] ^= 0x01;
  write_text(dir / "record_003.json", text);
  const VerifyReport rep = verify_archive(dir);
  EXPECT_FALSE(rep.ok);
  ASSERT_EQ(rep.mismatched.size(), 1U);
  EXPECT_EQ(rep.mismatched[0], "record_003.json");
}

TEST(Archive, MissingFileIsReported) {
  std::mt19937_64 rng(10);
  const fs::path dir = fresh_dir("missing");
  archive_set({random_record(rng, 2, 1), random_record(rng, 2, 1)}, dir);
  fs::remove(dir / "record_000.json");
  const VerifyReport rep = verify_archive(dir);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.mismatched, std::vector<std::string>{"record_000.json"});
}

TEST(Archive, EmptySetIsAnError) {
  EXPECT_THROW(archive_set({}, fresh_dir("empty")), StoreError);
}

TEST(Archive, CustomNamesMustMatchCount) {
  std::mt19937_64 rng(11);
  EXPECT_THROW(archive_set({random_record(rng, 2, 1)}, fresh_dir("names"), {"a.json", "b.json"}), StoreError);
}

TEST(Sha256, KnownDigest) {
  const fs::path dir = fresh_dir("sha");
  write_text(dir / "abc", "abc");
  EXPECT_EQ(sha256_file(dir / "abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Timestamp, HonoursSourceDateEpoch) {
  ::setenv("SOURCE_DATE_EPOCH", "0", 1);
  EXPECT_EQ(utc_timestamp(), "1970-01-01T00:00:00Z");
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  EXPECT_EQ(utc_timestamp(), "2023-11-14T22:13:20Z");
  ::setenv("SOURCE_DATE_EPOCH", "abc", 1);
  EXPECT_THROW(utc_timestamp(), StoreError);
  ::unsetenv("SOURCE_DATE_EPOCH");
  EXPECT_EQ(utc_timestamp().size(), 20U);
}

}  // namespace
