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

// Fully connected Ising / Boltzmann model and brute-force enumeration over
// all 2^N spin configurations. Temperature is fixed at k_B T = 1:
//   E(s) = sum_i b_i x_i + sum_{i<j} w_ij x_i x_j,   P(s) = exp(-E(s)) / Z.
//
// Spin x_i = +1 maps to bit 0 and x_i = -1 to bit 1; node 0 is the most
// significant bit of the basis index.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qbm::ising {

class IsingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest node count the enumeration routines accept.
inline constexpr int kMaxEnumerationNodes = 20;

/// Biases b_i and couplings w_ij (i < j). Couplings are packed in row order
/// (0,1), (0,2), ..., (0,N-1), (1,2), ..., (N-2,N-1).
class IsingModel {
 public:
  IsingModel() = default;
  explicit IsingModel(int n);
  IsingModel(Eigen::VectorXd biases, Eigen::VectorXd couplings);

  int n() const { return static_cast<int>(biases_.size()); }
  int num_pairs() const { return static_cast<int>(couplings_.size()); }

  const Eigen::VectorXd& biases() const { return biases_; }
  Eigen::VectorXd& biases() { return biases_; }
  const Eigen::VectorXd& couplings() const { return couplings_; }
  Eigen::VectorXd& couplings() { return couplings_; }

  double bias(int i) const { return biases_(i); }
  double coupling(int i, int j) const;
  void set_coupling(int i, int j, double value);

  /// Position of pair (i, j) in the packed coupling vector; order-insensitive.
  int pair_index(int i, int j) const;
  /// Inverse of pair_index.
  std::pair<int, int> pair_at(int k) const;

  friend bool operator==(const IsingModel&, const IsingModel&) = default;

 private:
  Eigen::VectorXd biases_;
  Eigen::VectorXd couplings_;
};

inline int pair_count(int n) { return n * (n - 1) / 2; }

/// A configuration of N spins, each exactly +1 or -1.
class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::vector<int> spins);

  static SpinConfig all(int n, int value);
  static SpinConfig from_index(std::size_t index, int n);
  static SpinConfig from_bitstring(std::string_view bits);

  int size() const { return static_cast<int>(spins_.size()); }
  int operator[](int i) const { return spins_[static_cast<std::size_t>(i)]; }
  void flip(int i) { spins_[static_cast<std::size_t>(i)] *= -1; }
  void set(int i, int value);
  const std::vector<int>& values() const { return spins_; }

  std::size_t index() const;
  std::string bitstring() const;

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

 private:
  std::vector<int> spins_;
};

/// Bitstring of basis index `index` over `n` bits, node 0 first.
std::string index_to_bitstring(std::size_t index, int n);
/// Parses a 0/1 string with node 0 first.
std::size_t bitstring_to_index(std::string_view bits);

double energy(const IsingModel& m, const SpinConfig& s);

/// Energies of all 2^N configurations indexed by basis index.
Eigen::VectorXd energy_table(const IsingModel& m);

double partition_function(const IsingModel& m);
Eigen::VectorXd boltzmann_distribution(const IsingModel& m);

/// All configurations attaining the minimum energy, ascending by index.
std::vector<SpinConfig> ground_states(const IsingModel& m);

/// E[x_i] and E[x_i x_j] (upper triangle filled, diagonal 1, lower mirrored).
struct Moments {
  Eigen::VectorXd first;
  Eigen::MatrixXd pair;
};

/// Moments of an arbitrary distribution over the 2^N basis indices.
Moments moments_of(const Eigen::Ref<const Eigen::VectorXd>& distribution, int n);
Moments exact_moments(const IsingModel& m);

void check_enumerable(int n);

}  // namespace qbm::ising
