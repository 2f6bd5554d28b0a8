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

#include "qbm/ising.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace qbm::ising {

IsingModel::IsingModel(int n) {
  if (n < 1) throw IsingError("node count must be positive");
  biases_ = Eigen::VectorXd::Zero(n);
  couplings_ = Eigen::VectorXd::Zero(pair_count(n));
}

IsingModel::IsingModel(Eigen::VectorXd biases, Eigen::VectorXd couplings)
    : biases_(std::move(biases)), couplings_(std::move(couplings)) {
  if (biases_.size() < 1) throw IsingError("node count must be positive");
  if (couplings_.size() != pair_count(static_cast<int>(biases_.size()))) {
    throw IsingError("coupling vector must hold N(N-1)/2 entries");
  }
}

int IsingModel::pair_index(int i, int j) const {
  const int n = this->n();
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n || i == j) {
    throw IsingError("invalid coupling pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  // Pairs before row i: sum_{r<i} (n - 1 - r).
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

std::pair<int, int> IsingModel::pair_at(int k) const {
  const int n = this->n();
  if (k < 0 || k >= num_pairs()) throw IsingError("pair index out of range");
  int i = 0;
  while (k >= n - 1 - i) {
    k -= n - 1 - i;
    ++i;
  }
  return {i, i + 1 + k};
}

double IsingModel::coupling(int i, int j) const { return couplings_(pair_index(i, j)); }

void IsingModel::set_coupling(int i, int j, double value) { couplings_(pair_index(i, j)) = value; }

SpinConfig::SpinConfig(std::vector<int> spins) : spins_(std::move(spins)) {
  for (int x : spins_) {
    if (x != 1 && x != -1) throw IsingError("spin values must be +1 or -1");
  }
}

SpinConfig SpinConfig::all(int n, int value) {
  return SpinConfig(std::vector<int>(static_cast<std::size_t>(n), value));
}

SpinConfig SpinConfig::from_index(std::size_t index, int n) {
  if (n < 1 || n > 63 || index >= (std::size_t{1} << n)) {
    throw IsingError("basis index out of range");
  }
  std::vector<int> spins(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const bool bit = (index >> (n - 1 - i)) & 1U;
    spins[static_cast<std::size_t>(i)] = bit ? -1 : 1;
  }
  return SpinConfig(std::move(spins));
}

SpinConfig SpinConfig::from_bitstring(std::string_view bits) {
  return from_index(bitstring_to_index(bits), static_cast<int>(bits.size()));
}

void SpinConfig::set(int i, int value) {
  if (value != 1 && value != -1) throw IsingError("spin values must be +1 or -1");
  spins_[static_cast<std::size_t>(i)] = value;
}

std::size_t SpinConfig::index() const {
  std::size_t idx = 0;
  for (int x : spins_) idx = (idx << 1) | (x == -1 ? 1U : 0U);
  return idx;
}

std::string SpinConfig::bitstring() const { return index_to_bitstring(index(), size()); }

std::string index_to_bitstring(std::size_t index, int n) {
  std::string out(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i) {
    if ((index >> (n - 1 - i)) & 1U) out[static_cast<std::size_t>(i)] = '1';
  }
  return out;
}

std::size_t bitstring_to_index(std::string_view bits) {
  if (bits.empty() || bits.size() > 63) throw IsingError("bitstring length out of range");
  std::size_t idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw IsingError("bitstring may contain only '0' and '1'");
    idx = (idx << 1) | (c == '1' ? 1U : 0U);
  }
  return idx;
}

double energy(const IsingModel& m, const SpinConfig& s) {
  const int n = m.n();
  if (s.size() != n) throw IsingError("spin configuration size does not match the model");
  double e = 0.0;
  for (int i = 0; i < n; ++i) e += m.bias(i) * s[i];
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++k) e += m.couplings()(k) * s[i] * s[j];
  }
  return e;
}

void check_enumerable(int n) {
  if (n > kMaxEnumerationNodes) {
    throw IsingError("enumeration limited to " + std::to_string(kMaxEnumerationNodes) +
                     " nodes, got " + std::to_string(n));
  }
}

Eigen::VectorXd energy_table(const IsingModel& m) {
  check_enumerable(m.n());
  const std::size_t dim = std::size_t{1} << m.n();
  Eigen::VectorXd table(static_cast<Eigen::Index>(dim));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    table(static_cast<Eigen::Index>(idx)) = energy(m, SpinConfig::from_index(idx, m.n()));
  }
  return table;
}

namespace {

// Weights exp(-(E - E_min)); the shift keeps large models finite.
Eigen::VectorXd shifted_weights(const Eigen::VectorXd& energies, double& shift) {
  shift = energies.minCoeff();
  return (-(energies.array() - shift)).exp().matrix();
}

}  // namespace

double partition_function(const IsingModel& m) {
  double shift = 0.0;
  const Eigen::VectorXd w = shifted_weights(energy_table(m), shift);
  return w.sum() * std::exp(-shift);
}

Eigen::VectorXd boltzmann_distribution(const IsingModel& m) {
  double shift = 0.0;
  Eigen::VectorXd w = shifted_weights(energy_table(m), shift);
  return w / w.sum();
}

std::vector<SpinConfig> ground_states(const IsingModel& m) {
  const Eigen::VectorXd e = energy_table(m);
  const double lowest = e.minCoeff();
  std::vector<SpinConfig> out;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (e(i) == lowest) out.push_back(SpinConfig::from_index(static_cast<std::size_t>(i), m.n()));
  }
  return out;
}

Moments moments_of(const Eigen::Ref<const Eigen::VectorXd>& distribution, int n) {
  check_enumerable(n);
  if (distribution.size() != (Eigen::Index{1} << n)) {
    throw IsingError("distribution length must be 2^N");
  }
  Moments out{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index idx = 0; idx < distribution.size(); ++idx) {
    const double p = distribution(idx);
    if (p == 0.0) continue;
    const SpinConfig s = SpinConfig::from_index(static_cast<std::size_t>(idx), n);
    for (int i = 0; i < n; ++i) {
      out.first(i) += p * s[i];
      for (int j = i + 1; j < n; ++j) out.pair(i, j) += p * s[i] * s[j];
    }
  }
  for (int i = 0; i < n; ++i) {
    out.pair(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) out.pair(j, i) = out.pair(i, j);
  }
  return out;
}

Moments exact_moments(const IsingModel& m) { return moments_of(boltzmann_distribution(m), m.n()); }

}  // namespace qbm::ising
