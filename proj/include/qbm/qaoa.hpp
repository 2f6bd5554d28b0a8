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

// Variable-coefficient QAOA circuit. The cost Hamiltonian
//   H1 = sum_i b_i Z_i + sum_{i<j} w_ij Z_i Z_j
// takes its coefficients from an Ising model, so training can move them.
//
// Circuit layout for N qubits and p layers:
//   H on every qubit,
//   then per layer k: RZ(-2 g_k b_i) on every qubit, RZZ(-2 g_k w_ij) on
//   every pair in packed order, RX(-2 b_k) on every qubit.
// These realise exp(+i beta H0) exp(+i gamma H1) with H0 = sum_i X_i.

#pragma once

#include "qbm/ising.hpp"
#include "qbm/qsim.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace qbm::qaoa {

using ising::IsingModel;
using qsim::Gate;
using qsim::NoiseModel;

/// Variational angles, one beta and one gamma per layer.
struct QaoaParams {
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;

  QaoaParams() = default;
  QaoaParams(Eigen::VectorXd b, Eigen::VectorXd g);
  static QaoaParams zeros(int p);

  int layers() const { return static_cast<int>(beta.size()); }
  friend bool operator==(const QaoaParams& a, const QaoaParams& b) {
    return a.beta == b.beta && a.gamma == b.gamma;
  }
};

/// H1 together with its computational-basis diagonal.
class CostHamiltonian {
 public:
  explicit CostHamiltonian(IsingModel model);

  const IsingModel& model() const { return model_; }
  const Eigen::VectorXd& diagonal() const { return diagonal_; }
  int n_qubits() const { return model_.n(); }

 private:
  IsingModel model_;
  Eigen::VectorXd diagonal_;
};

/// Positions of the parameterised gates inside build_circuit's output.
struct CircuitLayout {
  int n_qubits;
  int layers;

  int num_pairs() const { return n_qubits * (n_qubits - 1) / 2; }
  int layer_size() const { return 2 * n_qubits + num_pairs(); }
  int size() const { return n_qubits + layers * layer_size(); }
  int rz(int layer, int qubit) const { return n_qubits + layer * layer_size() + qubit; }
  int rzz(int layer, int pair) const { return n_qubits + layer * layer_size() + n_qubits + pair; }
  int rx(int layer, int qubit) const {
    return n_qubits + layer * layer_size() + n_qubits + num_pairs() + qubit;
  }
};

std::vector<Gate> build_circuit(const IsingModel& model, const QaoaParams& params);
inline std::vector<Gate> build_circuit(const CostHamiltonian& h1, const QaoaParams& params) {
  return build_circuit(h1.model(), params);
}

/// Exact or shot-sampled evaluation. Shots mode draws from `rng`.
class EvalMode {
 public:
  static EvalMode exact() { return EvalMode(0, nullptr); }
  static EvalMode sampled(std::int64_t shots, std::mt19937_64& rng) { return EvalMode(shots, &rng); }

  bool is_exact() const { return shots_ == 0; }
  std::int64_t shots() const { return shots_; }
  std::mt19937_64& rng() const { return *rng_; }

 private:
  EvalMode(std::int64_t shots, std::mt19937_64* rng) : shots_(shots), rng_(rng) {}
  std::int64_t shots_;
  std::mt19937_64* rng_;
};

/// Exact measurement distribution of a gate list; pure backend when
/// noiseless, density matrix otherwise.
Eigen::VectorXd circuit_probabilities(const std::vector<Gate>& gates, int n_qubits,
                                      const NoiseModel& noise);

/// Distribution used by the loss functions: exact, or empirical counts / m.
Eigen::VectorXd observed_distribution(const std::vector<Gate>& gates, int n_qubits,
                                      const NoiseModel& noise, const EvalMode& mode);

Eigen::VectorXd final_probabilities(const CostHamiltonian& h1, const QaoaParams& params,
                                    const NoiseModel& noise);

/// <H1> = sum_i P(i) <i|H1|i>.
double expected_h1(const CostHamiltonian& h1, const QaoaParams& params, const NoiseModel& noise,
                   const EvalMode& mode = EvalMode::exact());

/// <H2> = (1/2^N) sum_i (P(i) - P_T(i))^2.
double mse_loss(const Eigen::Ref<const Eigen::VectorXd>& probs,
                const Eigen::Ref<const Eigen::VectorXd>& target);
double mse_loss_h2(const CostHamiltonian& h1, const QaoaParams& params,
                   const Eigen::Ref<const Eigen::VectorXd>& target, const NoiseModel& noise,
                   const EvalMode& mode = EvalMode::exact());

/// Runs the trained circuit and samples `shots` outcomes.
std::vector<std::int64_t> generate(const CostHamiltonian& h1, const QaoaParams& params,
                                   const NoiseModel& noise, std::int64_t shots,
                                   std::mt19937_64& rng);

/// Index of the largest count; ties go to the lowest index.
std::size_t modal_outcome(const std::vector<std::int64_t>& counts);

}  // namespace qbm::qaoa
