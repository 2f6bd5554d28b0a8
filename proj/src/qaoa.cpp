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

#include "qbm/qaoa.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace qbm::qaoa {

QaoaParams::QaoaParams(Eigen::VectorXd b, Eigen::VectorXd g) : beta(std::move(b)), gamma(std::move(g)) {
  if (beta.size() < 1 || beta.size() != gamma.size()) {
    throw std::invalid_argument("beta and gamma must both have length p >= 1");
  }
}

QaoaParams QaoaParams::zeros(int p) { return {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p)}; }

CostHamiltonian::CostHamiltonian(IsingModel model)
    : model_(std::move(model)), diagonal_(ising::energy_table(model_)) {}

std::vector<Gate> build_circuit(const IsingModel& model, const QaoaParams& params) {
  const int n = model.n();
  const int p = params.layers();
  if (p < 1 || params.gamma.size() != p) throw std::invalid_argument("invalid QAOA parameters");
  const CircuitLayout layout{n, p};
  std::vector<Gate> gates;
  gates.reserve(static_cast<std::size_t>(layout.size()));
  for (int q = 0; q < n; ++q) gates.push_back(Gate::h(q));
  for (int k = 0; k < p; ++k) {
    const double gamma = params.gamma(k);
    for (int q = 0; q < n; ++q) gates.push_back(Gate::rz(-2.0 * gamma * model.bias(q), q));
    for (int pair = 0; pair < model.num_pairs(); ++pair) {
      const auto [i, j] = model.pair_at(pair);
      gates.push_back(Gate::rzz(-2.0 * gamma * model.couplings()(pair), i, j));
    }
    for (int q = 0; q < n; ++q) gates.push_back(Gate::rx(-2.0 * params.beta(k), q));
  }
  return gates;
}

Eigen::VectorXd circuit_probabilities(const std::vector<Gate>& gates, int n_qubits,
                                      const NoiseModel& noise) {
  const auto backend = noise.noiseless() ? qsim::Backend::pure : qsim::Backend::mixed;
  return qsim::probabilities(qsim::run_circuit(gates, n_qubits, noise, backend));
}

Eigen::VectorXd observed_distribution(const std::vector<Gate>& gates, int n_qubits,
                                      const NoiseModel& noise, const EvalMode& mode) {
  Eigen::VectorXd probs = circuit_probabilities(gates, n_qubits, noise);
  if (mode.is_exact()) return probs;
  probs /= probs.sum();
  const auto counts = qsim::sample_counts(probs, mode.shots(), mode.rng());
  Eigen::VectorXd freq(probs.size());
  for (Eigen::Index i = 0; i < freq.size(); ++i) {
    freq(i) = static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(mode.shots());
  }
  return freq;
}

Eigen::VectorXd final_probabilities(const CostHamiltonian& h1, const QaoaParams& params,
                                    const NoiseModel& noise) {
  return circuit_probabilities(build_circuit(h1, params), h1.n_qubits(), noise);
}

double expected_h1(const CostHamiltonian& h1, const QaoaParams& params, const NoiseModel& noise,
                   const EvalMode& mode) {
  const Eigen::VectorXd dist = observed_distribution(build_circuit(h1, params), h1.n_qubits(), noise, mode);
  return dist.dot(h1.diagonal());
}

double mse_loss(const Eigen::Ref<const Eigen::VectorXd>& probs,
                const Eigen::Ref<const Eigen::VectorXd>& target) {
  if (probs.size() != target.size()) throw std::invalid_argument("target length must be 2^N");
  return (probs - target).squaredNorm() / static_cast<double>(probs.size());
}

double mse_loss_h2(const CostHamiltonian& h1, const QaoaParams& params,
                   const Eigen::Ref<const Eigen::VectorXd>& target, const NoiseModel& noise,
                   const EvalMode& mode) {
  const Eigen::VectorXd dist = observed_distribution(build_circuit(h1, params), h1.n_qubits(), noise, mode);
  return mse_loss(dist, target);
}

std::vector<std::int64_t> generate(const CostHamiltonian& h1, const QaoaParams& params,
                                   const NoiseModel& noise, std::int64_t shots,
                                   std::mt19937_64& rng) {
  Eigen::VectorXd probs = final_probabilities(h1, params, noise);
  probs /= probs.sum();
  return qsim::sample_counts(probs, shots, rng);
}

std::size_t modal_outcome(const std::vector<std::int64_t>& counts) {
  if (counts.empty()) throw std::invalid_argument("empty count vector");
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace qbm::qaoa
