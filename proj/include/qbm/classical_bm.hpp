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

// Classical fully connected Boltzmann machine baseline: positive-phase
// energy minimisation, sequential Gibbs sampling, KL loss and contrastive
// divergence updates.

#pragma once

#include "qbm/ising.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace qbm::classical {

using ising::IsingModel;
using ising::Moments;
using ising::SpinConfig;

/// Sign of the local field inside the logistic conditional.
///  - boltzmann: P(x_i = +1 | rest) = sigma(-2 h_i), the exact conditional
///    of P(s) ∝ exp(-E(s)).
///  - literal: sigma(+2 h_i), the field taken with the opposite sign, as the
///    update rule is commonly printed for this energy.
/// with h_i = b_i + sum_{j != i} w_ij x_j.
enum class FieldSign { boltzmann, literal };

/// Direction of the contrastive-divergence step.
///  - descent: theta -= eta (E_data - E_model), gradient descent on KL for
///    P ∝ exp(-E).
///  - literal: theta += eta (E_data - E_model).
enum class UpdateSign { descent, literal };

struct GibbsChainState {
  SpinConfig current;
  std::int64_t sweeps_done = 0;
};

struct ClassicalTrainConfig {
  double eta1 = 0.1;
  int sweeps = 10;               // G sweeps from the positive-phase state
  int max_epochs = 200;
  int moment_samples = 1000;     // post-burn-in samples per model-moment estimate
  std::uint64_t seed = 0;
  double init_range = 1.0;       // b, w ~ U(-init_range, init_range)
  FieldSign field_sign = FieldSign::boltzmann;
  UpdateSign update_sign = UpdateSign::descent;

  void validate() const;
};

/// Local field b_i + sum_{j != i} w_ij x_j.
double local_field(const IsingModel& m, const SpinConfig& s, int i);

/// Lowest-energy configuration; ties go to the lowest basis index. Never
/// raises the energy above that of `start`.
SpinConfig positive_phase_minimize(const IsingModel& m, const SpinConfig& start);

/// P(x_i = +1 | all other spins).
double gibbs_conditional(const IsingModel& m, const SpinConfig& s, int i,
                         FieldSign sign = FieldSign::boltzmann);

/// Resamples every node once in index order.
GibbsChainState gibbs_sweep(const IsingModel& m, GibbsChainState chain, std::mt19937_64& rng,
                            FieldSign sign = FieldSign::boltzmann);

/// KL(pT || pM) with 0 log 0 = 0; +inf if pM vanishes where pT does not.
double kl_divergence(const Eigen::Ref<const Eigen::VectorXd>& target,
                     const Eigen::Ref<const Eigen::VectorXd>& model);

IsingModel cd_update(const IsingModel& m, const Moments& data, const Moments& model,
                     const ClassicalTrainConfig& cfg);

/// Empirical moments of a set of configurations.
Moments sample_moments(const std::vector<SpinConfig>& samples);

struct ClassicalTrainResult {
  IsingModel model;
  std::vector<double> kl_trace;  // exact KL before training and after each epoch
};

/// One epoch: draw a training sample, minimise energy from it, run G Gibbs
/// sweeps, collect `moment_samples` further samples, apply cd_update.
ClassicalTrainResult train_classical(const std::vector<SpinConfig>& samples,
                                     const ClassicalTrainConfig& cfg);

/// Same loop, starting from a given model.
ClassicalTrainResult train_classical(const IsingModel& init, const std::vector<SpinConfig>& samples,
                                     const ClassicalTrainConfig& cfg);

/// Empirical distribution over basis indices of a set of configurations.
Eigen::VectorXd empirical_distribution(const std::vector<SpinConfig>& samples, int n);

}  // namespace qbm::classical
