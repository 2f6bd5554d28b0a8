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

#include "qbm/classical_bm.hpp"

#include <cmath>
#include <stdexcept>

namespace qbm::classical {

namespace {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void ClassicalTrainConfig::validate() const {
  if (!(eta1 >= 0.0)) throw std::invalid_argument("eta1 must be nonnegative");
  if (sweeps < 1) throw std::invalid_argument("at least one Gibbs sweep per epoch is required");
  if (max_epochs < 0 || moment_samples < 1) throw std::invalid_argument("invalid epoch or sample count");
}

double local_field(const IsingModel& m, const SpinConfig& s, int i) {
  if (i < 0 || i >= m.n()) throw std::out_of_range("node index out of range");
  double h = m.bias(i);
  for (int j = 0; j < m.n(); ++j) {
    if (j != i) h += m.coupling(i, j) * s[j];
  }
  return h;
}

SpinConfig positive_phase_minimize(const IsingModel& m, const SpinConfig& start) {
  if (start.size() != m.n()) throw ising::IsingError("spin configuration size does not match the model");
  if (m.n() > ising::kMaxEnumerationNodes) {
    // Greedy single-flip descent; each accepted flip lowers the energy.
    SpinConfig s = start;
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < m.n(); ++i) {
        if (2.0 * s[i] * local_field(m, s, i) > 0.0) {
          s.flip(i);
          improved = true;
        }
      }
    }
    return s;
  }
  const Eigen::VectorXd e = ising::energy_table(m);
  Eigen::Index best = 0;
  e.minCoeff(&best);  // first minimum, i.e. lowest index
  return SpinConfig::from_index(static_cast<std::size_t>(best), m.n());
}

double gibbs_conditional(const IsingModel& m, const SpinConfig& s, int i, FieldSign sign) {
  const double h = local_field(m, s, i);
  return logistic(sign == FieldSign::boltzmann ? -2.0 * h : 2.0 * h);
}

GibbsChainState gibbs_sweep(const IsingModel& m, GibbsChainState chain, std::mt19937_64& rng,
                            FieldSign sign) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < m.n(); ++i) {
    const double up = gibbs_conditional(m, chain.current, i, sign);
    chain.current.set(i, unit(rng) < up ? 1 : -1);
  }
  ++chain.sweeps_done;
  return chain;
}

double kl_divergence(const Eigen::Ref<const Eigen::VectorXd>& target,
                     const Eigen::Ref<const Eigen::VectorXd>& model) {
  if (target.size() != model.size()) throw std::invalid_argument("distribution lengths differ");
  double kl = 0.0;
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const double pt = target(i);
    if (pt <= 0.0) continue;
    if (model(i) <= 0.0) return std::numeric_limits<double>::infinity();
    kl += pt * std::log(pt / model(i));
  }
  return kl;
}

IsingModel cd_update(const IsingModel& m, const Moments& data, const Moments& model,
                     const ClassicalTrainConfig& cfg) {
  const int n = m.n();
  if (data.first.size() != n || model.first.size() != n || data.pair.rows() != n || model.pair.rows() != n) {
    throw std::invalid_argument("moment dimensions do not match the model");
  }
  const double step = cfg.update_sign == UpdateSign::descent ? -cfg.eta1 : cfg.eta1;
  IsingModel out = m;
  out.biases() += step * (data.first - model.first);
  for (int k = 0; k < m.num_pairs(); ++k) {
    const auto [i, j] = m.pair_at(k);
    out.couplings()(k) += step * (data.pair(i, j) - model.pair(i, j));
  }
  return out;
}

Moments sample_moments(const std::vector<SpinConfig>& samples) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  const int n = samples.front().size();
  Moments out{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  for (const auto& s : samples) {
    for (int i = 0; i < n; ++i) {
      out.first(i) += s[i];
      for (int j = i + 1; j < n; ++j) out.pair(i, j) += s[i] * s[j];
    }
  }
  const double count = static_cast<double>(samples.size());
  out.first /= count;
  for (int i = 0; i < n; ++i) {
    out.pair(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      out.pair(i, j) /= count;
      out.pair(j, i) = out.pair(i, j);
    }
  }
  return out;
}

Eigen::VectorXd empirical_distribution(const std::vector<SpinConfig>& samples, int n) {
  ising::check_enumerable(n);
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
  if (samples.empty()) return dist;
  for (const auto& s : samples) dist(static_cast<Eigen::Index>(s.index())) += 1.0;
  return dist / static_cast<double>(samples.size());
}

ClassicalTrainResult train_classical(const IsingModel& init, const std::vector<SpinConfig>& samples,
                                     const ClassicalTrainConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw std::invalid_argument("no training samples");
  const int n = init.n();
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const Moments data = sample_moments(samples);
  const Eigen::VectorXd target = empirical_distribution(samples, n);

  ClassicalTrainResult result{init, {}};
  result.kl_trace.push_back(kl_divergence(target, ising::boltzmann_distribution(init)));
  std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const SpinConfig& s0 = samples[pick(rng)];
    GibbsChainState chain{positive_phase_minimize(result.model, s0), 0};
    for (int g = 0; g < cfg.sweeps; ++g) chain = gibbs_sweep(result.model, chain, rng, cfg.field_sign);
    std::vector<SpinConfig> negatives;
    negatives.reserve(static_cast<std::size_t>(cfg.moment_samples));
    for (int k = 0; k < cfg.moment_samples; ++k) {
      chain = gibbs_sweep(result.model, chain, rng, cfg.field_sign);
      negatives.push_back(chain.current);
    }
    result.model = cd_update(result.model, data, sample_moments(negatives), cfg);
    result.kl_trace.push_back(kl_divergence(target, ising::boltzmann_distribution(result.model)));
  }
  return result;
}

ClassicalTrainResult train_classical(const std::vector<SpinConfig>& samples, const ClassicalTrainConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("no training samples");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coeff(-cfg.init_range, cfg.init_range);
  IsingModel init(samples.front().size());
  for (int i = 0; i < init.n(); ++i) init.biases()(i) = coeff(rng);
  for (int k = 0; k < init.num_pairs(); ++k) init.couplings()(k) = coeff(rng);
  return train_classical(init, samples, cfg);
}

}  // namespace qbm::classical
