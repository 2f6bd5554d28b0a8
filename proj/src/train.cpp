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

#include "qbm/train.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace qbm::train {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// (gate position, d angle / d parameter) for every gate the parameter feeds.
std::vector<std::pair<int, double>> dependent_gates(const IsingModel& model, const QaoaParams& params,
                                                    ParamRef ref) {
  const qaoa::CircuitLayout layout{model.n(), params.layers()};
  std::vector<std::pair<int, double>> out;
  switch (ref.kind) {
    case ParamKind::beta:
      for (int q = 0; q < model.n(); ++q) out.emplace_back(layout.rx(ref.index, q), -2.0);
      break;
    case ParamKind::gamma:
      for (int q = 0; q < model.n(); ++q) out.emplace_back(layout.rz(ref.index, q), -2.0 * model.bias(q));
      for (int k = 0; k < model.num_pairs(); ++k) {
        out.emplace_back(layout.rzz(ref.index, k), -2.0 * model.couplings()(k));
      }
      break;
    case ParamKind::bias:
      for (int k = 0; k < params.layers(); ++k) {
        out.emplace_back(layout.rz(k, ref.index), -2.0 * params.gamma(k));
      }
      break;
    case ParamKind::coupling:
      for (int k = 0; k < params.layers(); ++k) {
        out.emplace_back(layout.rzz(k, ref.index), -2.0 * params.gamma(k));
      }
      break;
  }
  return out;
}

void check_ref(const IsingModel& model, const QaoaParams& params, ParamRef ref) {
  const int limit = ref.kind == ParamKind::beta || ref.kind == ParamKind::gamma ? params.layers()
                    : ref.kind == ParamKind::bias                              ? model.n()
                                                                               : model.num_pairs();
  if (ref.index < 0 || ref.index >= limit) throw std::out_of_range("parameter index out of range");
}

double h1_of_circuit(const std::vector<Gate>& gates, const CostHamiltonian& h1, const NoiseModel& noise,
                     const EvalMode& mode) {
  return qaoa::observed_distribution(gates, h1.n_qubits(), noise, mode).dot(h1.diagonal());
}

double h2_of_circuit(const std::vector<Gate>& gates, int n_qubits,
                     const Eigen::Ref<const Eigen::VectorXd>& target, const NoiseModel& noise,
                     const EvalMode& mode) {
  return qaoa::mse_loss(qaoa::observed_distribution(gates, n_qubits, noise, mode), target);
}

EvalMode mode_for(const TrainConfig& cfg, std::mt19937_64& rng) {
  return cfg.shots > 0 ? EvalMode::sampled(cfg.shots, rng) : EvalMode::exact();
}

}  // namespace

std::string to_string(GradientMethod m) {
  switch (m) {
    case GradientMethod::global_shift:
      return "global-shift";
    case GradientMethod::gate_shift:
      return "gate-shift";
    case GradientMethod::central_fd:
      return "central-fd";
  }
  return "unknown";
}

GradientMethod gradient_method_from_string(const std::string& s) {
  if (s == "global-shift") return GradientMethod::global_shift;
  if (s == "gate-shift") return GradientMethod::gate_shift;
  if (s == "central-fd") return GradientMethod::central_fd;
  throw std::invalid_argument("unknown gradient estimator '" + s + "'");
}

void TrainConfig::validate() const {
  if (!(eta2 >= 0.0) || !(eta3 >= 0.0)) throw std::invalid_argument("learning rates must be nonnegative");
  if (inner_max_steps < 1 || outer_max_steps < 1 || global_max_iters < 0) {
    throw std::invalid_argument("step limits must be positive");
  }
  if (!(inner_tol > 0.0) || !(outer_tol > 0.0) || !(loss_target >= 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (shots < 0) throw std::invalid_argument("shot count must be nonnegative");
  if (gradient.method == GradientMethod::central_fd && !(gradient.epsilon > 0.0)) {
    throw std::invalid_argument("finite-difference step must be positive");
  }
  if (!(angle_init >= 0.0) || !(coupling_init >= 0.0)) {
    throw std::invalid_argument("init ranges must be nonnegative");
  }
}

std::vector<Gate> shifted_circuit(const IsingModel& model, const QaoaParams& params, ParamRef ref,
                                  double delta) {
  check_ref(model, params, ref);
  IsingModel m = model;
  QaoaParams q = params;
  switch (ref.kind) {
    case ParamKind::beta:
      q.beta(ref.index) += delta;
      break;
    case ParamKind::gamma:
      q.gamma(ref.index) += delta;
      break;
    case ParamKind::bias:
      m.biases()(ref.index) += delta;
      break;
    case ParamKind::coupling:
      m.couplings()(ref.index) += delta;
      break;
  }
  return qaoa::build_circuit(m, q);
}

namespace {

// Derivative of `f` (a scalar loss or a probability vector) along one
// parameter. The shift methods are exact for quantities linear in the
// final state, which both of these callers are.
template <typename Value, typename Fn>
Value shift_gradient(const IsingModel& model, const QaoaParams& params, ParamRef ref, const Fn& f,
                     const GradientEstimator& estimator) {
  switch (estimator.method) {
    case GradientMethod::global_shift:
      return 0.5 * (f(shifted_circuit(model, params, ref, kHalfPi)) - f(shifted_circuit(model, params, ref, -kHalfPi)));
    case GradientMethod::central_fd: {
      const double eps = estimator.epsilon;
      return (f(shifted_circuit(model, params, ref, eps)) - f(shifted_circuit(model, params, ref, -eps))) /
             (2.0 * eps);
    }
    case GradientMethod::gate_shift: {
      const std::vector<Gate> base = qaoa::build_circuit(model, params);
      std::vector<Gate> gates = base;
      Value grad = 0.0 * f(base);
      for (const auto& [pos, slope] : dependent_gates(model, params, ref)) {
        if (slope == 0.0) continue;
        const auto at = static_cast<std::size_t>(pos);
        gates[at].angle = base[at].angle + kHalfPi;
        const Value plus = f(gates);
        gates[at].angle = base[at].angle - kHalfPi;
        const Value minus = f(gates);
        gates[at].angle = base[at].angle;
        grad += slope * 0.5 * (plus - minus);
      }
      return grad;
    }
  }
  throw std::logic_error("unhandled gradient method");
}

// d<H2>/d theta = (2 / 2^N) sum_i (P_i - P_T(i)) dP_i / d theta, with dP_i
// from the estimator. Central differences act on the loss directly.
double h2_gradient(const CostHamiltonian& h1, const QaoaParams& params, ParamRef ref,
                   const Eigen::Ref<const Eigen::VectorXd>& target, const NoiseModel& noise, const EvalMode& mode,
                   const GradientEstimator& estimator) {
  const int n = h1.n_qubits();
  if (estimator.method == GradientMethod::central_fd) {
    auto loss = [&](const std::vector<Gate>& g) { return h2_of_circuit(g, n, target, noise, mode); };
    return shift_gradient<double>(h1.model(), params, ref, loss, estimator);
  }
  auto dist = [&](const std::vector<Gate>& g) -> Eigen::VectorXd {
    return qaoa::observed_distribution(g, n, noise, mode);
  };
  const Eigen::VectorXd probs = dist(qaoa::build_circuit(h1.model(), params));
  if (probs.size() != target.size()) throw std::invalid_argument("target length must be 2^N");
  const Eigen::VectorXd dp = shift_gradient<Eigen::VectorXd>(h1.model(), params, ref, dist, estimator);
  return 2.0 * (probs - target).dot(dp) / static_cast<double>(probs.size());
}

}  // namespace

double circuit_gradient(const IsingModel& model, const QaoaParams& params, ParamRef ref,
                        const CircuitLoss& loss, const GradientEstimator& estimator) {
  check_ref(model, params, ref);
  return shift_gradient<double>(model, params, ref, loss, estimator);
}

double grad_beta(const CostHamiltonian& h1, const QaoaParams& params, int k, const NoiseModel& noise,
                 const EvalMode& mode, const GradientEstimator& estimator) {
  auto loss = [&](const std::vector<Gate>& g) { return h1_of_circuit(g, h1, noise, mode); };
  return circuit_gradient(h1.model(), params, {ParamKind::beta, k}, loss, estimator);
}

double grad_gamma(const CostHamiltonian& h1, const QaoaParams& params, int k, const NoiseModel& noise,
                  const EvalMode& mode, const GradientEstimator& estimator) {
  auto loss = [&](const std::vector<Gate>& g) { return h1_of_circuit(g, h1, noise, mode); };
  return circuit_gradient(h1.model(), params, {ParamKind::gamma, k}, loss, estimator);
}

double grad_b(const CostHamiltonian& h1, const QaoaParams& params, int i,
              const Eigen::Ref<const Eigen::VectorXd>& target, const NoiseModel& noise,
              const EvalMode& mode, const GradientEstimator& estimator) {
  const ParamRef ref{ParamKind::bias, i};
  check_ref(h1.model(), params, ref);
  return h2_gradient(h1, params, ref, target, noise, mode, estimator);
}

double grad_w(const CostHamiltonian& h1, const QaoaParams& params, int i, int j,
              const Eigen::Ref<const Eigen::VectorXd>& target, const NoiseModel& noise,
              const EvalMode& mode, const GradientEstimator& estimator) {
  const ParamRef ref{ParamKind::coupling, h1.model().pair_index(i, j)};
  return h2_gradient(h1, params, ref, target, noise, mode, estimator);
}

InnerResult inner_loop(const CostHamiltonian& h1, const QaoaParams& params0, const TrainConfig& cfg,
                       const NoiseModel& noise, std::mt19937_64& rng) {
  constexpr int kWindow = 5;
  const EvalMode mode = mode_for(cfg, rng);
  const int p = params0.layers();

  QaoaParams params = params0;
  InnerResult result{params0, qaoa::expected_h1(h1, params0, noise, mode), {}};
  result.trace.push_back(result.best_h1);
  int quiet_steps = 0;
  for (int step = 0; step < cfg.inner_max_steps; ++step) {
    Eigen::VectorXd g_beta(p), g_gamma(p);
    for (int k = 0; k < p; ++k) {
      g_beta(k) = grad_beta(h1, params, k, noise, mode, cfg.gradient);
      g_gamma(k) = grad_gamma(h1, params, k, noise, mode, cfg.gradient);
    }
    params.beta -= cfg.eta2 * g_beta;
    params.gamma -= cfg.eta2 * g_gamma;
    const double value = qaoa::expected_h1(h1, params, noise, mode);
    const double change = std::abs(value - result.trace.back());
    result.trace.push_back(value);
    if (value < result.best_h1) {
      result.best_h1 = value;
      result.params = params;
    }
    quiet_steps = change < cfg.inner_tol ? quiet_steps + 1 : 0;
    if (quiet_steps >= kWindow) break;
  }
  return result;
}

OuterResult outer_loop(const IsingModel& model0, const QaoaParams& params,
                       const Eigen::Ref<const Eigen::VectorXd>& target, const TrainConfig& cfg,
                       const NoiseModel& noise, std::mt19937_64& rng) {
  const EvalMode mode = mode_for(cfg, rng);
  const int n = model0.n();
  IsingModel model = model0;
  OuterResult result{model0, qaoa::mse_loss_h2(CostHamiltonian(model0), params, target, noise, mode), {}};
  result.trace.push_back(result.best_h2);
  for (int step = 0; step < cfg.outer_max_steps; ++step) {
    const CostHamiltonian h1(model);
    Eigen::VectorXd g_b(n), g_w(model.num_pairs());
    for (int i = 0; i < n; ++i) g_b(i) = grad_b(h1, params, i, target, noise, mode, cfg.gradient);
    for (int k = 0; k < model.num_pairs(); ++k) {
      const auto [i, j] = model.pair_at(k);
      g_w(k) = grad_w(h1, params, i, j, target, noise, mode, cfg.gradient);
    }
    model.biases() -= cfg.eta3 * g_b;
    model.couplings() -= cfg.eta3 * g_w;
    const double value = qaoa::mse_loss_h2(CostHamiltonian(model), params, target, noise, mode);
    const double change = std::abs(value - result.trace.back());
    result.trace.push_back(value);
    if (value < result.best_h2) {
      result.best_h2 = value;
      result.model = model;
    }
    if (change < cfg.outer_tol) break;
  }
  return result;
}

std::vector<double> TrainTrace::raw_h2() const {
  std::vector<double> out{initial_h2};
  for (const auto& it : iterations) out.push_back(it.h2);
  return out;
}

std::pair<IsingModel, QaoaParams> initial_parameters(int n_qubits, int layers, std::mt19937_64& rng,
                                                     const TrainConfig& cfg) {
  std::uniform_real_distribution<double> angle(-cfg.angle_init, cfg.angle_init);
  std::uniform_real_distribution<double> coeff(-cfg.coupling_init, cfg.coupling_init);
  QaoaParams params = QaoaParams::zeros(layers);
  for (int k = 0; k < layers; ++k) params.beta(k) = angle(rng);
  for (int k = 0; k < layers; ++k) params.gamma(k) = angle(rng);
  IsingModel model(n_qubits);
  for (int i = 0; i < n_qubits; ++i) model.biases()(i) = coeff(rng);
  for (int k = 0; k < model.num_pairs(); ++k) model.couplings()(k) = coeff(rng);
  return {std::move(model), std::move(params)};
}

TrainResult bilevel_train(const Eigen::Ref<const Eigen::VectorXd>& target, int layers,
                          const TrainConfig& cfg, const NoiseModel& noise) {
  cfg.validate();
  noise.validate();
  const Eigen::Index dim = target.size();
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if (n < 1 || (Eigen::Index{1} << n) != dim) throw std::invalid_argument("target length must be 2^N");
  if (layers < 1) throw std::invalid_argument("layer count must be positive");

  std::mt19937_64 rng(cfg.seed);
  auto [model, params] = initial_parameters(n, layers, rng, cfg);
  const EvalMode mode = mode_for(cfg, rng);

  TrainResult result;
  result.model = model;
  result.params = params;
  result.loss = qaoa::mse_loss_h2(CostHamiltonian(model), params, target, noise, mode);
  result.trace.initial_h2 = result.loss;

  for (int it = 0; it < cfg.global_max_iters && result.loss >= cfg.loss_target; ++it) {
    const auto start = std::chrono::steady_clock::now();
    IterationRecord record;
    record.iteration = it + 1;

    InnerResult inner = inner_loop(CostHamiltonian(model), params, cfg, noise, rng);
    params = inner.params;
    record.inner_h1 = std::move(inner.trace);

    OuterResult outer = outer_loop(model, params, target, cfg, noise, rng);
    model = outer.model;
    record.outer_h2 = std::move(outer.trace);

    // Every outer evaluation uses the current angles, so the minimum of the
    // outer trace is attained by (model, params) right here.
    record.h2 = outer.best_h2;
    if (outer.best_h2 < result.loss) {
      result.loss = outer.best_h2;
      result.model = model;
      result.params = params;
    }
    record.best_h2 = result.loss;
    record.model = model;
    record.params = params;
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.trace.iterations.push_back(std::move(record));
  }
  return result;
}

}  // namespace qbm::train
