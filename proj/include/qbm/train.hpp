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

// Bilevel trainer. The inner loop moves the QAOA angles to minimise <H1>
// with the Ising coefficients held fixed; the outer loop moves the Ising
// coefficients to minimise the <H2> distribution MSE with the angles held
// fixed. A global iteration runs each loop to convergence in turn.

#pragma once

#include "qbm/ising.hpp"
#include "qbm/qaoa.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qbm::train {

using ising::IsingModel;
using qaoa::CostHamiltonian;
using qaoa::EvalMode;
using qaoa::QaoaParams;
using qsim::Gate;
using qsim::NoiseModel;

/// How a derivative is estimated.
///  - global_shift: 1/2 [f(theta + pi/2) - f(theta - pi/2)] with the shared
///    parameter moved everywhere it appears at once. Exact only when the
///    parameter drives a single Pauli rotation.
///  - gate_shift: the shift rule applied to every gate the parameter feeds,
///    weighted by d(angle)/d(theta) and summed. Exact for every parameter,
///    with or without depolarizing noise.
///  - central_fd: [f(theta + eps) - f(theta - eps)] / (2 eps).
enum class GradientMethod { global_shift, gate_shift, central_fd };

struct GradientEstimator {
  GradientMethod method = GradientMethod::gate_shift;
  double epsilon = 1e-4;  // central_fd only

  static GradientEstimator global_shift() { return {GradientMethod::global_shift, 0.0}; }
  static GradientEstimator gate_shift() { return {GradientMethod::gate_shift, 0.0}; }
  static GradientEstimator central_fd(double eps = 1e-4) { return {GradientMethod::central_fd, eps}; }
};

std::string to_string(GradientMethod m);
GradientMethod gradient_method_from_string(const std::string& s);

struct TrainConfig {
  double eta2 = 0.01;  // inner (beta, gamma) learning rate
  double eta3 = 30.0;  // outer (b, w) learning rate
  int inner_max_steps = 100;
  int outer_max_steps = 100;
  int global_max_iters = 50;
  double inner_tol = 1e-4;
  double outer_tol = 1e-4;
  double loss_target = 1e-4;  // stop once <H2> drops below this
  std::int64_t shots = 0;     // 0 = exact probabilities
  GradientEstimator gradient{};
  std::uint64_t seed = 0;
  double angle_init = 0.3;     // beta, gamma ~ U(-angle_init, angle_init)
  double coupling_init = 0.3;  // b, w ~ U(-coupling_init, coupling_init)

  void validate() const;
};

/// Which trainable scalar a gradient refers to.
enum class ParamKind { beta, gamma, bias, coupling };
struct ParamRef {
  ParamKind kind;
  int index;  // layer for beta/gamma, node for bias, packed pair for coupling
};

/// Loss of a concrete gate list.
using CircuitLoss = std::function<double(const std::vector<Gate>&)>;

/// Derivative of `loss` with respect to one parameter of the circuit built
/// from (model, params). The shift methods assume `loss` is linear in the
/// final state, e.g. an expectation value or a single probability.
double circuit_gradient(const IsingModel& model, const QaoaParams& params, ParamRef ref,
                        const CircuitLoss& loss, const GradientEstimator& estimator);

/// Gate list with one parameter moved by `delta` wherever it appears.
std::vector<Gate> shifted_circuit(const IsingModel& model, const QaoaParams& params, ParamRef ref,
                                  double delta);

double grad_beta(const CostHamiltonian& h1, const QaoaParams& params, int k, const NoiseModel& noise,
                 const EvalMode& mode, const GradientEstimator& estimator);
double grad_gamma(const CostHamiltonian& h1, const QaoaParams& params, int k, const NoiseModel& noise,
                  const EvalMode& mode, const GradientEstimator& estimator);
/// <H2> gradients apply the estimator to the measured distribution and
/// combine it through d<H2>/dP; central_fd differences the loss itself.
double grad_b(const CostHamiltonian& h1, const QaoaParams& params, int i,
              const Eigen::Ref<const Eigen::VectorXd>& target, const NoiseModel& noise,
              const EvalMode& mode, const GradientEstimator& estimator);
double grad_w(const CostHamiltonian& h1, const QaoaParams& params, int i, int j,
              const Eigen::Ref<const Eigen::VectorXd>& target, const NoiseModel& noise,
              const EvalMode& mode, const GradientEstimator& estimator);

struct InnerResult {
  QaoaParams params;          // best seen
  double best_h1;
  std::vector<double> trace;  // <H1> before the first step and after each step
};

struct OuterResult {
  IsingModel model;           // best seen
  double best_h2;
  std::vector<double> trace;  // <H2> before the first step and after each step
};

/// `rng` feeds shot sampling; unused in exact mode.
InnerResult inner_loop(const CostHamiltonian& h1, const QaoaParams& params0, const TrainConfig& cfg,
                       const NoiseModel& noise, std::mt19937_64& rng);
OuterResult outer_loop(const IsingModel& model0, const QaoaParams& params,
                       const Eigen::Ref<const Eigen::VectorXd>& target, const TrainConfig& cfg,
                       const NoiseModel& noise, std::mt19937_64& rng);

struct IterationRecord {
  int iteration = 0;
  double h2 = 0.0;       // raw <H2> at the end of the iteration
  double best_h2 = 0.0;  // minimum observed so far
  std::vector<double> inner_h1;
  std::vector<double> outer_h2;
  IsingModel model;
  QaoaParams params;
  double seconds = 0.0;  // wall clock; not part of any deterministic output
};

struct TrainTrace {
  double initial_h2 = 0.0;
  std::vector<IterationRecord> iterations;

  /// Raw <H2> per global iteration, prefixed by the initial value.
  std::vector<double> raw_h2() const;
};

struct TrainResult {
  IsingModel model;
  QaoaParams params;
  double loss = 0.0;  // minimum <H2> observed; the returned triple attains it
  TrainTrace trace;
};

/// Random starting point drawn from the configured init ranges.
std::pair<IsingModel, QaoaParams> initial_parameters(int n_qubits, int layers, std::mt19937_64& rng,
                                                     const TrainConfig& cfg);

TrainResult bilevel_train(const Eigen::Ref<const Eigen::VectorXd>& target, int layers,
                          const TrainConfig& cfg, const NoiseModel& noise);

}  // namespace qbm::train
