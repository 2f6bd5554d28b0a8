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

#include "oracles.hpp"
#include "qbm/train.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

namespace {

using namespace qbm::train;
namespace oracle = qbm::oracle;
using qbm::qaoa::expected_h1;
using qbm::qaoa::mse_loss_h2;

constexpr double kFdStep = 1e-5;

IsingModel single_node(double b) {
  Eigen::VectorXd bias(1);
  bias << b;
  return IsingModel(bias, Eigen::VectorXd(0));
}

QaoaParams angles(double beta, double gamma) {
  return {Eigen::VectorXd::Constant(1, beta), Eigen::VectorXd::Constant(1, gamma)};
}

Eigen::VectorXd target_of(std::size_t idx, int n) {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
  t(static_cast<Eigen::Index>(idx)) = 1.0;
  return t;
}

const EvalMode kExact = EvalMode::exact();

TEST(Gradient, MethodNamesRoundTrip) {
  for (auto m : {GradientMethod::global_shift, GradientMethod::gate_shift, GradientMethod::central_fd}) {
    EXPECT_EQ(gradient_method_from_string(to_string(m)), m);
  }
  EXPECT_THROW(gradient_method_from_string("adam"), std::invalid_argument);
}

TEST(Gradient, ZeroHamiltonianHasZeroGradients) {
  const CostHamiltonian h1{IsingModel(4)};
  std::mt19937_64 rng(1);
  const QaoaParams params{Eigen::VectorXd::Constant(1, 0.4), Eigen::VectorXd::Constant(1, -0.7)};
  for (auto est : {GradientEstimator::global_shift(), GradientEstimator::gate_shift()}) {
    EXPECT_NEAR(grad_beta(h1, params, 0, NoiseModel{}, kExact, est), 0.0, 1e-14);
    EXPECT_NEAR(grad_gamma(h1, params, 0, NoiseModel{}, kExact, est), 0.0, 1e-14);
  }
}

// Single-Pauli instance: H1 = b Z on one qubit, p = 1.
TEST(Gradient, SingleQubitShiftRuleMatchesFiniteDifference) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto fd = GradientEstimator::central_fd(kFdStep);
  const auto shift = GradientEstimator::gate_shift();
  for (int t = 0; t < 25; ++t) {
    const CostHamiltonian h1(single_node(u(rng)));
    const QaoaParams params = angles(u(rng), u(rng));
    const Eigen::VectorXd target = target_of(static_cast<std::size_t>(t % 2), 1);
    for (const NoiseModel& noise : {NoiseModel{}, NoiseModel{0.02, 0.0}}) {
      EXPECT_NEAR(grad_beta(h1, params, 0, noise, kExact, shift), grad_beta(h1, params, 0, noise, kExact, fd), 1e-6);
      EXPECT_NEAR(grad_gamma(h1, params, 0, noise, kExact, shift), grad_gamma(h1, params, 0, noise, kExact, fd), 1e-6);
      EXPECT_NEAR(grad_b(h1, params, 0, target, noise, kExact, shift), grad_b(h1, params, 0, target, noise, kExact, fd),
                  1e-6);
    }
  }
}

TEST(Gradient, FiniteDifferenceMatchesDirectDifference) {
  const CostHamiltonian h1(single_node(0.8));
  const QaoaParams params = angles(0.3, -0.4);
  const double direct = (expected_h1(h1, angles(0.3 + kFdStep, -0.4), NoiseModel{}) -
                         expected_h1(h1, angles(0.3 - kFdStep, -0.4), NoiseModel{})) /
                        (2 * kFdStep);
  EXPECT_NEAR(grad_beta(h1, params, 0, NoiseModel{}, kExact, GradientEstimator::central_fd(kFdStep)), direct, 1e-12);
}

// With the mixer written as RX(-2 beta), a whole-parameter shift of
// +-pi/2 moves every RX angle by pi, a symmetry of the loss. The verbatim
// global shift therefore reports a zero beta gradient.
TEST(Gradient, GlobalShiftBetaGradientVanishes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto shift = GradientEstimator::global_shift();
  const auto fd = GradientEstimator::central_fd(kFdStep);
  double largest_fd = 0.0;
  for (int t = 0; t < 10; ++t) {
    const CostHamiltonian h1(oracle::random_model(4, rng));
    const QaoaParams params = angles(u(rng), u(rng));
    EXPECT_NEAR(grad_beta(h1, params, 0, NoiseModel{}, kExact, shift), 0.0, 1e-12);
    largest_fd = std::max(largest_fd, std::abs(grad_beta(h1, params, 0, NoiseModel{}, kExact, fd)));
  }
  EXPECT_GT(largest_fd, 1e-2);
}

TEST(Gradient, GateShiftIsExactOnFourQubits) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto fd = GradientEstimator::central_fd(kFdStep);
  const auto shift = GradientEstimator::gate_shift();
  for (int t = 0; t < 5; ++t) {
    const CostHamiltonian h1(oracle::random_model(4, rng));
    const QaoaParams params{Eigen::Vector2d(u(rng), u(rng)), Eigen::Vector2d(u(rng), u(rng))};
    const Eigen::VectorXd target = target_of(9, 4);
    for (const NoiseModel& noise : {NoiseModel{}, NoiseModel{0.01, 0.04}}) {
      for (int k = 0; k < 2; ++k) {
        EXPECT_NEAR(grad_beta(h1, params, k, noise, kExact, shift), grad_beta(h1, params, k, noise, kExact, fd), 1e-6);
        EXPECT_NEAR(grad_gamma(h1, params, k, noise, kExact, shift), grad_gamma(h1, params, k, noise, kExact, fd),
                    1e-6);
      }
      for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(grad_b(h1, params, i, target, noise, kExact, shift),
                    grad_b(h1, params, i, target, noise, kExact, fd), 1e-6);
      }
      EXPECT_NEAR(grad_w(h1, params, 1, 3, target, noise, kExact, shift),
                  grad_w(h1, params, 1, 3, target, noise, kExact, fd), 1e-6);
    }
  }
}

TEST(Gradient, UniformTargetFixedPoint) {
  std::mt19937_64 rng(5);
  const CostHamiltonian h1(oracle::random_model(4, rng));
  const QaoaParams params = angles(0.6, 0.0);
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(16, 1.0 / 16);
  for (auto est : {GradientEstimator::global_shift(), GradientEstimator::gate_shift()}) {
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(grad_b(h1, params, i, uniform, NoiseModel{}, kExact, est), 0.0, 1e-14);
  }
}

TEST(Gradient, RejectsBadIndices) {
  const CostHamiltonian h1{IsingModel(2)};
  const QaoaParams params = angles(0.1, 0.2);
  const Eigen::VectorXd t = target_of(0, 2);
  EXPECT_THROW(grad_beta(h1, params, 1, NoiseModel{}, kExact, GradientEstimator{}), std::out_of_range);
  EXPECT_THROW(grad_b(h1, params, 2, t, NoiseModel{}, kExact, GradientEstimator{}), std::out_of_range);
  EXPECT_THROW(grad_w(h1, params, 0, 0, t, NoiseModel{}, kExact, GradientEstimator{}), qbm::ising::IsingError);
}

TEST(InnerLoop, StationaryPointStopsWithinWindow) {
  const CostHamiltonian h1{IsingModel(4)};
  TrainConfig cfg;
  std::mt19937_64 rng(6);
  const QaoaParams params = angles(0.2, 0.3);
  const InnerResult r = inner_loop(h1, params, cfg, NoiseModel{}, rng);
  EXPECT_LE(r.trace.size(), 6U);
  EXPECT_EQ(r.params, params);
}

TEST(InnerLoop, ZeroRateKeepsTraceConstant) {
  std::mt19937_64 rng(7);
  const CostHamiltonian h1(oracle::random_model(4, rng));
  TrainConfig cfg;
  cfg.eta2 = 0.0;
  const InnerResult r = inner_loop(h1, angles(0.2, 0.3), cfg, NoiseModel{}, rng);
  for (double v : r.trace) EXPECT_EQ(v, r.trace.front());
}

TEST(InnerLoop, ReturnsBestSeen) {
  std::mt19937_64 rng(8);
  const CostHamiltonian h1(oracle::random_model(4, rng));
  TrainConfig cfg;
  cfg.eta2 = 0.3;
  const InnerResult r = inner_loop(h1, angles(0.2, 0.3), cfg, NoiseModel{}, rng);
  EXPECT_EQ(r.best_h1, *std::min_element(r.trace.begin(), r.trace.end()));
  EXPECT_DOUBLE_EQ(expected_h1(h1, r.params, NoiseModel{}), r.best_h1);
}

TEST(InnerLoop, FindsTheGroundStateOfPositiveBiases) {
  const CostHamiltonian h1(IsingModel(Eigen::VectorXd::Ones(4), Eigen::VectorXd::Zero(6)));
  TrainConfig cfg;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const QaoaParams start = initial_parameters(4, 1, rng, cfg).second;
    const InnerResult r = inner_loop(h1, start, cfg, NoiseModel{}, rng);
    Eigen::Index best = 0;
    qbm::qaoa::final_probabilities(h1, r.params, NoiseModel{}).maxCoeff(&best);
    if (best == 15) ++hits;
  }
  EXPECT_GE(hits, 18);
}

TEST(OuterLoop, ZeroRateKeepsModel) {
  std::mt19937_64 rng(9);
  const IsingModel m = oracle::random_model(4, rng);
  TrainConfig cfg;
  cfg.eta3 = 0.0;
  const OuterResult r = outer_loop(m, angles(0.5, 0.4), target_of(9, 4), cfg, NoiseModel{}, rng);
  EXPECT_EQ(r.model, m);
}

TEST(OuterLoop, SingleStepArithmetic) {
  const IsingModel m = single_node(0.3);
  const QaoaParams params = angles(0.7, 0.9);
  const Eigen::VectorXd target = target_of(1, 1);
  TrainConfig cfg;
  cfg.outer_max_steps = 1;
  cfg.eta3 = 0.5;
  std::mt19937_64 rng(10);
  const OuterResult r = outer_loop(m, params, target, cfg, NoiseModel{}, rng);
  // Oracle: derivative of the closed-form loss by central difference.
  auto loss = [&](double b) { return mse_loss_h2(CostHamiltonian(single_node(b)), params, target, NoiseModel{}); };
  const double grad = (loss(0.3 + kFdStep) - loss(0.3 - kFdStep)) / (2 * kFdStep);
  ASSERT_EQ(r.trace.size(), 2U);
  EXPECT_NEAR(r.trace[1], loss(0.3 - 0.5 * grad), 1e-9);
  if (r.trace[1] < r.trace[0]) EXPECT_NEAR(r.model.bias(0), 0.3 - 0.5 * grad, 1e-8);
}

TEST(OuterLoop, BestSeenIsTheTraceMinimum) {
  std::mt19937_64 rng(11);
  const IsingModel m = oracle::random_model(4, rng, 0.3);
  TrainConfig cfg;
  cfg.eta3 = 50.0;
  const OuterResult r = outer_loop(m, angles(0.6, 0.5), target_of(9, 4), cfg, NoiseModel{}, rng);
  EXPECT_EQ(r.best_h2, *std::min_element(r.trace.begin(), r.trace.end()));
  EXPECT_LE(r.best_h2, r.trace.front());
}

TEST(Bilevel, ZeroIterationsReturnsInitialParameters) {
  TrainConfig cfg;
  cfg.global_max_iters = 0;
  cfg.seed = 12;
  const Eigen::VectorXd target = target_of(9, 4);
  const TrainResult r = bilevel_train(target, 1, cfg, NoiseModel{});
  std::mt19937_64 rng(cfg.seed);
  const auto [model, params] = initial_parameters(4, 1, rng, cfg);
  EXPECT_EQ(r.model, model);
  EXPECT_EQ(r.params, params);
  EXPECT_EQ(r.loss, mse_loss_h2(CostHamiltonian(model), params, target, NoiseModel{}));
  EXPECT_TRUE(r.trace.iterations.empty());
}

TEST(Bilevel, SameSeedSameResult) {
  TrainConfig cfg;
  cfg.seed = 13;
  cfg.global_max_iters = 5;
  const Eigen::VectorXd target = target_of(9, 4);
  const TrainResult a = bilevel_train(target, 1, cfg, NoiseModel{});
  const TrainResult b = bilevel_train(target, 1, cfg, NoiseModel{});
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.trace.raw_h2(), b.trace.raw_h2());
}

TEST(Bilevel, LearnsOnePointTarget) {
  TrainConfig cfg;
  cfg.seed = 14;
  const TrainResult r = bilevel_train(target_of(9, 4), 1, cfg, NoiseModel{});
  const Eigen::VectorXd p = qbm::qaoa::final_probabilities(CostHamiltonian(r.model), r.params, NoiseModel{});
  EXPECT_GT(p(9), 0.9);
  EXPECT_EQ(r.loss, mse_loss_h2(CostHamiltonian(r.model), r.params, target_of(9, 4), NoiseModel{}));
  const auto raw = r.trace.raw_h2();
  double running = raw.front();
  for (std::size_t k = 0; k < r.trace.iterations.size(); ++k) {
    running = std::min(running, raw[k + 1]);
    EXPECT_EQ(r.trace.iterations[k].best_h2, running);
  }
}

TEST(Bilevel, ShotModeIsDeterministicPerSeed) {
  TrainConfig cfg;
  cfg.seed = 15;
  cfg.shots = 200;
  cfg.global_max_iters = 2;
  const TrainResult a = bilevel_train(target_of(9, 4), 1, cfg, NoiseModel{});
  const TrainResult b = bilevel_train(target_of(9, 4), 1, cfg, NoiseModel{});
  EXPECT_EQ(a.trace.raw_h2(), b.trace.raw_h2());
}

// Ten-shot modal decoding on a block trained under (0.5%, 2%) noise.
TEST(Bilevel, TenShotModeOfTrainedNoisyBlock) {
  TrainConfig cfg;
  cfg.seed = 16;
  const NoiseModel noise{0.005, 0.02};
  const TrainResult r = bilevel_train(target_of(9, 4), 1, cfg, noise);
  const Eigen::VectorXd p = qbm::qaoa::final_probabilities(CostHamiltonian(r.model), r.params, noise);
  Eigen::Index argmax = 0;
  ASSERT_GE(p.maxCoeff(&argmax), 0.6);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::mt19937_64 rng(seed);
    if (qbm::qaoa::modal_outcome(qbm::qsim::sample_counts(p, 10, rng)) == static_cast<std::size_t>(argmax)) ++hits;
  }
  EXPECT_GE(hits, 990);
}

TEST(TrainConfig, ValidateRejectsBadValues) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eta2 = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.inner_max_steps = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.shots = -5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.gradient = GradientEstimator::central_fd(0.0);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

}  // namespace
