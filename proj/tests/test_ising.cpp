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
#include "qbm/ising.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace qbm::ising;
namespace oracle = qbm::oracle;

TEST(IsingModel, PackedPairOrder) {
  IsingModel m(4);
  EXPECT_EQ(m.num_pairs(), 6);
  EXPECT_EQ(m.pair_index(0, 1), 0);
  EXPECT_EQ(m.pair_index(0, 3), 2);
  EXPECT_EQ(m.pair_index(1, 2), 3);
  EXPECT_EQ(m.pair_index(2, 3), 5);
  EXPECT_EQ(m.pair_index(3, 2), 5);
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = m.pair_at(k);
    EXPECT_EQ(m.pair_index(i, j), k);
  }
  m.set_coupling(2, 1, 0.7);
  EXPECT_EQ(m.coupling(1, 2), 0.7);
  EXPECT_THROW(m.pair_index(1, 1), IsingError);
  EXPECT_THROW(m.pair_index(0, 4), IsingError);
}

TEST(IsingModel, RejectsInconsistentSizes) {
  EXPECT_THROW(IsingModel(Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(5)), IsingError);
  EXPECT_THROW(IsingModel(0), IsingError);
}

TEST(SpinConfig, RejectsValuesOtherThanPlusMinusOne) {
  EXPECT_THROW(SpinConfig({1, 0, -1}), IsingError);
  EXPECT_THROW(SpinConfig::from_bitstring("10a1"), IsingError);
}

TEST(Energy, AllUpWithUniformCouplings) {
  Eigen::VectorXd b(4);
  b << 0.1, 0.2, 0.3, 0.4;
  const IsingModel m(b, Eigen::VectorXd::Constant(6, 0.05));
  EXPECT_NEAR(energy(m, SpinConfig::all(4, 1)), 1.3, 1e-15);
}

TEST(Energy, ZeroModelIsZeroEverywhere) {
  const IsingModel m(4);
  EXPECT_TRUE((energy_table(m).array() == 0.0).all());
}

TEST(Energy, MatchesTermByTermOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const IsingModel m = oracle::random_model(4, rng);
    const Eigen::VectorXd table = energy_table(m);
    for (std::size_t s = 0; s < 16; ++s) {
      EXPECT_EQ(energy(m, SpinConfig(oracle::spins_of(s, 4))), oracle::energy_sum(m, oracle::spins_of(s, 4)));
      EXPECT_NEAR(table(static_cast<Eigen::Index>(s)), oracle::energy_sum(m, oracle::spins_of(s, 4)), 1e-14);
    }
  }
}

TEST(Bitstrings, SpinToBitMapping) {
  EXPECT_EQ(SpinConfig({1, 1, 1, 1}).bitstring(), "0000");
  EXPECT_EQ(SpinConfig({-1, 1, 1, -1}).bitstring(), "1001");
  EXPECT_EQ(SpinConfig({-1, 1, 1, -1}).index(), 9U);
  EXPECT_EQ(bitstring_to_index("1001"), 9U);
  EXPECT_EQ(index_to_bitstring(9, 4), "1001");
}

TEST(Bitstrings, RoundTripAllConfigs) {
  for (std::size_t s = 0; s < 16; ++s) {
    const SpinConfig c = SpinConfig::from_index(s, 4);
    EXPECT_EQ(c.index(), s);
    EXPECT_EQ(SpinConfig::from_bitstring(c.bitstring()).values(), c.values());
    EXPECT_EQ(c.values(), oracle::spins_of(s, 4));
  }
}

TEST(PartitionFunction, ZeroModel) { EXPECT_NEAR(partition_function(IsingModel(4)), 16.0, 1e-12); }

TEST(PartitionFunction, SingleNodeClosedForm) {
  for (double t : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
    Eigen::VectorXd b(1);
    b << t;
    EXPECT_NEAR(partition_function(IsingModel(b, Eigen::VectorXd(0))), 2 * std::cosh(t), 1e-12);
  }
}

TEST(PartitionFunction, MatchesEnumerationOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const IsingModel m = oracle::random_model(4, rng, 2.0);
    double z = 0.0;
    for (std::size_t s = 0; s < 16; ++s) z += std::exp(-oracle::energy_sum(m, oracle::spins_of(s, 4)));
    EXPECT_NEAR(partition_function(m) / z, 1.0, 1e-12);
  }
}

TEST(Boltzmann, ZeroModelIsUniform) {
  const Eigen::VectorXd p = boltzmann_distribution(IsingModel(4));
  EXPECT_LT((p.array() - 1.0 / 16).abs().maxCoeff(), 1e-15);
}

TEST(Boltzmann, StrongNegativeBiasFavoursUp) {
  Eigen::VectorXd b(1);
  b << -10.0;
  EXPECT_GE(boltzmann_distribution(IsingModel(b, Eigen::VectorXd(0)))(0), 1.0 - 1e-8);
}

TEST(Boltzmann, MatchesEnumerationOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const IsingModel m = oracle::random_model(4, rng, 2.0);
    const Eigen::VectorXd p = boltzmann_distribution(m);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_LT((p - oracle::boltzmann(m)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Boltzmann, SurvivesLargeEnergies) {
  Eigen::VectorXd b = Eigen::VectorXd::Constant(4, 400.0);
  const Eigen::VectorXd p = boltzmann_distribution(IsingModel(b, Eigen::VectorXd::Zero(6)));
  EXPECT_NEAR(p(15), 1.0, 1e-12);
  EXPECT_TRUE(p.allFinite());
}

TEST(GroundStates, ZeroModelTiesEverything) { EXPECT_EQ(ground_states(IsingModel(4)).size(), 16U); }

TEST(GroundStates, PositiveBiasesGiveAllDown) {
  const IsingModel m(Eigen::VectorXd::Ones(4), Eigen::VectorXd::Zero(6));
  const auto g = ground_states(m);
  ASSERT_EQ(g.size(), 1U);
  EXPECT_EQ(g[0].bitstring(), "1111");
  EXPECT_EQ(energy(m, g[0]), -4.0);
}

TEST(GroundStates, MatchesEnumerationOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const IsingModel m = oracle::random_model(4, rng);
    double best = 1e300;
    for (std::size_t s = 0; s < 16; ++s) best = std::min(best, oracle::energy_sum(m, oracle::spins_of(s, 4)));
    std::vector<std::size_t> expected;
    for (std::size_t s = 0; s < 16; ++s) {
      if (oracle::energy_sum(m, oracle::spins_of(s, 4)) == best) expected.push_back(s);
    }
    std::vector<std::size_t> got;
    for (const auto& c : ground_states(m)) got.push_back(c.index());
    EXPECT_EQ(got, expected);
  }
}

TEST(Moments, ZeroModel) {
  const Moments mo = exact_moments(IsingModel(4));
  EXPECT_LT(mo.first.cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::MatrixXd off = mo.pair - Eigen::MatrixXd::Identity(4, 4);
  EXPECT_LT(off.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Moments, SingleNodeClosedForm) {
  for (double t : {-1.5, 0.2, 2.0}) {
    Eigen::VectorXd b(1);
    b << t;
    EXPECT_NEAR(exact_moments(IsingModel(b, Eigen::VectorXd(0))).first(0), -std::tanh(t), 1e-12);
  }
}

TEST(Moments, MatchesEnumerationOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const IsingModel m = oracle::random_model(4, rng);
    const Eigen::VectorXd p = oracle::boltzmann(m);
    Eigen::VectorXd first = Eigen::VectorXd::Zero(4);
    Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(4, 4);
    for (std::size_t s = 0; s < 16; ++s) {
      const auto x = oracle::spins_of(s, 4);
      for (int i = 0; i < 4; ++i) {
        first(i) += p(static_cast<Eigen::Index>(s)) * x[static_cast<std::size_t>(i)];
        for (int j = 0; j < 4; ++j) {
          pair(i, j) += p(static_cast<Eigen::Index>(s)) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        }
      }
    }
    const Moments mo = exact_moments(m);
    EXPECT_LT((mo.first - first).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((mo.pair - pair).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Enumeration, GuardsLargeModels) {
  EXPECT_THROW(partition_function(IsingModel(21)), IsingError);
  EXPECT_THROW(boltzmann_distribution(IsingModel(21)), IsingError);
  EXPECT_THROW(ground_states(IsingModel(21)), IsingError);
  EXPECT_NO_THROW(check_enumerable(20));
}

}  // namespace
