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

// Independent reference implementations used by the tests. Nothing here
// calls into the simulator; operators are built as explicit dense
// Kronecker products.

#pragma once

#include "qbm/ising.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace qbm::oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli(int k) {
  Mat m(2, 2);
  switch (k) {
    case 0:
      m << 1, 0, 0, 1;
      break;
    case 1:
      m << 0, 1, 1, 0;
      break;
    case 2:
      m << 0, cd(0, -1), cd(0, 1), 0;
      break;
    default:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

/// `op` on qubit q of n, identity elsewhere; qubit 0 is the leftmost factor.
inline Mat embed(const Mat& op, int q, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, k == q ? op : Mat::Identity(2, 2));
  return out;
}

/// Tensor product of single-qubit Paulis, one index (0=I,1=X,2=Y,3=Z) per qubit.
inline Mat pauli_string(const std::vector<int>& ks) {
  Mat out = Mat::Identity(1, 1);
  for (int k : ks) out = kron(out, pauli(k));
  return out;
}

/// exp(-i t P / 2) for an involutory P.
inline Mat rotation(const Mat& p, double t) {
  return std::cos(t / 2) * Mat::Identity(p.rows(), p.cols()) - cd(0, 1) * std::sin(t / 2) * p;
}

inline Mat hadamard() {
  Mat h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

/// H1 = sum_i b_i Z_i + sum_{i<j} w_ij Z_i Z_j as a dense matrix.
inline Mat cost_operator(const ising::IsingModel& m) {
  const int n = m.n();
  Mat h = Mat::Zero(1 << n, 1 << n);
  for (int i = 0; i < n; ++i) h += m.bias(i) * embed(pauli(3), i, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) h += m.coupling(i, j) * embed(pauli(3), i, n) * embed(pauli(3), j, n);
  }
  return h;
}

/// exp(i beta H0) exp(i gamma H1) ... applied to the Hadamard state.
inline Vec qaoa_state(const ising::IsingModel& m, const Eigen::VectorXd& beta, const Eigen::VectorXd& gamma) {
  const int n = m.n();
  Mat h_all = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) h_all = kron(h_all, hadamard());
  Vec psi = Vec::Zero(1 << n);
  psi(0) = 1;
  psi = h_all * psi;
  const Mat h1 = cost_operator(m);
  for (Eigen::Index layer = 0; layer < beta.size(); ++layer) {
    // H1 is diagonal, so its exponential is entrywise.
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) *= std::exp(cd(0, gamma(layer) * h1(i, i).real()));
    // exp(i beta sum X) factorises into cos(beta) I + i sin(beta) X per qubit.
    Mat mixer = Mat::Identity(1, 1);
    for (int k = 0; k < n; ++k) {
      mixer = kron(mixer, std::cos(beta(layer)) * Mat::Identity(2, 2) + cd(0, 1) * std::sin(beta(layer)) * pauli(1));
    }
    psi = mixer * psi;
  }
  return psi;
}

/// Depolarizing channel as an explicit Pauli sum: each of the d^2 Paulis on
/// the target qubits, identity included, is applied with weight p/d^2.
inline Mat depolarize(const Mat& rho, const std::vector<int>& qubits, double p, int n) {
  const int k = static_cast<int>(qubits.size());
  const int count = 1 << (2 * k);
  Mat sum = Mat::Zero(rho.rows(), rho.cols());
  for (int code = 0; code < count; ++code) {
    std::vector<int> ks(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < k; ++t) ks[static_cast<std::size_t>(qubits[static_cast<std::size_t>(t)])] = (code >> (2 * t)) & 3;
    const Mat p_op = pauli_string(ks);
    sum += p_op * rho * p_op.adjoint();
  }
  return (1.0 - p) * rho + (p / count) * sum;
}

inline double energy_sum(const ising::IsingModel& m, const std::vector<int>& x) {
  double e = 0.0;
  for (int i = 0; i < m.n(); ++i) e += m.bias(i) * x[static_cast<std::size_t>(i)];
  for (int i = 0; i < m.n(); ++i) {
    for (int j = i + 1; j < m.n(); ++j) e += m.coupling(i, j) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
  }
  return e;
}

/// Spins for basis index `idx`: bit 0 (the leading character) is qubit 0, 0 -> +1.
inline std::vector<int> spins_of(std::size_t idx, int n) {
  std::vector<int> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = ((idx >> (n - 1 - i)) & 1U) ? -1 : 1;
  return x;
}

/// Boltzmann distribution by plain exponentials, no shifting.
inline Eigen::VectorXd boltzmann(const ising::IsingModel& m) {
  const std::size_t dim = std::size_t{1} << m.n();
  Eigen::VectorXd w(static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) w(static_cast<Eigen::Index>(s)) = std::exp(-energy_sum(m, spins_of(s, m.n())));
  return w / w.sum();
}

inline ising::IsingModel random_model(int n, std::mt19937_64& rng, double range = 1.0) {
  std::uniform_real_distribution<double> u(-range, range);
  ising::IsingModel m(n);
  for (int i = 0; i < n; ++i) m.biases()(i) = u(rng);
  for (int k = 0; k < m.num_pairs(); ++k) m.couplings()(k) = u(rng);
  return m;
}

inline double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

}  // namespace qbm::oracle
