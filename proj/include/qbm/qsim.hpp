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

// Gate-level simulator with a pure-state backend, a density-matrix backend
// and per-gate depolarizing noise.
//
// Basis ordering: qubit 0 is the most significant bit of a basis index, so
// for 4 qubits the string "1001" (qubit 0 first) is index 9.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qbm::qsim {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using AmplitudeVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using ComplexMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ProbabilityVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

enum class GateKind { hadamard, rx, rz, rzz };

/// One gate of the native set. Rotations follow RX(t) = exp(-i t X / 2),
/// RZ(t) = exp(-i t Z / 2), RZZ(t) = exp(-i t Z⊗Z / 2).
struct Gate {
  GateKind kind = GateKind::hadamard;
  double angle = 0.0;
  int qubit = 0;
  int other = -1;  // second qubit, RZZ only

  static Gate h(int q) { return {GateKind::hadamard, 0.0, q, -1}; }
  static Gate rx(double angle, int q) { return {GateKind::rx, angle, q, -1}; }
  static Gate rz(double angle, int q) { return {GateKind::rz, angle, q, -1}; }
  static Gate rzz(double angle, int q1, int q2) { return {GateKind::rzz, angle, q1, q2}; }

  bool two_qubit() const { return kind == GateKind::rzz; }
  friend bool operator==(const Gate&, const Gate&) = default;
};

struct NoiseModel {
  double p1 = 0.0;  // after every single-qubit gate
  double p2 = 0.0;  // after every two-qubit gate

  bool noiseless() const { return p1 == 0.0 && p2 == 0.0; }
  void validate() const {
    if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
      throw SimulationError("depolarizing probabilities must lie in [0, 1]");
    }
  }
  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

enum class Backend { pure, mixed };

inline std::size_t dimension_of(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 16) {
    throw SimulationError("qubit count must be in [1, 16], got " + std::to_string(n_qubits));
  }
  return std::size_t{1} << n_qubits;
}

/// Bit mask selecting `qubit` inside a basis index.
inline std::size_t qubit_mask(int n_qubits, int qubit) {
  return std::size_t{1} << (n_qubits - 1 - qubit);
}

/// Pure state of `n_qubits` qubits, 2^n amplitudes.
template <typename Real>
class BasicStateVector {
 public:
  explicit BasicStateVector(int n_qubits)
      : n_qubits_(n_qubits), amplitudes_(AmplitudeVector<Real>::Zero(dimension_of(n_qubits))) {
    amplitudes_(0) = Complex<Real>(1);
  }

  BasicStateVector(int n_qubits, AmplitudeVector<Real> amplitudes)
      : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != dimension_of(n_qubits)) {
      throw SimulationError("amplitude vector length must be 2^n_qubits");
    }
  }

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const AmplitudeVector<Real>& amplitudes() const { return amplitudes_; }
  AmplitudeVector<Real>& amplitudes() { return amplitudes_; }

 private:
  int n_qubits_;
  AmplitudeVector<Real> amplitudes_;
};

/// Mixed state as a full 2^n x 2^n matrix.
template <typename Real>
class BasicDensityMatrix {
 public:
  explicit BasicDensityMatrix(int n_qubits)
      : n_qubits_(n_qubits),
        entries_(ComplexMatrix<Real>::Zero(dimension_of(n_qubits), dimension_of(n_qubits))) {
    entries_(0, 0) = Complex<Real>(1);
  }

  BasicDensityMatrix(int n_qubits, ComplexMatrix<Real> entries)
      : n_qubits_(n_qubits), entries_(std::move(entries)) {
    const auto d = static_cast<Eigen::Index>(dimension_of(n_qubits));
    if (entries_.rows() != d || entries_.cols() != d) {
      throw SimulationError("density matrix must be 2^n x 2^n");
    }
  }

  static BasicDensityMatrix from_pure(const BasicStateVector<Real>& psi) {
    return BasicDensityMatrix(psi.n_qubits(), psi.amplitudes() * psi.amplitudes().adjoint());
  }

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const ComplexMatrix<Real>& entries() const { return entries_; }
  ComplexMatrix<Real>& entries() { return entries_; }

 private:
  int n_qubits_;
  ComplexMatrix<Real> entries_;
};

using StateVector = BasicStateVector<double>;
using DensityMatrix = BasicDensityMatrix<double>;
using Register = std::variant<StateVector, DensityMatrix>;

namespace detail {

inline void check_gate(const Gate& g, int n_qubits) {
  auto in_range = [n_qubits](int q) { return q >= 0 && q < n_qubits; };
  if (!in_range(g.qubit)) {
    throw SimulationError("gate qubit index " + std::to_string(g.qubit) + " out of range");
  }
  if (g.two_qubit()) {
    if (!in_range(g.other)) {
      throw SimulationError("gate qubit index " + std::to_string(g.other) + " out of range");
    }
    if (g.other == g.qubit) throw SimulationError("RZZ needs two distinct qubits");
  }
}

template <typename Real>
Eigen::Matrix<Complex<Real>, 2, 2> single_qubit_matrix(const Gate& g) {
  using C = Complex<Real>;
  Eigen::Matrix<C, 2, 2> u;
  const Real c = std::cos(static_cast<Real>(g.angle) / 2);
  const Real s = std::sin(static_cast<Real>(g.angle) / 2);
  switch (g.kind) {
    case GateKind::hadamard: {
      const Real r = Real(1) / std::sqrt(Real(2));
      u << C(r), C(r), C(r), C(-r);
      break;
    }
    case GateKind::rx:
      u << C(c), C(0, -s), C(0, -s), C(c);
      break;
    case GateKind::rz:
      u << C(c, -s), C(0), C(0), C(c, s);
      break;
    case GateKind::rzz:
      throw SimulationError("RZZ is not a single-qubit gate");
  }
  return u;
}

// Phase e^{-i t/2} on even parity of the two bits, e^{+i t/2} on odd parity.
template <typename Real>
Complex<Real> rzz_phase(const Gate& g, std::size_t index, int n_qubits) {
  const bool a = (index & qubit_mask(n_qubits, g.qubit)) != 0;
  const bool b = (index & qubit_mask(n_qubits, g.other)) != 0;
  const Real half = static_cast<Real>(g.angle) / 2;
  return std::polar(Real(1), a == b ? -half : half);
}

}  // namespace detail

/// Unitary of `g` on its own qubits: 2x2 for single-qubit gates, 4x4 for
/// RZZ with the first listed qubit as the high bit.
template <typename Real = double>
ComplexMatrix<Real> gate_matrix(const Gate& g) {
  if (!g.two_qubit()) return detail::single_qubit_matrix<Real>(g);
  ComplexMatrix<Real> u = ComplexMatrix<Real>::Zero(4, 4);
  Gate local = g;
  local.qubit = 0;
  local.other = 1;
  for (std::size_t k = 0; k < 4; ++k) u(k, k) = detail::rzz_phase<Real>(local, k, 2);
  return u;
}

template <typename Real>
void apply_gate(BasicStateVector<Real>& reg, const Gate& g) {
  const int n = reg.n_qubits();
  detail::check_gate(g, n);
  auto& a = reg.amplitudes();
  const std::size_t dim = reg.dim();
  if (g.two_qubit()) {
    for (std::size_t i = 0; i < dim; ++i) a(i) *= detail::rzz_phase<Real>(g, i, n);
    return;
  }
  const auto u = detail::single_qubit_matrix<Real>(g);
  const std::size_t mask = qubit_mask(n, g.qubit);
  for (std::size_t i0 = 0; i0 < dim; ++i0) {
    if (i0 & mask) continue;
    const std::size_t i1 = i0 | mask;
    const Complex<Real> x0 = a(i0);
    const Complex<Real> x1 = a(i1);
    a(i0) = u(0, 0) * x0 + u(0, 1) * x1;
    a(i1) = u(1, 0) * x0 + u(1, 1) * x1;
  }
}

template <typename Real>
void apply_gate(BasicDensityMatrix<Real>& reg, const Gate& g) {
  const int n = reg.n_qubits();
  detail::check_gate(g, n);
  auto& rho = reg.entries();
  const auto dim = static_cast<Eigen::Index>(reg.dim());
  if (g.two_qubit()) {
    AmplitudeVector<Real> phase(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      phase(i) = detail::rzz_phase<Real>(g, static_cast<std::size_t>(i), n);
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      const Complex<Real> pc = std::conj(phase(c));
      for (Eigen::Index r = 0; r < dim; ++r) rho(r, c) *= phase(r) * pc;
    }
    return;
  }
  const auto u = detail::single_qubit_matrix<Real>(g);
  const auto mask = static_cast<Eigen::Index>(qubit_mask(n, g.qubit));
  // rho <- U rho
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r0 = 0; r0 < dim; ++r0) {
      if (r0 & mask) continue;
      const Eigen::Index r1 = r0 | mask;
      const Complex<Real> x0 = rho(r0, c);
      const Complex<Real> x1 = rho(r1, c);
      rho(r0, c) = u(0, 0) * x0 + u(0, 1) * x1;
      rho(r1, c) = u(1, 0) * x0 + u(1, 1) * x1;
    }
  }
  // rho <- rho U^dagger
  const auto ud = u.adjoint().eval();
  for (Eigen::Index c0 = 0; c0 < dim; ++c0) {
    if (c0 & mask) continue;
    const Eigen::Index c1 = c0 | mask;
    for (Eigen::Index r = 0; r < dim; ++r) {
      const Complex<Real> x0 = rho(r, c0);
      const Complex<Real> x1 = rho(r, c1);
      rho(r, c0) = x0 * ud(0, 0) + x1 * ud(1, 0);
      rho(r, c1) = x0 * ud(0, 1) + x1 * ud(1, 1);
    }
  }
}

/// Depolarizing channel on one or two qubits:
///   rho -> (1 - p) rho + p (I/d ⊗ Tr_sub rho),  d = 2^k for k target qubits.
/// Equivalently each of the d^2 - 1 non-identity Paulis is applied with
/// probability p / d^2, so p = 1 yields the maximally mixed subsystem.
template <typename Real>
void apply_depolarizing(BasicDensityMatrix<Real>& reg, std::span<const int> qubits, double p) {
  const int n = reg.n_qubits();
  if (qubits.size() != 1 && qubits.size() != 2) {
    throw SimulationError("depolarizing acts on one or two qubits");
  }
  for (int q : qubits) {
    if (q < 0 || q >= n) throw SimulationError("noise qubit index " + std::to_string(q) + " out of range");
  }
  if (qubits.size() == 2 && qubits[0] == qubits[1]) {
    throw SimulationError("two-qubit depolarizing needs distinct qubits");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw SimulationError("depolarizing probability must lie in [0, 1]");
  if (p == 0.0) return;

  auto& rho = reg.entries();
  const auto dim = static_cast<Eigen::Index>(reg.dim());
  Eigen::Index sub_mask = 0;
  for (int q : qubits) sub_mask |= static_cast<Eigen::Index>(qubit_mask(n, q));
  const Real sub_dim = qubits.size() == 1 ? Real(2) : Real(4);

  // Sub-blocks with equal target bits on both sides receive p/d * Tr_sub.
  ComplexMatrix<Real> out = rho * static_cast<Real>(1.0 - p);
  std::vector<Eigen::Index> sub_patterns;
  for (Eigen::Index s = 0; s < dim; ++s) {
    if ((s & ~sub_mask) == 0) sub_patterns.push_back(s);
  }
  const Real weight = static_cast<Real>(p) / sub_dim;
  for (Eigen::Index c = 0; c < dim; ++c) {
    if (c & sub_mask) continue;
    for (Eigen::Index r = 0; r < dim; ++r) {
      if (r & sub_mask) continue;
      Complex<Real> trace(0);
      for (Eigen::Index s : sub_patterns) trace += rho(r | s, c | s);
      const Complex<Real> add = weight * trace;
      for (Eigen::Index s : sub_patterns) out(r | s, c | s) += add;
    }
  }
  rho = std::move(out);
}

template <typename Real>
void apply_depolarizing(BasicDensityMatrix<Real>& reg, std::initializer_list<int> qubits, double p) {
  apply_depolarizing(reg, std::span<const int>(qubits.begin(), qubits.size()), p);
}

namespace detail {

template <typename Real>
void run_gates(BasicStateVector<Real>& reg, std::span<const Gate> gates) {
  for (const Gate& g : gates) apply_gate(reg, g);
}

template <typename Real>
void run_gates(BasicDensityMatrix<Real>& reg, std::span<const Gate> gates, const NoiseModel& noise) {
  for (const Gate& g : gates) {
    apply_gate(reg, g);
    if (g.two_qubit()) {
      if (noise.p2 > 0.0) apply_depolarizing(reg, {g.qubit, g.other}, noise.p2);
    } else if (noise.p1 > 0.0) {
      apply_depolarizing(reg, {g.qubit}, noise.p1);
    }
  }
}

}  // namespace detail

/// Runs `gates` on |0...0>. Each single-qubit gate is followed by a p1
/// channel on its qubit and each RZZ by a p2 channel on its pair.
inline Register run_circuit(std::span<const Gate> gates, int n_qubits, const NoiseModel& noise,
                            Backend backend) {
  noise.validate();
  if (backend == Backend::pure) {
    if (!noise.noiseless()) throw SimulationError("noise requires the mixed-state backend");
    StateVector psi(n_qubits);
    detail::run_gates(psi, gates);
    return psi;
  }
  DensityMatrix rho(n_qubits);
  detail::run_gates(rho, gates, noise);
  return rho;
}

template <typename Real>
ProbabilityVector<Real> probabilities(const BasicStateVector<Real>& reg) {
  return reg.amplitudes().cwiseAbs2();
}

template <typename Real>
ProbabilityVector<Real> probabilities(const BasicDensityMatrix<Real>& reg) {
  ProbabilityVector<Real> p = reg.entries().diagonal().real();
  // Roundoff can leave entries a hair below zero.
  return p.cwiseMax(Real(0));
}

inline Eigen::VectorXd probabilities(const Register& reg) {
  return std::visit([](const auto& r) -> Eigen::VectorXd { return probabilities(r); }, reg);
}

/// Multinomial draw of `shots` outcomes from `probs`, as a sequence of
/// conditional binomials so the result depends only on the RNG state.
inline std::vector<std::int64_t> sample_counts(const Eigen::Ref<const Eigen::VectorXd>& probs,
                                               std::int64_t shots, std::mt19937_64& rng) {
  if (shots < 1) throw SimulationError("shot count must be at least 1");
  if (probs.size() == 0) throw SimulationError("empty probability vector");
  if ((probs.array() < -1e-12).any() || std::abs(probs.sum() - 1.0) > 1e-9) {
    throw SimulationError("probabilities must be nonnegative and sum to 1");
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(probs.size()), 0);
  std::int64_t remaining = shots;
  double mass_left = 1.0;
  for (Eigen::Index i = 0; i < probs.size() && remaining > 0; ++i) {
    const double pi = std::max(0.0, probs(i));
    if (i + 1 == probs.size() || pi >= mass_left) {
      counts[static_cast<std::size_t>(i)] = remaining;
      remaining = 0;
      break;
    }
    const double q = mass_left > 0.0 ? std::clamp(pi / mass_left, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> draw(remaining, q);
    const std::int64_t k = draw(rng);
    counts[static_cast<std::size_t>(i)] = k;
    remaining -= k;
    mass_left -= pi;
  }
  return counts;
}

}  // namespace qbm::qsim
