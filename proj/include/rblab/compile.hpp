// Copyright 2026 The rblab Authors
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

#pragma once

/**
 * @file compile.hpp
 * Decomposition of sampled group elements into U1/U2/U3, CNOT, iSWAP and
 * native gates, so noise can be attached per elementary gate.
 *
 * Two-qubit unitaries go through a magic-basis Cartan (KAK) decomposition
 *   U = phase * (A0 kron A1) * exp(i(a XX + b YY + c ZZ)) * (B0 kron B1)
 * and a fixed three-CNOT realisation of the canonical core. Two-qubit
 * Cliffords can instead be compiled from their canonical class structure,
 * which uses 0, 1, 2 or 3 CNOTs.
 */

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rblab/groups.hpp"
#include "rblab/noise.hpp"
#include "rblab/qcore.hpp"

namespace rblab {

inline Matrix u1_matrix(double lambda) {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = std::polar(1.0, lambda);
  return m;
}

inline Matrix u3_matrix(double theta, double phi, double lambda) {
  Matrix m(2, 2);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  m(0, 0) = c;
  m(0, 1) = -std::polar(1.0, lambda) * s;
  m(1, 0) = std::polar(1.0, phi) * s;
  m(1, 1) = std::polar(1.0, phi + lambda) * c;
  return m;
}

inline Matrix u2_matrix(double phi, double lambda) {
  Matrix m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = -std::polar(1.0, lambda);
  m(1, 0) = std::polar(1.0, phi);
  m(1, 1) = std::polar(1.0, phi + lambda);
  return m / std::numbers::sqrt2;
}

struct ElementaryGate {
  GateKind kind = GateKind::U1;
  /// U1: {lambda}; U2: {phi, lambda}; U3: {theta, phi, lambda}; NATIVE XY: {theta}.
  std::vector<double> params;
  std::vector<int> qubits;
  /// NATIVE only: the ideal unitary and the recipe key its noise comes from.
  Matrix unitary;
  GateKind noise_tag = GateKind::NATIVE;

  Matrix matrix() const {
    switch (kind) {
      case GateKind::U1: return u1_matrix(params.at(0));
      case GateKind::U2: return u2_matrix(params.at(0), params.at(1));
      case GateKind::U3: return u3_matrix(params.at(0), params.at(1), params.at(2));
      case GateKind::CNOT: return cnot(0, 1);
      case GateKind::ISWAP: return iswap();
      case GateKind::XY: return xy(params.at(0));
      default: return unitary;
    }
  }

  static ElementaryGate cnot_gate(int control, int target) {
    return {GateKind::CNOT, {}, {control, target}, {}, GateKind::NATIVE};
  }
  static ElementaryGate iswap_gate(int q0, int q1) {
    return {GateKind::ISWAP, {}, {q0, q1}, {}, GateKind::NATIVE};
  }
  static ElementaryGate native(const Matrix& u, std::vector<int> qubits,
                               GateKind tag, std::vector<double> params = {}) {
    return {GateKind::NATIVE, std::move(params), std::move(qubits), u, tag};
  }
};

struct Circuit {
  int num_qubits = 2;
  std::vector<ElementaryGate> gates;

  int count(GateKind kind) const {
    int n = 0;
    for (const auto& g : gates) n += g.kind == kind ? 1 : 0;
    return n;
  }
  int single_qubit_count() const {
    return count(GateKind::U1) + count(GateKind::U2) + count(GateKind::U3);
  }
};

/// Ordered product of the circuit's gates, each embedded on its qubits.
inline Matrix recompose(const Circuit& circuit) {
  const Eigen::Index dim = Eigen::Index{1} << circuit.num_qubits;
  Matrix u = Matrix::Identity(dim, dim);
  for (const auto& g : circuit.gates) {
    u = embed<double>(g.matrix(), g.qubits, circuit.num_qubits) * u;
  }
  return u;
}

// ---------------------------------------------------------------------------
// Single-qubit Euler decomposition

struct EulerAngles {
  double theta = 0, phi = 0, lambda = 0;
};

inline double wrap_angle(double a) {
  a = std::remainder(a, 2 * std::numbers::pi);
  if (a <= -std::numbers::pi + 1e-15) a += 2 * std::numbers::pi;
  return a;
}

/// Angles with U = e^{i g} U3(theta, phi, lambda), theta in [0, pi].
inline EulerAngles euler_zyz(const Matrix& u) {
  if (u.rows() != 2 || u.cols() != 2) throw DimensionError("euler_zyz: expected 2x2");
  EulerAngles e;
  e.theta = 2 * std::atan2(std::abs(u(1, 0)), std::abs(u(0, 0)));
  if (std::abs(u(0, 0)) > 1e-12) {
    const Complex g = u(0, 0) / std::abs(u(0, 0));
    const Matrix v = u / g;
    if (std::abs(v(1, 0)) > 1e-12) {
      e.phi = std::arg(v(1, 0));
      e.lambda = std::arg(-v(0, 1));
    } else {
      e.phi = 0;
      e.lambda = std::arg(v(1, 1));
    }
  } else {
    const Complex g = u(1, 0) / std::abs(u(1, 0));
    const Matrix v = u / g;
    e.phi = 0;
    e.lambda = std::arg(-v(0, 1));
  }
  e.phi = wrap_angle(e.phi);
  e.lambda = wrap_angle(e.lambda);
  return e;
}

/// Classifies the Euler angles as U1 (theta = 0), U2 (theta = pi/2) or U3.
inline ElementaryGate zyz_decompose(const Matrix& u, int qubit = 0,
                                    double tolerance = tol::kPhase) {
  const EulerAngles e = euler_zyz(u);
  ElementaryGate g;
  g.qubits = {qubit};
  if (std::abs(e.theta) < tolerance) {
    g.kind = GateKind::U1;
    g.params = {wrap_angle(e.phi + e.lambda)};
  } else if (std::abs(e.theta - std::numbers::pi / 2) < tolerance) {
    g.kind = GateKind::U2;
    g.params = {e.phi, e.lambda};
  } else {
    g.kind = GateKind::U3;
    g.params = {e.theta, e.phi, e.lambda};
  }
  return g;
}

// ---------------------------------------------------------------------------
// Two-qubit Cartan decomposition

inline const Matrix& magic_basis() {
  static const Matrix b = [] {
    const Complex i(0, 1);
    Matrix m(4, 4);
    m << 1, 0, 0, i,
         0, i, 1, 0,
         0, i, -1, 0,
         1, 0, 0, -i;
    return Matrix(m / std::numbers::sqrt2);
  }();
  return b;
}

/// exp(i(a XX + b YY + c ZZ)).
inline Matrix canonical_gate(double a, double b, double c) {
  const Matrix xx = kron<double>(pauli<double>(1), pauli<double>(1));
  const Matrix yy = kron<double>(pauli<double>(2), pauli<double>(2));
  const Matrix zz = kron<double>(pauli<double>(3), pauli<double>(3));
  return expm_hermitian<double>(Matrix(a * xx + b * yy + c * zz), -1.0);
}

struct KakDecomposition {
  Complex phase{1, 0};
  double a = 0, b = 0, c = 0;
  Matrix after0, after1;    // A0, A1 (applied last)
  Matrix before0, before1;  // B0, B1 (applied first)
  /// |eigenvalue-splitting residual| of the symmetric diagonalisation.
  double diag_residual = 0;
};

/// Nearest Kronecker factors of a 4x4 local unitary K = X kron Y.
inline std::pair<Matrix, Matrix> kron_factor(const Matrix& k) {
  Matrix r(4, 4);
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2)
          r(i1 * 2 + j1, i2 * 2 + j2) = k(i1 * 2 + i2, j1 * 2 + j2);
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double s = std::sqrt(svd.singularValues()(0));
  Matrix x(2, 2), y(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      x(i, j) = s * svd.matrixU()(i * 2 + j, 0);
      y(i, j) = s * std::conj(svd.matrixV()(i * 2 + j, 0));
    }
  return {x, y};
}

namespace detail {

inline std::optional<KakDecomposition> try_kak(const Matrix& u, double mix) {
  const Matrix& bm = magic_basis();
  const Complex det = u.determinant();
  const Complex root = std::pow(det, 0.25);
  const Matrix up = bm.adjoint() * (u / root) * bm;
  const Matrix m = up.transpose() * up;

  const Eigen::Matrix4d sym = m.real() + mix * m.imag();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(sym);
  Eigen::Matrix4d p = es.eigenvectors();
  if (p.determinant() < 0) p.col(0) *= -1.0;
  const Matrix pc = p.cast<Complex>();
  const Matrix dmat = pc.transpose() * m * pc;
  Matrix offdiag = dmat;
  offdiag.diagonal().setZero();
  const double residual = max_abs<double>(offdiag);
  if (residual > 1e-9) return std::nullopt;

  Eigen::Vector4d theta;
  for (int k = 0; k < 4; ++k) theta(k) = std::arg(dmat(k, k)) / 2;
  auto delta_conj = [&] {
    Matrix d = Matrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k) d(k, k) = std::polar(1.0, -theta(k));
    return d;
  };
  Matrix o1 = up * pc * delta_conj();
  if (o1.real().determinant() < 0) {
    theta(0) += std::numbers::pi;
    o1 = up * pc * delta_conj();
  }
  if (max_abs<double>(Matrix(o1.imag().cast<Complex>())) > 1e-7) return std::nullopt;

  // B diag(e^{i theta}) B^dagger = e^{i phi} exp(i(a XX + b YY + c ZZ)); XX, YY
  // and ZZ are diagonal in the magic basis with orthogonal +-1 diagonals.
  const Matrix xx = kron<double>(pauli<double>(1), pauli<double>(1));
  const Matrix yy = kron<double>(pauli<double>(2), pauli<double>(2));
  const Matrix zz = kron<double>(pauli<double>(3), pauli<double>(3));
  const Matrix dx = bm.adjoint() * xx * bm;
  const Matrix dy = bm.adjoint() * yy * bm;
  const Matrix dz = bm.adjoint() * zz * bm;
  KakDecomposition out;
  for (int k = 0; k < 4; ++k) {
    out.a += dx(k, k).real() * theta(k) / 4;
    out.b += dy(k, k).real() * theta(k) / 4;
    out.c += dz(k, k).real() * theta(k) / 4;
  }
  const Matrix k1 = bm * o1.real().cast<Complex>() * bm.adjoint();
  const Matrix k2 = bm * pc.transpose() * bm.adjoint();
  std::tie(out.after0, out.after1) = kron_factor(k1);
  std::tie(out.before0, out.before1) = kron_factor(k2);
  out.diag_residual = residual;

  const Matrix core = canonical_gate(out.a, out.b, out.c);
  const Matrix rebuilt = kron<double>(out.after0, out.after1) * core *
                         kron<double>(out.before0, out.before1);
  const Complex ov = (rebuilt.adjoint() * u).trace() / 4.0;
  out.phase = ov / std::abs(ov);
  if (!phase_equal<double>(rebuilt, u, tol::kPhase)) return std::nullopt;
  return out;
}

}  // namespace detail

/// Cartan decomposition of a 4x4 unitary. The symmetric eigen-step is
/// retried with different mixing weights when degenerate spectra make a
/// given weight fail.
inline KakDecomposition kak_decompose(const Matrix& u) {
  if (u.rows() != 4 || u.cols() != 4) throw DimensionError("kak_decompose: expected 4x4");
  static constexpr std::array<double, 8> kMix{0.4142135623730951, 1.7320508075688772,
                                              -0.7071067811865476, 2.718281828459045,
                                              0.1234567, -3.14159, 0.577215664901533,
                                              -1.61803398875};
  for (double mix : kMix) {
    if (auto d = detail::try_kak(u, mix)) return *d;
  }
  const double unit_err =
      max_abs<double>(Matrix(u.adjoint() * u - Matrix::Identity(4, 4)));
  std::ostringstream msg;
  msg << "kak_decompose: Cartan eigen-step failed for all " << kMix.size()
      << " mixing weights (unitarity error " << unit_err << ")";
  throw NumericalError(msg.str());
}

enum class TwoQubitBasis { Cnot, Iswap };

namespace detail {

/// Builds a circuit from raw 1-qubit matrices and 2-qubit gates, merging
/// consecutive 1-qubit matrices on the same qubit into one U1/U2/U3.
class CircuitBuilder {
 public:
  CircuitBuilder(int num_qubits, TwoQubitBasis basis)
      : basis_(basis), pending_(num_qubits, Matrix::Identity(2, 2)),
        touched_(num_qubits, false) {
    circuit_.num_qubits = num_qubits;
  }

  void single(int q, const Matrix& m) {
    pending_[q] = m * pending_[q];
    touched_[q] = true;
  }

  void cx(int control, int target) {
    if (basis_ == TwoQubitBasis::Cnot) {
      flush(control);
      flush(target);
      circuit_.gates.push_back(ElementaryGate::cnot_gate(control, target));
      return;
    }
    // CNOT = (SH kron HS^dagger) iSWAP (I kron H) iSWAP (H kron H).
    const Matrix h = hadamard();
    single(control, h);
    single(target, h);
    iswap_raw(control, target);
    single(target, h);
    iswap_raw(control, target);
    single(control, Matrix(phase_s() * h));
    single(target, Matrix(h * phase_s().adjoint()));
  }

  Circuit finish() {
    for (int q = 0; q < static_cast<int>(pending_.size()); ++q) flush(q);
    return std::move(circuit_);
  }

 private:
  void iswap_raw(int q0, int q1) {
    flush(q0);
    flush(q1);
    circuit_.gates.push_back(ElementaryGate::iswap_gate(q0, q1));
  }

  void flush(int q) {
    if (!touched_[q]) return;
    circuit_.gates.push_back(zyz_decompose(pending_[q], q));
    pending_[q] = Matrix::Identity(2, 2);
    touched_[q] = false;
  }

  TwoQubitBasis basis_;
  std::vector<Matrix> pending_;
  std::vector<bool> touched_;
  Circuit circuit_;
};

}  // namespace detail

struct CompileOptions {
  /// Emit only single-qubit gates when U is a product of local unitaries.
  /// Off by default so every gate uses the same template.
  bool elide_local = false;
};

/// Fixed-template compilation of a 2-qubit unitary: three CNOTs (six iSWAPs
/// in the iSWAP basis) and at most eight single-qubit gates.
inline Circuit kak_compile(const Matrix& u, TwoQubitBasis basis = TwoQubitBasis::Cnot,
                           CompileOptions options = {}) {
  const KakDecomposition k = kak_decompose(u);
  detail::CircuitBuilder b(2, basis);
  const bool local = std::abs(std::sin(k.a)) < 1e-12 && std::abs(std::sin(k.b)) < 1e-12 &&
                     std::abs(std::sin(k.c)) < 1e-12;
  if (options.elide_local && local) {
    const Matrix core = canonical_gate(k.a, k.b, k.c);
    // core is +-1 or +-i times a Pauli string on each qubit.
    Matrix l0(2, 2), l1(2, 2);
    std::tie(l0, l1) = kron_factor(core);
    b.single(0, Matrix(k.after0 * l0 * k.before0));
    b.single(1, Matrix(k.after1 * l1 * k.before1));
    return b.finish();
  }
  constexpr double kHalfPi = std::numbers::pi / 2;
  b.single(0, k.before0);
  b.single(1, Matrix(rz(kHalfPi) * k.before1));
  b.cx(1, 0);
  b.single(0, rz(kHalfPi - 2 * k.c));
  b.single(1, ry(kHalfPi - 2 * k.a));
  b.cx(0, 1);
  b.single(1, ry(2 * k.b - kHalfPi));
  b.cx(1, 0);
  b.single(0, Matrix(k.after0 * rz(-kHalfPi)));
  b.single(1, k.after1);
  return b.finish();
}

/// Compile a 2-qubit Clifford through its canonical class structure.
inline Circuit compile_clifford2(int index, TwoQubitBasis basis = TwoQubitBasis::Cnot) {
  const CliffordStructure s = CliffordTable::structure(index);
  const auto& c1 = CliffordTable::single_qubit();
  const auto& s1 = CliffordTable::s1();
  detail::CircuitBuilder b(2, basis);
  using Class = CliffordStructure::Class;
  if (s.cls == Class::Cnot || s.cls == Class::DoubleCnot) {
    b.single(0, s1[s.sa]);
    b.single(1, s1[s.sb]);
  }
  switch (s.cls) {
    case Class::Local: break;
    case Class::Cnot: b.cx(0, 1); break;
    case Class::DoubleCnot:
      b.cx(0, 1);
      b.cx(1, 0);
      break;
    case Class::Swap:
      b.cx(0, 1);
      b.cx(1, 0);
      b.cx(0, 1);
      break;
  }
  b.single(0, c1[s.a]);
  b.single(1, c1[s.b]);
  return b.finish();
}

/// Single-qubit element: one U1/U2/U3 gate.
inline Circuit compile_single_qubit(const Matrix& u) {
  Circuit c;
  c.num_qubits = 1;
  c.gates.push_back(zyz_decompose(u, 0));
  return c;
}

}  // namespace rblab
