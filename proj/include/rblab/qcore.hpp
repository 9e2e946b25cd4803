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
 * @file qcore.hpp
 * Dense linear algebra for operators, states and superoperators on small
 * Hilbert spaces.
 *
 * Conventions used throughout the library:
 *  - vec() stacks columns, so vec(A X B) = (B^T kron A) vec(X) and
 *    <<A|B>> = vec(A)^dagger vec(B) = Tr[A^dagger B].
 *  - The Liouville matrix of rho -> U rho U^dagger is conj(U) kron U.
 *  - The Choi matrix is sum_ij Phi(|i><j|) kron |i><j| (unnormalised, trace d
 *    for trace-preserving maps).
 *  - Qubit 0 is the leftmost tensor factor.
 *
 * The free functions are templates over the real scalar so the theory
 * module can run them in extended precision; the strong types below are the
 * double-precision API used everywhere else.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rblab/error.hpp"

namespace rblab {

template <class Real>
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using CVec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using Matrix = CMat<double>;
using Vector = CVec<double>;

namespace tol {
inline constexpr double kStructural = 1e-10;
inline constexpr double kAlgebraic = 1e-12;
inline constexpr double kPhase = 1e-9;
}  // namespace tol

// ---------------------------------------------------------------------------
// Elementary helpers

template <class Real>
CMat<Real> kron(const CMat<Real>& a, const CMat<Real>& b) {
  CMat<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <class Real>
Real max_abs(const CMat<Real>& m) {
  return m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
}

inline void require_square(Eigen::Index rows, Eigen::Index cols,
                           const char* what) {
  if (rows != cols) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

template <class Real>
CVec<Real> vectorize(const CMat<Real>& m) {
  require_square(m.rows(), m.cols(), "vectorize");
  return Eigen::Map<const CVec<Real>>(m.data(), m.size());
}

template <class Real>
CMat<Real> unvectorize(const CVec<Real>& v) {
  const auto d = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) {
    throw DimensionError("unvectorize: length " + std::to_string(v.size()) +
                         " is not a perfect square");
  }
  return Eigen::Map<const CMat<Real>>(v.data(), d, d);
}

/// Hilbert-Schmidt inner product <<A|B>> = Tr[A^dagger B].
template <class Real>
std::complex<Real> hs_inner(const CMat<Real>& a, const CMat<Real>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("hs_inner: shape mismatch");
  }
  return (a.adjoint() * b).trace();
}

template <class Real>
Real spectral_norm(const CMat<Real>& m) {
  if (m.size() == 0) return Real(0);
  Eigen::JacobiSVD<CMat<Real>> svd(m);
  return svd.singularValues()(0);
}

template <class Real>
Real trace_norm(const CMat<Real>& m) {
  if (m.size() == 0) return Real(0);
  Eigen::JacobiSVD<CMat<Real>> svd(m);
  return svd.singularValues().sum();
}

/// Liouville matrix of rho -> U rho U^dagger.
template <class Real>
CMat<Real> liouville_of_unitary(const CMat<Real>& u) {
  require_square(u.rows(), u.cols(), "liouville_of_unitary");
  return kron<Real>(u.conjugate(), u);
}

template <class Real>
CMat<Real> liouville_of_kraus(const std::vector<CMat<Real>>& kraus) {
  if (kraus.empty()) throw DimensionError("liouville_of_kraus: empty Kraus set");
  const auto d = kraus.front().rows();
  CMat<Real> out = CMat<Real>::Zero(d * d, d * d);
  for (const auto& a : kraus) {
    if (a.rows() != d || a.cols() != d) {
      throw DimensionError("liouville_of_kraus: Kraus operators differ in shape");
    }
    out += kron<Real>(a.conjugate(), a);
  }
  return out;
}

/// Choi matrix from a Liouville matrix by realignment:
/// C(a d + i, b d + j) = S(a + b d, i + j d).
template <class Real>
CMat<Real> choi_of_liouville(const CMat<Real>& s) {
  require_square(s.rows(), s.cols(), "choi_of_liouville");
  const auto d = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(s.rows()))));
  if (d * d != s.rows()) {
    throw DimensionError("choi_of_liouville: size is not d^2");
  }
  CMat<Real> c(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index j = 0; j < d; ++j)
          c(a * d + i, b * d + j) = s(a + b * d, i + j * d);
  return c;
}

template <class Real>
struct DiamondBounds {
  Real lower = 0;
  Real upper = 0;
};

/// Sandwich of the diamond norm of a linear map by its Choi trace norm:
/// ||C||_1 / d <= ||S||_dia <= ||C||_1.
template <class Real>
DiamondBounds<Real> diamond_bounds_liouville(const CMat<Real>& s) {
  const CMat<Real> c = choi_of_liouville<Real>(s);
  const auto d = static_cast<Real>(std::sqrt(static_cast<double>(s.rows())));
  const Real upper = trace_norm<Real>(c);
  return {upper / d, upper};
}

/// True when U^dagger V is a unit-modulus multiple of the identity.
template <class Real>
bool phase_equal(const CMat<Real>& u, const CMat<Real>& v,
                 Real tolerance = Real(tol::kPhase)) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) return false;
  const CMat<Real> m = u.adjoint() * v;
  const std::complex<Real> c = m.trace() / static_cast<Real>(m.rows());
  if (std::abs(std::abs(c) - Real(1)) > tolerance) return false;
  const CMat<Real> diff = m - c * CMat<Real>::Identity(m.rows(), m.cols());
  return max_abs<Real>(diff) <= tolerance;
}

/// Phase-insensitive distance: min over global phases of max |U - e^{ia} V|.
template <class Real>
Real phase_distance(const CMat<Real>& u, const CMat<Real>& v) {
  const std::complex<Real> overlap = (v.adjoint() * u).trace();
  std::complex<Real> phase(1, 0);
  if (std::abs(overlap) > Real(0)) phase = overlap / std::abs(overlap);
  return max_abs<Real>(CMat<Real>(u - phase * v));
}

/// exp(-i t H) for Hermitian H.
template <class Real>
CMat<Real> expm_hermitian(const CMat<Real>& h, Real t) {
  require_square(h.rows(), h.cols(), "expm_hermitian");
  Eigen::SelfAdjointEigenSolver<CMat<Real>> es(h);
  const auto& w = es.eigenvalues();
  CVec<Real> phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    phases(k) = std::polar(Real(1), -t * w(k));
  }
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

template <class Real = double>
CMat<Real> pauli(int which) {
  using C = std::complex<Real>;
  CMat<Real> p(2, 2);
  switch (which) {
    case 0: p << C(1), C(0), C(0), C(1); break;
    case 1: p << C(0), C(1), C(1), C(0); break;
    case 2: p << C(0), C(0, -1), C(0, 1), C(0); break;
    case 3: p << C(1), C(0), C(0), C(-1); break;
    default: throw DimensionError("pauli: index must be 0..3");
  }
  return p;
}

/// n-qubit Pauli string; digit k of `index` in base 4 (most significant
/// first) selects the Pauli on qubit k.
template <class Real = double>
CMat<Real> pauli_string(int num_qubits, int index) {
  CMat<Real> out = CMat<Real>::Identity(1, 1);
  for (int q = num_qubits - 1; q >= 0; --q) {
    int digit = index;
    for (int k = 0; k < q; ++k) digit /= 4;
    out = kron<Real>(out, pauli<Real>(digit % 4));
  }
  return out;
}

/// Embed a 1- or 2-qubit operator acting on `qubits` into an n-qubit space.
template <class Real>
CMat<Real> embed(const CMat<Real>& op, const std::vector<int>& qubits,
                 int num_qubits) {
  const int k = static_cast<int>(qubits.size());
  if (op.rows() != (Eigen::Index{1} << k) || op.cols() != op.rows()) {
    throw DimensionError("embed: operator size does not match qubit count");
  }
  for (int q : qubits) {
    if (q < 0 || q >= num_qubits) {
      throw DimensionError("embed: qubit index " + std::to_string(q) +
                           " out of range");
    }
  }
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  CMat<Real> out = CMat<Real>::Zero(dim, dim);
  // Bit of qubit q inside a basis index (qubit 0 most significant).
  auto bit = [&](Eigen::Index idx, int q) {
    return (idx >> (num_qubits - 1 - q)) & 1;
  };
  for (Eigen::Index row = 0; row < dim; ++row) {
    for (Eigen::Index col = 0; col < dim; ++col) {
      bool rest_equal = true;
      for (int q = 0; q < num_qubits && rest_equal; ++q) {
        if (std::find(qubits.begin(), qubits.end(), q) != qubits.end()) continue;
        rest_equal = bit(row, q) == bit(col, q);
      }
      if (!rest_equal) continue;
      Eigen::Index r = 0, c = 0;
      for (int q : qubits) {
        r = (r << 1) | bit(row, q);
        c = (c << 1) | bit(col, q);
      }
      out(row, col) = op(r, c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strong types (double precision)

class UnitaryOp {
 public:
  UnitaryOp() : m_(Matrix::Identity(1, 1)) {}
  explicit UnitaryOp(Matrix m, double tolerance = tol::kStructural)
      : m_(std::move(m)) {
    require_square(m_.rows(), m_.cols(), "UnitaryOp");
    const double err =
        max_abs<double>(Matrix(m_.adjoint() * m_ -
                               Matrix::Identity(m_.rows(), m_.cols())));
    if (err > tolerance) {
      throw NumericalError("UnitaryOp: U^dagger U deviates from I by " +
                           std::to_string(err));
    }
  }
  static UnitaryOp identity(Eigen::Index d) {
    return UnitaryOp(Matrix::Identity(d, d));
  }

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  UnitaryOp adjoint() const { return UnitaryOp(m_.adjoint(), kLoose); }

  friend UnitaryOp operator*(const UnitaryOp& a, const UnitaryOp& b) {
    if (a.dim() != b.dim()) throw DimensionError("UnitaryOp product: dim mismatch");
    return UnitaryOp(a.m_ * b.m_, kLoose);
  }

  bool phase_equal_to(const UnitaryOp& other,
                      double tolerance = tol::kPhase) const {
    return phase_equal<double>(m_, other.m_, tolerance);
  }

 private:
  // Products of validated unitaries only accumulate rounding error.
  static constexpr double kLoose = 1e-8;
  Matrix m_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
    require_square(m_.rows(), m_.cols(), "DensityMatrix");
    if (max_abs<double>(Matrix(m_ - m_.adjoint())) > tol::kAlgebraic) {
      throw NumericalError("DensityMatrix: not Hermitian");
    }
    if (std::abs(m_.trace() - Complex(1)) > tol::kAlgebraic) {
      throw NumericalError("DensityMatrix: trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::kStructural) {
      throw NumericalError("DensityMatrix: negative eigenvalue");
    }
  }
  /// |index><index| in dimension d.
  static DensityMatrix basis_state(Eigen::Index d, Eigen::Index index) {
    Matrix m = Matrix::Zero(d, d);
    m(index, index) = 1.0;
    return DensityMatrix(m);
  }
  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

class KrausChannel {
 public:
  KrausChannel(Eigen::Index dim, std::vector<Matrix> kraus,
               double tolerance = tol::kStructural)
      : dim_(dim), kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw DimensionError("KrausChannel: empty Kraus set");
    Matrix sum = Matrix::Zero(dim_, dim_);
    for (const auto& a : kraus_) {
      if (a.rows() != dim_ || a.cols() != dim_) {
        throw DimensionError("KrausChannel: operator shape does not match dim");
      }
      sum += a.adjoint() * a;
    }
    const double err =
        max_abs<double>(Matrix(sum - Matrix::Identity(dim_, dim_)));
    if (err > tolerance) {
      throw NumericalError("KrausChannel: not trace preserving (error " +
                           std::to_string(err) + ")");
    }
  }
  static KrausChannel identity(Eigen::Index d) {
    return KrausChannel(d, {Matrix::Identity(d, d)});
  }
  static KrausChannel unitary(const UnitaryOp& u) {
    return KrausChannel(u.dim(), {u.matrix()});
  }

  Eigen::Index dim() const { return dim_; }
  const std::vector<Matrix>& operators() const { return kraus_; }

  Matrix apply(const Matrix& rho) const {
    Matrix out = Matrix::Zero(dim_, dim_);
    for (const auto& a : kraus_) out += a * rho * a.adjoint();
    return out;
  }

 private:
  Eigen::Index dim_;
  std::vector<Matrix> kraus_;
};

/// Linear map on d x d matrices held as its d^2 x d^2 Liouville matrix.
class Superoperator {
 public:
  Superoperator() = default;
  explicit Superoperator(Matrix liouville) : s_(std::move(liouville)) {
    require_square(s_.rows(), s_.cols(), "Superoperator");
    const auto d = static_cast<Eigen::Index>(
        std::llround(std::sqrt(static_cast<double>(s_.rows()))));
    if (d * d != s_.rows()) {
      throw DimensionError("Superoperator: Liouville size is not d^2");
    }
    dim_ = d;
  }
  static Superoperator identity(Eigen::Index d) {
    return Superoperator(Matrix::Identity(d * d, d * d));
  }

  const Matrix& liouville() const { return s_; }
  Eigen::Index dim() const { return dim_; }

  Matrix apply(const Matrix& x) const {
    if (x.rows() != dim_ || x.cols() != dim_) {
      throw DimensionError("Superoperator::apply: operand dim mismatch");
    }
    return unvectorize<double>(Vector(s_ * vectorize<double>(x)));
  }

  friend Superoperator operator-(const Superoperator& a, const Superoperator& b) {
    if (a.dim_ != b.dim_) throw DimensionError("Superoperator difference: dim mismatch");
    return Superoperator(a.s_ - b.s_);
  }

 private:
  Matrix s_ = Matrix::Identity(1, 1);
  Eigen::Index dim_ = 1;
};

inline Superoperator unitary_to_superop(const UnitaryOp& u) {
  return Superoperator(liouville_of_unitary<double>(u.matrix()));
}

inline Superoperator kraus_to_superop(const KrausChannel& k) {
  return Superoperator(liouville_of_kraus<double>(k.operators()));
}

inline Matrix superop_to_choi(const Superoperator& s) {
  return choi_of_liouville<double>(s.liouville());
}

/// compose(s1, s2) applies s2 first, then s1.
inline Superoperator compose(const Superoperator& s1, const Superoperator& s2) {
  if (s1.dim() != s2.dim()) throw DimensionError("compose: dim mismatch");
  return Superoperator(s1.liouville() * s2.liouville());
}

inline DiamondBounds<double> diamond_bounds(const Superoperator& s) {
  return diamond_bounds_liouville<double>(s.liouville());
}

/// Trace preservation and Choi positivity.
inline bool is_cptp(const Superoperator& s, double tolerance = tol::kStructural) {
  const Matrix c = superop_to_choi(s);
  if (max_abs<double>(Matrix(c - c.adjoint())) > tolerance) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tolerance) return false;
  // Tr_out C = I  <=>  trace preservation.
  const auto d = s.dim();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      Complex acc = 0;
      for (Eigen::Index a = 0; a < d; ++a) acc += c(a * d + i, a * d + j);
      if (std::abs(acc - Complex(i == j ? 1.0 : 0.0)) > tolerance) return false;
    }
  }
  return true;
}

inline bool is_cptp(const KrausChannel& k, double tolerance = tol::kStructural) {
  return is_cptp(kraus_to_superop(k), tolerance);
}

}  // namespace rblab
