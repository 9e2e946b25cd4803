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

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "rblab/qcore.hpp"

namespace rblab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream for task (a, b) under a master seed.
inline Rng make_stream(std::uint64_t master, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
  const std::uint64_t s = splitmix64(splitmix64(splitmix64(master) ^ a) ^ b);
  return Rng(s);
}

// ---------------------------------------------------------------------------
// Named gates

inline Matrix hadamard() {
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::numbers::sqrt2;
}

inline Matrix phase_s() {
  Matrix s = Matrix::Identity(2, 2);
  s(1, 1) = Complex(0, 1);
  return s;
}

inline Matrix rz(double angle) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::polar(1.0, -angle / 2);
  m(1, 1) = std::polar(1.0, angle / 2);
  return m;
}

inline Matrix ry(double angle) {
  Matrix m(2, 2);
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  m << c, -s, s, c;
  return m;
}

/// CNOT with the given control and target in a 2-qubit register.
inline Matrix cnot(int control = 0, int target = 1) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1;
  m(2, 3) = m(3, 2) = 1;
  return embed<double>(m, {control, target}, 2);
}

inline Matrix xy(double theta) {
  Matrix m = Matrix::Identity(4, 4);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  m(1, 1) = m(2, 2) = c;
  m(1, 2) = m(2, 1) = Complex(0, s);
  return m;
}

inline Matrix iswap() { return xy(std::numbers::pi); }

inline Matrix swap_gate() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = m(1, 2) = m(2, 1) = 1;
  return m;
}

// ---------------------------------------------------------------------------
// Haar sampling

/// Haar-random element of U(d): Ginibre matrix, QR, and the phase fix that
/// makes diag(R) positive.
inline UnitaryOp haar_sample(int d, Rng& rng) {
  if (d < 2) throw ConfigError("haar_sample: d must be >= 2");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im) / std::numbers::sqrt2;
    }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (int k = 0; k < d; ++k) {
    const Complex rkk = r(k, k);
    if (std::abs(rkk) > 0) q.col(k) *= rkk / std::abs(rkk);
  }
  return UnitaryOp(q);
}

// ---------------------------------------------------------------------------
// Clifford groups (modulo global phase)

/// Images of the Pauli generators X_q, Z_q under conjugation; identifies a
/// Clifford up to phase. Returns nullopt when U is not Clifford.
inline std::optional<std::uint64_t> clifford_key(const Matrix& u, int num_qubits) {
  const int n_paulis = 1 << (2 * num_qubits);
  const double d = static_cast<double>(u.rows());
  std::uint64_t key = 0;
  for (int q = 0; q < num_qubits; ++q) {
    for (int which : {1, 3}) {
      int index = 0;
      for (int k = 0; k < num_qubits; ++k) index = index * 4 + (k == q ? which : 0);
      const Matrix image =
          u * pauli_string<double>(num_qubits, index) * u.adjoint();
      bool found = false;
      for (int j = 1; j < n_paulis && !found; ++j) {
        const Complex t = (pauli_string<double>(num_qubits, j) * image).trace() / d;
        if (std::abs(std::abs(t) - 1.0) < 1e-6) {
          if (std::abs(t.imag()) > 1e-6) return std::nullopt;
          key = key * 64 + static_cast<std::uint64_t>(2 * j + (t.real() < 0 ? 1 : 0));
          found = true;
        }
      }
      if (!found) return std::nullopt;
    }
  }
  return key;
}

inline bool is_clifford(const Matrix& u, int num_qubits) {
  return clifford_key(u, num_qubits).has_value();
}

/// Canonical structure of a two-qubit Clifford:
///   (C_a kron C_b) * core(cls) * (S_sa kron S_sb)
/// with core = I, CNOT01, CNOT10*CNOT01, or SWAP (as three CNOTs). The local
/// class has no S layer and the SWAP class has none either.
struct CliffordStructure {
  enum class Class { Local, Cnot, DoubleCnot, Swap };
  Class cls = Class::Local;
  int a = 0, b = 0;    // 1-qubit Clifford indices of the outer layer
  int sa = 0, sb = 0;  // indices into the order-3 subgroup S1
};

class CliffordTable {
 public:
  static constexpr int kSize1 = 24;
  static constexpr int kSize2 = 11520;

  int num_qubits() const { return num_qubits_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const Matrix& element(int index) const { return elements_.at(index); }

  std::optional<int> index_of(const Matrix& u) const {
    const auto key = clifford_key(u, num_qubits_);
    if (!key) return std::nullopt;
    const auto it = lookup_.find(*key);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  static CliffordStructure structure(int index) {
    CliffordStructure s;
    if (index < 0 || index >= kSize2) throw ConfigError("Clifford index out of range");
    if (index < 576) {
      s.cls = CliffordStructure::Class::Local;
      s.a = index / 24;
      s.b = index % 24;
    } else if (index < 576 + 2 * 5184) {
      const int r = (index - 576) % 5184;
      s.cls = index < 576 + 5184 ? CliffordStructure::Class::Cnot
                                 : CliffordStructure::Class::DoubleCnot;
      s.a = r / 216;
      s.b = (r / 9) % 24;
      s.sa = (r / 3) % 3;
      s.sb = r % 3;
    } else {
      const int r = index - 576 - 2 * 5184;
      s.cls = CliffordStructure::Class::Swap;
      s.a = r / 24;
      s.b = r % 24;
    }
    return s;
  }

  /// Single-qubit Clifford group, generated from H and S in BFS order.
  static const std::vector<Matrix>& single_qubit() {
    static const std::vector<Matrix> group = [] {
      std::vector<Matrix> els{Matrix::Identity(2, 2)};
      std::vector<Matrix> frontier = els;
      const std::array<Matrix, 2> gens{hadamard(), phase_s()};
      while (!frontier.empty()) {
        std::vector<Matrix> next;
        for (const auto& g : frontier) {
          for (const auto& gen : gens) {
            Matrix h = gen * g;
            bool seen = false;
            for (const auto& e : els) {
              if (phase_equal<double>(e, h)) {
                seen = true;
                break;
              }
            }
            if (!seen) {
              els.push_back(h);
              next.push_back(h);
            }
          }
        }
        frontier = std::move(next);
      }
      for (auto& e : els) e = normalize_phase(e);
      return els;
    }();
    return group;
  }

  /// {I, R, R^2} with R: X -> Y -> Z -> X.
  static const std::array<Matrix, 3>& s1() {
    static const std::array<Matrix, 3> s = [] {
      const Matrix x = pauli<double>(1), y = pauli<double>(2), z = pauli<double>(3);
      for (const auto& c : single_qubit()) {
        if (max_abs<double>(Matrix(c * x * c.adjoint() - y)) < 1e-12 &&
            max_abs<double>(Matrix(c * y * c.adjoint() - z)) < 1e-12) {
          return std::array<Matrix, 3>{Matrix::Identity(2, 2), c, Matrix(c * c)};
        }
      }
      throw NumericalError("Clifford table: order-3 element not found");
    }();
    return s;
  }

  static Matrix compose_structure(const CliffordStructure& s) {
    const auto& c1 = single_qubit();
    const auto& sl = s1();
    const Matrix outer = kron<double>(c1[s.a], c1[s.b]);
    const Matrix inner = kron<double>(sl[s.sa], sl[s.sb]);
    switch (s.cls) {
      case CliffordStructure::Class::Local: return outer;
      case CliffordStructure::Class::Cnot: return outer * cnot(0, 1) * inner;
      case CliffordStructure::Class::DoubleCnot:
        return outer * cnot(1, 0) * cnot(0, 1) * inner;
      case CliffordStructure::Class::Swap:
        return outer * cnot(0, 1) * cnot(1, 0) * cnot(0, 1);
    }
    return outer;
  }

  static const CliffordTable& get(int num_qubits) {
    if (num_qubits == 1) {
      static const CliffordTable t1(1);
      return t1;
    }
    if (num_qubits == 2) {
      static const CliffordTable t2(2);
      return t2;
    }
    throw ConfigError("Clifford sampling supports 1 or 2 qubits only");
  }

 private:
  explicit CliffordTable(int n) : num_qubits_(n) {
    if (n == 1) {
      elements_ = single_qubit();
    } else {
      elements_.reserve(kSize2);
      for (int i = 0; i < kSize2; ++i) {
        elements_.push_back(normalize_phase(compose_structure(structure(i))));
      }
    }
    for (int i = 0; i < size(); ++i) {
      const auto key = clifford_key(elements_[i], n);
      if (!key || !lookup_.emplace(*key, i).second) {
        throw NumericalError("Clifford table: canonical decomposition is not a bijection");
      }
    }
  }

  /// Rotate the global phase so the first nonnegligible entry is real positive.
  static Matrix normalize_phase(const Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (std::abs(m(i, j)) > 1e-9) return Matrix(m * (std::abs(m(i, j)) / m(i, j)));
    return m;
  }

  int num_qubits_;
  std::vector<Matrix> elements_;
  std::unordered_map<std::uint64_t, int> lookup_;
};

inline int clifford_sample_index(int num_qubits, Rng& rng) {
  const int size = CliffordTable::get(num_qubits).size();
  std::uniform_int_distribution<int> pick(0, size - 1);
  return pick(rng);
}

inline UnitaryOp clifford_sample(int num_qubits, Rng& rng) {
  const auto& table = CliffordTable::get(num_qubits);
  return UnitaryOp(table.element(clifford_sample_index(num_qubits, rng)));
}

// ---------------------------------------------------------------------------
// Groups and inversion

struct GroupElement {
  UnitaryOp unitary;
  /// Canonical table index when the element is a Clifford.
  std::optional<int> clifford_index;
};

class GateGroup {
 public:
  enum class Kind { Haar, Clifford };

  GateGroup(Kind kind, int num_qubits) : kind_(kind), num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > 4) throw ConfigError("GateGroup: bad qubit count");
    if (kind == Kind::Clifford) CliffordTable::get(num_qubits);
  }

  Kind kind() const { return kind_; }
  int num_qubits() const { return num_qubits_; }
  int dim() const { return 1 << num_qubits_; }

  GroupElement sample(Rng& rng) const {
    if (kind_ == Kind::Haar) return {haar_sample(dim(), rng), std::nullopt};
    const int idx = clifford_sample_index(num_qubits_, rng);
    return {UnitaryOp(CliffordTable::get(num_qubits_).element(idx)), idx};
  }

  /// Wrap a unitary as a group element, attaching its Clifford index.
  GroupElement element(const UnitaryOp& u) const {
    if (kind_ == Kind::Haar) return {u, std::nullopt};
    const auto idx = CliffordTable::get(num_qubits_).index_of(u.matrix());
    if (!idx) throw NumericalError("GateGroup: element is not a Clifford");
    return {u, idx};
  }

 private:
  Kind kind_;
  int num_qubits_;
};

/// g_end * (g_m ... g_2 g_1)^{-1}; gates are listed in application order.
inline UnitaryOp invert_product(std::span<const UnitaryOp> gates,
                                const UnitaryOp& g_end) {
  Matrix product = Matrix::Identity(g_end.dim(), g_end.dim());
  for (const auto& g : gates) {
    if (g.dim() != g_end.dim()) throw DimensionError("invert_product: dim mismatch");
    product = g.matrix() * product;
  }
  return UnitaryOp(Matrix(g_end.matrix() * product.adjoint()), 1e-8);
}

}  // namespace rblab
