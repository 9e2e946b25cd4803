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

// Finite-group Fourier analysis of RB: irreps, Fourier operators, the
// perturbative block split of F(phi), decay matrices and the error bound.
// Everything is templated on the real scalar so the bound can be checked
// below double precision.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rblab/error.hpp"
#include "rblab/qcore.hpp"

namespace rblab::theory {

template <class Real>
using Mat = CMat<Real>;
template <class Real>
using Vec = CVec<Real>;

// ---------------------------------------------------------------------------
// Finite groups of qubit unitaries (modulo phase)

template <class Real>
class FiniteGroup {
 public:
  using M = Mat<Real>;

  /// Closure of `generators` under multiplication.
  static FiniteGroup generate(std::string name, int dim, const std::vector<M>& generators) {
    FiniteGroup g;
    g.name_ = std::move(name);
    g.elements_.push_back(M::Identity(dim, dim));
    for (std::size_t i = 0; i < g.elements_.size(); ++i) {
      for (const M& gen : generators) {
        const M next = normalize(M(gen * g.elements_[i]));
        if (!g.find(next)) g.elements_.push_back(next);
        if (g.elements_.size() > 4096) throw ConfigError("FiniteGroup: closure too large");
      }
    }
    const int n = g.size();
    g.mul_.assign(n, std::vector<int>(n, -1));
    g.inv_.assign(n, -1);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const auto idx = g.find(normalize(M(g.elements_[a] * g.elements_[b])));
        if (!idx) throw NumericalError("FiniteGroup: not closed under products");
        g.mul_[a][b] = *idx;
        if (*idx == 0) g.inv_[a] = b;
      }
    }
    return g;
  }

  /// "clifford1" (24), "pauli1" (4), "z2" ({I, X}) or "trivial".
  static FiniteGroup by_name(const std::string& name) {
    using C = std::complex<Real>;
    const Real s = Real(1) / std::sqrt(Real(2));
    M h(2, 2);
    h << C(s), C(s), C(s), C(-s);
    M phase(2, 2);
    phase << C(1), C(0), C(0), C(0, 1);
    if (name == "clifford1") return generate(name, 2, {h, phase});
    if (name == "pauli1") return generate(name, 2, {pauli<Real>(1), pauli<Real>(3)});
    if (name == "z2") return generate(name, 2, {pauli<Real>(1)});
    if (name == "trivial") return generate(name, 2, {});
    throw ConfigError("unknown group '" + name + "' (clifford1, pauli1, z2, trivial)");
  }

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(elements_.size()); }
  int dim() const { return static_cast<int>(elements_.front().rows()); }
  const M& element(int i) const { return elements_.at(i); }
  int product(int a, int b) const { return mul_[a][b]; }
  int inverse(int a) const { return inv_[a]; }
  static constexpr int identity() { return 0; }

  std::optional<int> find(const M& normalized) const {
    for (int i = 0; i < size(); ++i) {
      if (max_abs<Real>(M(elements_[i] - normalized)) < Real(1e-9)) return i;
    }
    return std::nullopt;
  }

  /// Fixes the global phase: the first entry of (near) maximal modulus is
  /// made real and positive.
  static M normalize(const M& u) {
    const Real top = u.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      for (Eigen::Index i = 0; i < u.rows(); ++i) {
        if (std::abs(u(i, j)) > top * Real(1 - 1e-6)) {
          return M(u * (std::conj(u(i, j)) / std::abs(u(i, j))));
        }
      }
    }
    return u;
  }

 private:
  std::string name_;
  std::vector<M> elements_;
  std::vector<std::vector<int>> mul_;
  std::vector<int> inv_;
};

// ---------------------------------------------------------------------------
// Irreducible representations

template <class Real>
struct Irrep {
  int dim = 1;
  std::vector<Mat<Real>> matrices;
  std::vector<std::complex<Real>> character;
};

/// All irreps, from eigenspaces of a generic element of the commutant of
/// the regular representation; one representative per character.
template <class Real>
std::vector<Irrep<Real>> irreducible_representations(const FiniteGroup<Real>& group,
                                                     std::uint64_t seed = 7) {
  using M = Mat<Real>;
  const int n = group.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  M h(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const std::complex<Real> z(Real(normal(rng)), i == j ? Real(0) : Real(normal(rng)));
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  M twirl = M::Zero(n, n);
  for (int g = 0; g < n; ++g)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) twirl(group.product(g, a), group.product(g, b)) += h(a, b);
  twirl /= Real(n);

  Eigen::SelfAdjointEigenSolver<M> es(twirl);
  const auto& w = es.eigenvalues();
  const Real scale = std::max(Real(1), w.cwiseAbs().maxCoeff());
  std::vector<Irrep<Real>> out;
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && w(end) - w(end - 1) < Real(1e-7) * scale) ++end;
    const M v = es.eigenvectors().middleCols(start, end - start);
    Irrep<Real> irrep;
    irrep.dim = end - start;
    for (int g = 0; g < n; ++g) {
      M rv(n, irrep.dim);
      for (int x = 0; x < n; ++x) rv.row(group.product(g, x)) = v.row(x);
      irrep.matrices.push_back(M(v.adjoint() * rv));
      irrep.character.push_back(irrep.matrices.back().trace());
    }
    bool seen = false;
    for (const auto& other : out) {
      Real diff = 0;
      for (int g = 0; g < n; ++g) diff = std::max(diff, std::abs(other.character[g] - irrep.character[g]));
      seen = seen || diff < Real(1e-6);
    }
    if (!seen) out.push_back(std::move(irrep));
    start = end;
  }
  int sum_sq = 0;
  for (const auto& r : out) sum_sq += r.dim * r.dim;
  if (sum_sq != n) {
    throw NumericalError("irreducible_representations: dimensions do not add up (" +
                         std::to_string(sum_sq) + " vs " + std::to_string(n) + ")");
  }
  std::stable_sort(out.begin(), out.end(), [](const Irrep<Real>& a, const Irrep<Real>& b) {
    const Real ta = std::real(std::accumulate(a.character.begin(), a.character.end(),
                                              std::complex<Real>(0)));
    const Real tb = std::real(std::accumulate(b.character.begin(), b.character.end(),
                                              std::complex<Real>(0)));
    if (a.dim != b.dim) return a.dim < b.dim;
    return ta > tb;
  });
  return out;
}

/// Reference representation omega(g) = conj(U) kron U with its isotypic
/// structure.
template <class Real>
struct FiniteGroupRep {
  FiniteGroup<Real> group;
  std::vector<Mat<Real>> omega;
  std::vector<Irrep<Real>> irreps;
  /// n_lambda of each irrep inside omega.
  std::vector<int> multiplicity;
  /// Orthonormal basis of each isotypic component (D x n_lambda d_lambda).
  std::vector<Mat<Real>> isometry;

  int op_dim() const { return static_cast<int>(omega.front().rows()); }

  static FiniteGroupRep build(FiniteGroup<Real> g) {
    FiniteGroupRep rep;
    rep.group = std::move(g);
    const int n = rep.group.size();
    for (int i = 0; i < n; ++i) rep.omega.push_back(liouville_of_unitary<Real>(rep.group.element(i)));
    rep.irreps = irreducible_representations(rep.group);
    const int dd = rep.op_dim();
    int total = 0;
    for (const auto& irrep : rep.irreps) {
      std::complex<Real> overlap(0);
      Mat<Real> proj = Mat<Real>::Zero(dd, dd);
      for (int i = 0; i < n; ++i) {
        overlap += std::conj(irrep.character[i]) * rep.omega[i].trace();
        proj += std::conj(irrep.character[i]) * rep.omega[i];
      }
      const int mult = static_cast<int>(std::lround(static_cast<double>(std::real(overlap) / Real(n))));
      proj *= Real(irrep.dim) / Real(n);
      rep.multiplicity.push_back(mult);
      Eigen::SelfAdjointEigenSolver<Mat<Real>> es(Mat<Real>((proj + proj.adjoint()) / Real(2)));
      int rank = 0;
      for (int k = 0; k < dd; ++k) rank += es.eigenvalues()(k) > Real(0.5) ? 1 : 0;
      if (rank != mult * irrep.dim) throw NumericalError("FiniteGroupRep: isotypic rank mismatch");
      rep.isometry.push_back(es.eigenvectors().rightCols(rank));
      total += mult * irrep.dim;
    }
    if (total != dd) throw NumericalError("FiniteGroupRep: multiplicities do not cover omega");
    return rep;
  }
};

// ---------------------------------------------------------------------------
// Fourier operators

/// F(phi)^lambda = (1/|G|) sum_g conj(sigma_lambda(g)) kron phi(g).
template <class Real>
Mat<Real> fourier(const FiniteGroupRep<Real>& rep, const std::vector<Mat<Real>>& phi, int irrep) {
  const int n = rep.group.size();
  if (static_cast<int>(phi.size()) != n) throw DimensionError("fourier: phi/group size mismatch");
  const auto& sigma = rep.irreps.at(irrep);
  const int dd = rep.op_dim();
  Mat<Real> f = Mat<Real>::Zero(sigma.dim * dd, sigma.dim * dd);
  for (int g = 0; g < n; ++g) {
    if (phi[g].rows() != dd || phi[g].cols() != dd) throw DimensionError("fourier: phi shape");
    f += kron<Real>(Mat<Real>(sigma.matrices[g].conjugate()), phi[g]);
  }
  return f / Real(n);
}

// ---------------------------------------------------------------------------
// sep and the perturbative block split

namespace detail {

/// Orthonormal bases of range(X) and its complement for a projector X.
template <class Real>
std::pair<Mat<Real>, Mat<Real>> projector_bases(const Mat<Real>& x) {
  const Eigen::Index n = x.rows();
  if (max_abs<Real>(Mat<Real>(x - x.adjoint())) > Real(1e-8) ||
      max_abs<Real>(Mat<Real>(x * x - x)) > Real(1e-8)) {
    throw NumericalError("X1 is not an orthogonal projector");
  }
  Eigen::SelfAdjointEigenSolver<Mat<Real>> es(Mat<Real>((x + x.adjoint()) / Real(2)));
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < n; ++k) rank += es.eigenvalues()(k) > Real(0.5) ? 1 : 0;
  return {es.eigenvectors().rightCols(rank), es.eigenvectors().leftCols(n - rank)};
}

/// Matrix of P -> a1 P - P a2 on column-stacked P (r1 x r2).
template <class Real>
Mat<Real> sylvester_matrix(const Mat<Real>& a1, const Mat<Real>& a2) {
  const Eigen::Index r1 = a1.rows(), r2 = a2.rows();
  return kron<Real>(Mat<Real>::Identity(r2, r2), a1) -
         kron<Real>(Mat<Real>(a2.transpose()), Mat<Real>::Identity(r1, r1));
}

template <class Real>
Mat<Real> reshape(const Vec<Real>& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Mat<Real>>(v.data(), rows, cols);
}

template <class Real>
Vec<Real> flatten(const Mat<Real>& m) {
  return Eigen::Map<const Vec<Real>>(m.data(), m.size());
}

}  // namespace detail

/// sep(a1, a2) = min ||a1 P - P a2|| / ||P|| with the Frobenius norm on P,
/// i.e. the smallest singular value of the Sylvester operator.
template <class Real>
Real sep_numeric(const Mat<Real>& a1, const Mat<Real>& a2) {
  if (a1.rows() == 0 || a2.rows() == 0) throw DimensionError("sep_numeric: empty subspace");
  require_square(a1.rows(), a1.cols(), "sep_numeric");
  require_square(a2.rows(), a2.cols(), "sep_numeric");
  Eigen::JacobiSVD<Mat<Real>> svd(detail::sylvester_matrix<Real>(a1, a2));
  return svd.singularValues().minCoeff();
}

/// sep of A1, A2 restricted to V1 = range(X1), V2 = range(X2).
template <class Real>
Real sep_numeric(const Mat<Real>& a1, const Mat<Real>& a2, const Mat<Real>& x1,
                 const Mat<Real>& x2) {
  const auto q1 = detail::projector_bases<Real>(x1).first;
  const auto q2 = detail::projector_bases<Real>(x2).first;
  return sep_numeric<Real>(Mat<Real>(q1.adjoint() * a1 * q1), Mat<Real>(q2.adjoint() * a2 * q2));
}

/// Block split of X1 + E (X1 an orthogonal projector).  L1, L2 hold the
/// daggered left factors.
template <class Real>
struct BlockSplit {
  Mat<Real> X1, X2, P1, P2, A1, A2, R1, R2, L1, L2;
  int rank = 0;
  int iterations = 0;
  Real sep = 1;
  Real n11 = 0, n22 = 0, n12 = 0, n21 = 0;
  Real gap = 1;
  Real ratio = 0;
  Real p1_norm = 0, p2_norm = 0;
  Real p1_bound = 0;
  /// Bound on ||P2|| with ||X1 E X2|| in the numerator.
  Real p2_bound = 0;
  /// Same denominator with ||X2 E X1|| in the numerator.
  Real p2_bound_stated = 0;
  Real offdiag_residual = 0;
  Real reconstruction_error = 0;

  bool p1_bound_holds() const { return p1_norm <= p1_bound * Real(1 + 1e-9) + Real(1e-15); }
  bool p2_bound_holds() const { return p2_norm <= p2_bound * Real(1 + 1e-9) + Real(1e-15); }
};

template <class Real>
BlockSplit<Real> block_diagonalize(const Mat<Real>& x1, const Mat<Real>& e, int max_iter = 500) {
  using M = Mat<Real>;
  require_square(x1.rows(), x1.cols(), "block_diagonalize");
  if (e.rows() != x1.rows() || e.cols() != x1.cols()) {
    throw DimensionError("block_diagonalize: X1 and E differ in shape");
  }
  const Eigen::Index n = x1.rows();
  BlockSplit<Real> s;
  s.X1 = x1;
  s.X2 = M::Identity(n, n) - x1;
  const auto [q1, q2] = detail::projector_bases<Real>(x1);
  const Eigen::Index r1 = q1.cols(), r2 = q2.cols();
  s.rank = static_cast<int>(r1);

  const M e11 = q1.adjoint() * e * q1, e12 = q1.adjoint() * e * q2;
  const M e21 = q2.adjoint() * e * q1, e22 = q2.adjoint() * e * q2;
  s.n11 = spectral_norm<Real>(e11);
  s.n22 = spectral_norm<Real>(e22);
  s.n12 = spectral_norm<Real>(e12);
  s.n21 = spectral_norm<Real>(e21);
  s.sep = (r1 > 0 && r2 > 0) ? sep_numeric<Real>(M(M::Identity(r1, r1)), M(M::Zero(r2, r2)))
                             : Real(1);
  s.gap = s.sep - s.n11 - s.n22;
  s.ratio = s.gap > 0 ? s.n12 * s.n21 / (s.gap * s.gap) : std::numeric_limits<Real>::infinity();
  if (!(s.gap > 0) || !(s.ratio < Real(0.25))) {
    std::ostringstream msg;
    msg << "block_diagonalize: premise unmet (sep - |X1EX1| - |X2EX2| = "
        << static_cast<double>(s.gap) << ", coupling ratio = " << static_cast<double>(s.ratio)
        << ")";
    throw PremiseError(msg.str());
  }

  // P1 (reduced r2 x r1): p a11 - a22 p = e21 - p e12 p.
  M p = M::Zero(r2, r1), q = M::Zero(r1, r2);
  if (r1 > 0 && r2 > 0) {
    const M a11 = M::Identity(r1, r1) + e11;
    const M t = detail::sylvester_matrix<Real>(M(-e22), M(-a11));
    // sylvester_matrix(a, b) acts as a P - P b; here -e22 P + P a11.
    const Eigen::PartialPivLU<M> lu(t);
    const Real tol = std::min(Real(1e-14), Real(10) * std::numeric_limits<Real>::epsilon());
    bool done = false;
    for (s.iterations = 1; s.iterations <= max_iter; ++s.iterations) {
      const M rhs = e21 - p * e12 * p;
      const M next = detail::reshape<Real>(Vec<Real>(lu.solve(detail::flatten<Real>(rhs))), r2, r1);
      const Real inc = max_abs<Real>(M(next - p));
      p = next;
      if (inc < tol * std::max(Real(1), max_abs<Real>(p))) {
        done = true;
        break;
      }
    }
    if (!done) {
      throw NumericalError("block_diagonalize: fixed-point iteration stalled after " +
                           std::to_string(max_iter) + " iterations");
    }
    // P2 (reduced r1 x r2): a1' q - q a2' = -e12.
    const M a1p = M::Identity(r1, r1) + e11 + e12 * p;
    const M a2p = e22 - p * e12;
    const Eigen::PartialPivLU<M> lu2(detail::sylvester_matrix<Real>(a1p, a2p));
    q = detail::reshape<Real>(Vec<Real>(lu2.solve(detail::flatten<Real>(M(-e12)))), r1, r2);
  }

  s.P1 = q2 * p * q1.adjoint();
  s.P2 = q1 * q * q2.adjoint();
  const M x1ex1 = s.X1 * e * s.X1, x1ex2 = s.X1 * e * s.X2;
  const M x2ex2 = s.X2 * e * s.X2;
  s.A1 = s.X1 + x1ex1 + x1ex2 * s.P1;
  s.A2 = x2ex2 - s.P1 * x1ex2;
  s.R1 = s.X1 + s.P1;
  s.R2 = s.X2 + s.P2 + s.P1 * s.P2;
  s.L1 = s.X1 + s.P2 * s.P1 - s.P2;
  s.L2 = s.X2 - s.P1;

  const M full = x1 + e;
  s.offdiag_residual = std::max(spectral_norm<Real>(M(s.L2 * full * s.R1)),
                                spectral_norm<Real>(M(s.L1 * full * s.R2)));
  s.reconstruction_error =
      max_abs<Real>(M(s.R1 * s.A1 * s.L1 + s.R2 * s.A2 * s.L2 - full));

  s.p1_norm = spectral_norm<Real>(s.P1);
  s.p2_norm = spectral_norm<Real>(s.P2);
  s.p1_bound = 2 * s.n21 / s.gap;
  const Real denom2 = s.sep - spectral_norm<Real>(M(x1ex1 + x1ex2 * s.P1)) -
                      spectral_norm<Real>(M(x2ex2 - s.P1 * x1ex2));
  s.p2_bound = denom2 > 0 ? s.n12 / denom2 : std::numeric_limits<Real>::infinity();
  s.p2_bound_stated = denom2 > 0 ? s.n21 / denom2 : std::numeric_limits<Real>::infinity();
  return s;
}

// ---------------------------------------------------------------------------
// Fourier system and decay model

template <class Real>
struct FourierBlock {
  int irrep = 0;
  int dim = 1;
  int multiplicity = 0;
  Mat<Real> F;
  Mat<Real> X1;
  std::optional<BlockSplit<Real>> split;
};

template <class Real>
struct DeltaCertificate {
  Real upper = 0;
  Real lower = 0;
  bool premise_met() const { return upper < Real(1) / Real(9); }
};

/// Group averages of the Choi trace-norm bounds on ||phi(g) - omega(g)||_dia.
template <class Real>
DeltaCertificate<Real> delta_certify(const FiniteGroupRep<Real>& rep,
                                     const std::vector<Mat<Real>>& phi) {
  const int n = rep.group.size();
  if (static_cast<int>(phi.size()) != n) throw DimensionError("delta_certify: size mismatch");
  DeltaCertificate<Real> c;
  for (int g = 0; g < n; ++g) {
    const auto b = diamond_bounds_liouville<Real>(Mat<Real>(phi[g] - rep.omega[g]));
    c.upper += b.upper;
    c.lower += b.lower;
  }
  c.upper /= Real(n);
  c.lower /= Real(n);
  return c;
}

template <class Real>
struct FourierSystem {
  std::vector<FourierBlock<Real>> blocks;
  DeltaCertificate<Real> delta;
};

/// Fourier blocks of phi for every irrep; the block split is computed for
/// irreps contained in omega.
template <class Real>
FourierSystem<Real> build_fourier_system(const FiniteGroupRep<Real>& rep,
                                         const std::vector<Mat<Real>>& phi) {
  FourierSystem<Real> sys;
  sys.delta = delta_certify(rep, phi);
  for (int l = 0; l < static_cast<int>(rep.irreps.size()); ++l) {
    FourierBlock<Real> b;
    b.irrep = l;
    b.dim = rep.irreps[l].dim;
    b.multiplicity = rep.multiplicity[l];
    b.F = fourier(rep, phi, l);
    b.X1 = fourier(rep, rep.omega, l);
    const Mat<Real> herm = (b.X1 + b.X1.adjoint()) / Real(2);
    if (max_abs<Real>(Mat<Real>(b.X1 * b.X1 - b.X1)) > Real(1e-10)) {
      throw NumericalError("F(omega) block is not a projector");
    }
    b.X1 = herm;
    if (b.multiplicity > 0) b.split = block_diagonalize<Real>(b.X1, Mat<Real>(b.F - b.X1));
    sys.blocks.push_back(std::move(b));
  }
  return sys;
}

template <class Real>
struct DecayTerm {
  int irrep = 0;
  /// n_lambda x n_lambda decay matrix and its coefficient matrix.
  Mat<Real> M;
  Mat<Real> A;
};

template <class Real>
struct DecayModel {
  std::vector<DecayTerm<Real>> terms;

  /// sum_lambda Tr(A_lambda M_lambda^m).
  Real predict(int m) const {
    std::complex<Real> total(0);
    for (const auto& t : terms) {
      Mat<Real> power = Mat<Real>::Identity(t.M.rows(), t.M.cols());
      for (int k = 0; k < m; ++k) power = power * t.M;
      total += (t.A * power).trace();
    }
    return std::real(total);
  }
};

/// M_lambda = X1 F (X1 + X2 P1) and
/// A_lambda = d_lambda X1 L1^dag (I kron |rho>><<Pi|)(conj(sigma(g_end^-1)) kron I) F R1 X1,
/// both compressed to an orthonormal basis of range(X1).
template <class Real>
DecayModel<Real> decay_model(const FiniteGroupRep<Real>& rep, const FourierSystem<Real>& sys,
                             const Vec<Real>& rho, const Vec<Real>& povm, int g_end = 0) {
  using M = Mat<Real>;
  const int dd = rep.op_dim();
  if (rho.size() != dd || povm.size() != dd) throw DimensionError("decay_model: SPAM vector size");
  DecayModel<Real> model;
  const M spam = rho * povm.adjoint();
  const int inv = rep.group.inverse(g_end);
  for (const auto& b : sys.blocks) {
    if (!b.split) continue;
    const auto& s = *b.split;
    const auto q1 = detail::projector_bases<Real>(b.X1).first;
    const M mfull = s.X1 * b.F * (s.X1 + s.X2 * s.P1);
    const M twist = kron<Real>(M(rep.irreps[b.irrep].matrices[inv].conjugate()),
                               M(M::Identity(dd, dd)));
    const M lift = kron<Real>(M(M::Identity(b.dim, b.dim)), spam);
    const M afull = Real(b.dim) * s.X1 * s.L1 * lift * twist * b.F * s.R1 * s.X1;
    model.terms.push_back({b.irrep, M(q1.adjoint() * mfull * q1), M(q1.adjoint() * afull * q1)});
  }
  return model;
}

// ---------------------------------------------------------------------------
// Exact survival probabilities

/// Group-averaged transfer map on (group element, operator) pairs:
/// block (g h, h) holds phi(g) / |G|.
template <class Real>
Mat<Real> transfer_matrix(const FiniteGroup<Real>& group, const std::vector<Mat<Real>>& phi) {
  const int n = group.size();
  const int dd = static_cast<int>(phi.front().rows());
  Mat<Real> t = Mat<Real>::Zero(n * dd, n * dd);
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h)
      t.block(group.product(g, h) * dd, h * dd, dd, dd) += phi[g] / Real(n);
  return t;
}

/// p(i, m) = <<Pi| phi^{*(m+1)}(g_end) |rho>> from the (m+1)-th power of the
/// transfer map.
template <class Real>
Real exact_survival(const FiniteGroup<Real>& group, const std::vector<Mat<Real>>& phi,
                    const Vec<Real>& rho, const Vec<Real>& povm, int g_end, int m) {
  const int n = group.size();
  const int dd = static_cast<int>(rho.size());
  const Mat<Real> t = transfer_matrix(group, phi);
  Vec<Real> state = Vec<Real>::Zero(n * dd);
  state.segment(FiniteGroup<Real>::identity() * dd, dd) = rho;
  for (int k = 0; k <= m; ++k) state = t * state;
  return std::real(povm.dot(state.segment(g_end * dd, dd))) * Real(n);
}

/// The same probability from the Fourier side, summing all irreps:
/// <<Pi| sum_lambda d_lambda Tr_V[F^{m+1} (conj(sigma(g_end^-1)) kron I)] |rho>>.
template <class Real>
Real fourier_survival(const FiniteGroupRep<Real>& rep, const std::vector<Mat<Real>>& phi,
                      const Vec<Real>& rho, const Vec<Real>& povm, int g_end, int m) {
  using M = Mat<Real>;
  const int dd = rep.op_dim();
  const int inv = rep.group.inverse(g_end);
  std::complex<Real> total(0);
  for (int l = 0; l < static_cast<int>(rep.irreps.size()); ++l) {
    const auto& sigma = rep.irreps[l];
    const M f = fourier(rep, phi, l);
    M power = f;
    for (int k = 0; k < m; ++k) power = power * f;
    const M y = power * kron<Real>(M(sigma.matrices[inv].conjugate()), M(M::Identity(dd, dd)));
    M reduced = M::Zero(dd, dd);
    for (int a = 0; a < sigma.dim; ++a) reduced += y.block(a * dd, a * dd, dd, dd);
    total += Real(sigma.dim) * povm.dot(reduced * rho);
  }
  return std::real(total);
}

// ---------------------------------------------------------------------------
// Noise instances and the theorem check

/// Random Hermitian generators with unit spectral norm, one per element.
template <class Real>
std::vector<Mat<Real>> random_kick_generators(int count, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Mat<Real>> out;
  for (int i = 0; i < count; ++i) {
    Mat<Real> g(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) g(r, c) = std::complex<Real>(Real(normal(rng)), Real(normal(rng)));
    Mat<Real> h = (g + g.adjoint()) / Real(2);
    h /= spectral_norm<Real>(h);
    out.push_back(h);
  }
  return out;
}

/// phi(g) = Liouville(exp(-i eps H_g)) omega(g).
template <class Real>
std::vector<Mat<Real>> kick_implementation(const FiniteGroupRep<Real>& rep,
                                           const std::vector<Mat<Real>>& generators, Real eps) {
  std::vector<Mat<Real>> phi;
  for (int g = 0; g < rep.group.size(); ++g) {
    const Mat<Real> u = expm_hermitian<Real>(generators.at(g), eps);
    phi.push_back(Mat<Real>(liouville_of_unitary<Real>(u) * rep.omega[g]));
  }
  return phi;
}

/// Kick strength whose certified delta (upper bound) equals `target`.
template <class Real>
Real calibrate_kick(const FiniteGroupRep<Real>& rep, const std::vector<Mat<Real>>& generators,
                    Real target) {
  if (!(target > 0)) throw ConfigError("calibrate_kick: target delta must be positive");
  auto delta = [&](Real eps) {
    return delta_certify(rep, kick_implementation(rep, generators, eps)).upper;
  };
  Real lo = 0, hi = target;
  while (delta(hi) < target) {
    hi *= 2;
    if (hi > Real(10)) throw ConfigError("calibrate_kick: target delta out of reach");
  }
  for (int it = 0; it < 200 && hi - lo > std::numeric_limits<Real>::epsilon() * hi; ++it) {
    const Real mid = (lo + hi) / 2;
    (delta(mid) < target ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

/// phi(g) = D_p omega(g) with D_p the depolarizing channel on one qubit.
template <class Real>
std::vector<Mat<Real>> depolarized_implementation(const FiniteGroupRep<Real>& rep, Real p) {
  const int dd = rep.op_dim();
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dd))));
  Vec<Real> omega_vec = vectorize<Real>(Mat<Real>(Mat<Real>::Identity(d, d)));
  const Mat<Real> dep = (1 - p) * Mat<Real>::Identity(dd, dd) +
                        p / Real(d) * omega_vec * omega_vec.adjoint();
  std::vector<Mat<Real>> phi;
  for (const auto& w : rep.omega) phi.push_back(Mat<Real>(dep * w));
  return phi;
}

template <class Real>
Real theorem_bound(Real delta, int m) {
  const Real base = delta * (2 + 4 * delta / (1 - 5 * delta));
  return Real(16) / (1 - 9 * delta) * std::pow(base, Real(m));
}

template <class Real>
struct TheoremReport {
  std::string group;
  Real delta_upper = 0;
  Real delta_lower = 0;
  Real kick = 0;
  std::vector<int> lengths;
  std::vector<Real> exact;
  std::vector<Real> model;
  std::vector<Real> residual;
  std::vector<Real> bound;
  bool lemma_bounds_hold = true;
  bool pass = false;
};

/// Exact p(i, m) against the decay model for m = 1..max_m with |0><0| in
/// and out.  Throws PremiseError when delta >= 1/9.
template <class Real>
TheoremReport<Real> verify_theorem(const FiniteGroupRep<Real>& rep,
                                   const std::vector<Mat<Real>>& phi, int max_m = 10) {
  TheoremReport<Real> r;
  r.group = rep.group.name();
  const DeltaCertificate<Real> delta = delta_certify(rep, phi);
  r.delta_upper = delta.upper;
  r.delta_lower = delta.lower;
  if (!delta.premise_met()) {
    throw PremiseError("theorem premise unmet: certified delta " +
                       std::to_string(static_cast<double>(delta.upper)) + " >= 1/9");
  }
  const FourierSystem<Real> sys = build_fourier_system(rep, phi);
  for (const auto& b : sys.blocks) {
    if (b.split) r.lemma_bounds_hold = r.lemma_bounds_hold && b.split->p1_bound_holds() &&
                                       b.split->p2_bound_holds();
  }
  const int d = rep.group.dim();
  Mat<Real> zero = Mat<Real>::Zero(d, d);
  zero(0, 0) = 1;
  const Vec<Real> v = vectorize<Real>(zero);
  const DecayModel<Real> model = decay_model(rep, sys, v, v, 0);
  r.pass = true;
  for (int m = 1; m <= max_m; ++m) {
    r.lengths.push_back(m);
    r.exact.push_back(exact_survival(rep.group, phi, v, v, 0, m));
    r.model.push_back(model.predict(m));
    r.residual.push_back(std::abs(r.exact.back() - r.model.back()));
    r.bound.push_back(theorem_bound(delta.upper, m));
    r.pass = r.pass && r.residual.back() <= r.bound.back();
  }
  return r;
}

}  // namespace rblab::theory
