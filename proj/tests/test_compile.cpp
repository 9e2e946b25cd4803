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

#include <catch2/catch_amalgamated.hpp>

#include "rblab/compile.hpp"
#include "test_util.hpp"

namespace rblab {
namespace {

using test::max_diff;

constexpr double kPi = std::numbers::pi;

bool angle_close(double a, double b, double tol = 1e-10) {
  return std::abs(std::remainder(a - b, 2 * kPi)) < tol;
}

void check_classification(const Circuit& c) {
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::U1: CHECK(max_diff(g.matrix(), u1_matrix(g.params[0])) < 1e-10); break;
      case GateKind::U2: {
        // U2 equals U3 with theta = pi/2.
        CHECK(max_diff(g.matrix(), u3_matrix(kPi / 2, g.params[0], g.params[1])) < 1e-10);
        break;
      }
      default: break;
    }
  }
}

TEST_CASE("single-qubit matrices", "[compile]") {
  Matrix diag = Matrix::Identity(2, 2);
  diag(1, 1) = std::polar(1.0, 0.3);
  CHECK(max_diff(u1_matrix(0.3), diag) < 1e-15);
  CHECK(max_diff(u3_matrix(0.0, 0.1, 0.2), u1_matrix(0.3)) < 1e-15);
}

TEST_CASE("ZYZ decomposition", "[compile]") {
  const ElementaryGate id = zyz_decompose(Matrix::Identity(2, 2));
  CHECK(id.kind == GateKind::U1);
  CHECK(angle_close(id.params[0], 0.0));

  const ElementaryGate h = zyz_decompose(hadamard());
  REQUIRE(h.kind == GateKind::U2);
  CHECK(angle_close(h.params[0], 0.0));
  CHECK(angle_close(h.params[1], kPi));
  CHECK(max_diff(u2_matrix(0.0, kPi), hadamard()) < 1e-15);

  CHECK(zyz_decompose(pauli<double>(1)).kind == GateKind::U3);
  CHECK(zyz_decompose(rz(0.4)).kind == GateKind::U1);

  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const Matrix u = haar_sample(2, rng).matrix();
    const ElementaryGate g = zyz_decompose(u);
    CHECK(phase_distance<double>(g.matrix(), u) < 1e-10);
  }
}

TEST_CASE("recompose", "[compile]") {
  Circuit empty;
  CHECK(max_diff(recompose(empty), Matrix::Identity(4, 4)) == 0.0);
  Circuit one;
  one.gates.push_back(ElementaryGate::cnot_gate(0, 1));
  CHECK(max_diff(recompose(one), cnot(0, 1)) == 0.0);
  Circuit flipped;
  flipped.gates.push_back(ElementaryGate::cnot_gate(1, 0));
  CHECK(max_diff(recompose(flipped), cnot(1, 0)) == 0.0);
  Circuit bad;
  bad.gates.push_back(ElementaryGate::cnot_gate(0, 2));
  CHECK_THROWS_AS(recompose(bad), DimensionError);
}

TEST_CASE("KAK round trip on Haar samples", "[compile]") {
  Rng rng(1234);
  double worst_cnot = 0, worst_iswap = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix u = haar_sample(4, rng).matrix();
    const Circuit c = kak_compile(u, TwoQubitBasis::Cnot);
    REQUIRE(c.count(GateKind::CNOT) == 3);
    REQUIRE(c.single_qubit_count() <= 8);
    worst_cnot = std::max(worst_cnot, phase_distance<double>(recompose(c), u));
    const Circuit i = kak_compile(u, TwoQubitBasis::Iswap);
    REQUIRE(i.count(GateKind::ISWAP) == 6);
    REQUIRE(i.count(GateKind::CNOT) == 0);
    worst_iswap = std::max(worst_iswap, phase_distance<double>(recompose(i), u));
    if (trial % 50 == 0) {
      check_classification(c);
      check_classification(i);
    }
  }
  CHECK(worst_cnot < 1e-9);
  CHECK(worst_iswap < 1e-9);
}

TEST_CASE("KAK on structured gates", "[compile]") {
  for (const Matrix& u : {cnot(0, 1), cnot(1, 0), iswap(), swap_gate(), xy(0.7),
                          Matrix(Matrix::Identity(4, 4)),
                          kron<double>(hadamard(), phase_s()),
                          canonical_gate(kPi / 4, 0, 0), canonical_gate(0.3, 0.3, 0.3)}) {
    const Circuit c = kak_compile(u);
    CHECK(c.count(GateKind::CNOT) == 3);
    CHECK(phase_distance<double>(recompose(c), u) < 1e-9);
  }

  const Circuit local = kak_compile(Matrix::Identity(4, 4), TwoQubitBasis::Cnot, {true});
  CHECK(local.count(GateKind::CNOT) == 0);
  CHECK(local.count(GateKind::U1) == local.gates.size());
  CHECK(phase_distance<double>(recompose(local), Matrix::Identity(4, 4)) < 1e-9);

  const Matrix prod = kron<double>(ry(0.2), rz(0.9));
  const Circuit lp = kak_compile(prod, TwoQubitBasis::Cnot, {true});
  CHECK(lp.count(GateKind::CNOT) == 0);
  CHECK(phase_distance<double>(recompose(lp), prod) < 1e-9);
}

TEST_CASE("CNOT from two iSWAPs", "[compile]") {
  const Matrix h = hadamard(), s = phase_s();
  const Matrix built = kron<double>(Matrix(s * h), Matrix(h * s.adjoint())) * iswap() *
                       kron<double>(Matrix::Identity(2, 2), h) * iswap() * kron<double>(h, h);
  CHECK(phase_equal<double>(built, cnot(0, 1)));
}

TEST_CASE("Clifford compilation through class structure", "[compile]") {
  const auto& table = CliffordTable::get(2);
  double total_cnots = 0;
  for (int idx = 0; idx < table.size(); ++idx) {
    const Circuit c = compile_clifford2(idx);
    total_cnots += c.count(GateKind::CNOT);
    if (idx % 37 == 0) {
      REQUIRE(phase_distance<double>(recompose(c), table.element(idx)) < 1e-9);
      const Circuit i = compile_clifford2(idx, TwoQubitBasis::Iswap);
      REQUIRE(i.count(GateKind::ISWAP) == 2 * c.count(GateKind::CNOT));
      REQUIRE(phase_distance<double>(recompose(i), table.element(idx)) < 1e-9);
    }
  }
  CHECK(total_cnots / table.size() == Catch::Approx(1.5));
}

TEST_CASE("KAK decomposition parts", "[compile]") {
  Rng rng(8);
  const Matrix u = haar_sample(4, rng).matrix();
  const KakDecomposition k = kak_decompose(u);
  const Matrix rebuilt = k.phase * kron<double>(k.after0, k.after1) *
                         canonical_gate(k.a, k.b, k.c) * kron<double>(k.before0, k.before1);
  CHECK(max_diff(rebuilt, u) < 1e-9);
}

}  // namespace
}  // namespace rblab
