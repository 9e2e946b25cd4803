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

#include <set>
#include <unsupported/Eigen/MatrixFunctions>

#include "rblab/groups.hpp"
#include "rblab/noise.hpp"
#include "test_util.hpp"

namespace rblab {
namespace {

using test::max_diff;

struct Moments {
  double mean = 0, sigma = 0;
};

template <class F>
Moments sample_moments(int n, F&& f) {
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = f();
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = (s2 / n - mean * mean) * n / (n - 1);
  return {mean, std::sqrt(var / n)};
}

TEST_CASE("Haar samples are unitary and reproducible", "[groups]") {
  Rng a(42), b(42);
  for (int i = 0; i < 20; ++i) {
    const UnitaryOp u = haar_sample(4, a);
    const UnitaryOp v = haar_sample(4, b);
    REQUIRE(u.matrix() == v.matrix());
    CHECK(max_diff(u.matrix().adjoint() * u.matrix(), Matrix::Identity(4, 4)) < 1e-12);
    const Superoperator round =
        compose(unitary_to_superop(u), unitary_to_superop(u.adjoint()));
    CHECK(max_diff(round.liouville(), Matrix::Identity(16, 16)) < 1e-10);
  }
  CHECK_THROWS_AS(haar_sample(1, a), ConfigError);
}

TEST_CASE("Haar moments for d = 4", "[groups][statistical]") {
  Rng rng(2024);
  constexpr int kSamples = 100000;
  const Moments entry =
      sample_moments(kSamples, [&] { return std::norm(haar_sample(4, rng).matrix()(0, 0)); });
  CHECK(std::abs(entry.mean - 0.25) < 3 * entry.sigma);
  const Moments trace =
      sample_moments(kSamples, [&] { return std::norm(haar_sample(4, rng).matrix().trace()); });
  CHECK(std::abs(trace.mean - 1.0) < 3 * trace.sigma);
}

TEST_CASE("Haar twirl of a channel is depolarizing", "[groups][statistical]") {
  // Channel-level 2-design check: the twirl of AD(gamma) is the depolarizing
  // channel with the same fidelity.
  Rng rng(77);
  const Superoperator ad = kraus_to_superop(amplitude_damping(0.3));
  Matrix acc = Matrix::Zero(4, 4);
  constexpr int kSamples = 20000;
  for (int i = 0; i < kSamples; ++i) {
    const Superoperator u = unitary_to_superop(haar_sample(2, rng));
    acc += u.liouville().adjoint() * ad.liouville() * u.liouville();
  }
  acc /= kSamples;
  const double alpha = (ad.liouville().trace().real() - 1) / 3;
  const Matrix expected = kraus_to_superop(depolarizing(1, 1 - alpha)).liouville();
  CHECK(max_diff(acc, expected) < 0.02);
}

TEST_CASE("single-qubit Clifford frequencies", "[groups][statistical]") {
  Rng rng(5);
  constexpr int kSamples = 100000;
  std::array<int, 24> counts{};
  const auto& table = CliffordTable::get(1);
  for (int i = 0; i < kSamples; ++i) {
    const UnitaryOp u = clifford_sample(1, rng);
    const auto idx = table.index_of(u.matrix());
    REQUIRE(idx.has_value());
    ++counts[*idx];
  }
  double chi2 = 0;
  const double expected = kSamples / 24.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Upper 0.001 quantile of chi-squared with 23 degrees of freedom.
  CHECK(chi2 < 49.728);
}

TEST_CASE("Clifford tables enumerate the groups", "[groups]") {
  const auto& one = CliffordTable::get(1);
  const auto& two = CliffordTable::get(2);
  CHECK(one.size() == 24);
  CHECK(two.size() == 11520);
  CHECK_THROWS_AS(CliffordTable::get(3), ConfigError);

  // Counting oracle: distinct Pauli-conjugation signatures.
  std::set<std::uint64_t> keys;
  for (int i = 0; i < two.size(); ++i) {
    const auto k = clifford_key(two.element(i), 2);
    REQUIRE(k.has_value());
    keys.insert(*k);
  }
  CHECK(keys.size() == 11520u);
  for (int i = 0; i < two.size(); i += 97) CHECK(two.index_of(two.element(i)) == i);
}

TEST_CASE("Clifford samples normalise the Pauli group", "[groups]") {
  Rng rng(13);
  for (int n : {1, 2}) {
    const int dim = 1 << n;
    for (int trial = 0; trial < 200; ++trial) {
      const Matrix u = clifford_sample(n, rng).matrix();
      for (int p = 1; p < dim * dim; ++p) {
        const Matrix img = u * pauli_string<double>(n, p) * u.adjoint();
        bool found = false;
        for (int q = 1; q < dim * dim && !found; ++q) {
          const Matrix pq = pauli_string<double>(n, q);
          found = max_diff(img, pq) < 1e-10 || max_diff(img, Matrix(-pq)) < 1e-10;
        }
        CHECK(found);
      }
    }
  }
  CHECK_FALSE(is_clifford(ry(0.3), 1));
}

TEST_CASE("two-qubit Clifford with its inverse is the identity", "[groups]") {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const UnitaryOp u = clifford_sample(2, rng);
    const Superoperator s = compose(unitary_to_superop(u.adjoint()), unitary_to_superop(u));
    REQUIRE(max_diff(s.liouville(), Matrix::Identity(16, 16)) < 1e-10);
  }
}

TEST_CASE("sample streams are deterministic and distinct", "[groups]") {
  Rng a = make_stream(7, 3, 4), b = make_stream(7, 3, 4), c = make_stream(7, 4, 3);
  CHECK(a() == b());
  CHECK(make_stream(7, 3, 4)() != c());
  const GateGroup g(GateGroup::Kind::Clifford, 2);
  Rng r1(1), r2(1);
  for (int i = 0; i < 10; ++i) CHECK(g.sample(r1).clifford_index == g.sample(r2).clifford_index);
}

TEST_CASE("sequence inversion", "[groups]") {
  const UnitaryOp id = UnitaryOp::identity(4);
  CHECK(max_diff(invert_product({}, id).matrix(), id.matrix()) == 0.0);

  Rng rng(31);
  const UnitaryOp u = haar_sample(4, rng);
  std::vector<UnitaryOp> one{u};
  CHECK(max_diff(invert_product(one, id).matrix(), u.matrix().adjoint()) < 1e-12);

  std::vector<UnitaryOp> seq;
  for (int i = 0; i < 5; ++i) seq.push_back(haar_sample(4, rng));
  const UnitaryOp g_end = haar_sample(4, rng);
  const UnitaryOp inv = invert_product(seq, g_end);
  Matrix total = Matrix::Identity(4, 4);
  for (const auto& g : seq) total = g.matrix() * total;
  total = inv.matrix() * total;
  CHECK(phase_equal<double>(total, g_end.matrix()));

  std::vector<UnitaryOp> bad{UnitaryOp::identity(2)};
  CHECK_THROWS_AS(invert_product(bad, id), DimensionError);
}

TEST_CASE("fixed gates", "[groups]") {
  CHECK(max_diff(xy(0.0), Matrix::Identity(4, 4)) < 1e-15);
  Matrix isw = Matrix::Zero(4, 4);
  isw(0, 0) = isw(3, 3) = 1;
  isw(1, 2) = isw(2, 1) = Complex(0, 1);
  CHECK(max_diff(iswap(), isw) < 1e-15);

  const Matrix arg = Complex(0, -0.7) * hamiltonian_xy();
  const Matrix oracle = arg.exp();
  CHECK(max_diff(xy(0.7), oracle) < 1e-12);

  // Qubit 0 is the most significant tensor factor.
  Matrix cx = Matrix::Zero(4, 4);
  cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1;
  CHECK(max_diff(cnot(0, 1), cx) == 0.0);
  CHECK(max_diff(swap_gate() * cnot(0, 1) * swap_gate(), cnot(1, 0)) == 0.0);
}

}  // namespace
}  // namespace rblab
