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

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "rblab/groups.hpp"
#include "rblab/noise.hpp"
#include "test_util.hpp"

namespace rblab {
namespace {

using Catch::Approx;
using test::max_diff;

TEST_CASE("depolarizing channel", "[noise]") {
  CHECK(max_diff(kraus_to_superop(depolarizing(2, 0.0)).liouville(),
                 Matrix::Identity(16, 16)) < 1e-15);
  CHECK_THROWS_AS(depolarizing(1, 1.5), ConfigError);
  CHECK_THROWS_AS(depolarizing(1, -0.1), ConfigError);

  const double p = 0.3;
  Rng rng(4);
  const Matrix rho = test::random_density(4, rng);
  const Matrix expected = (1 - p) * rho + p * Matrix::Identity(4, 4) / 4.0;
  CHECK(max_diff(depolarizing(2, p).apply(rho), expected) < 1e-14);
}

TEST_CASE("depolarizing fidelity and decay parameter", "[noise]") {
  const KrausChannel k = depolarizing(2, 0.01);
  CHECK(std::abs(average_gate_fidelity(k) - 0.9925) < 1e-12);
  // sum |Tr A_k|^2 = 16 (1 - 15p/16) for the two-qubit Kraus set.
  const double s = 16 * (1 - 15 * 0.01 / 16);
  CHECK(std::abs(depolarizing_parameter(k) - (s - 1) / 15) < 1e-12);
  CHECK(depolarizing_parameter(k) == Approx(0.99).epsilon(1e-13));
  for (int n : {1, 2}) {
    for (double p : {0.0, 0.003, 0.2, 0.9}) {
      CHECK(std::abs(fidelity_from_alpha(1 - p, 1 << n) -
                     average_gate_fidelity(depolarizing(n, p))) < 1e-12);
    }
  }
}

TEST_CASE("amplitude damping", "[noise]") {
  CHECK(max_diff(kraus_to_superop(amplitude_damping(0.0)).liouville(),
                 Matrix::Identity(4, 4)) < 1e-15);
  const Matrix out = amplitude_damping(1.0).apply(DensityMatrix::basis_state(2, 1).matrix());
  CHECK(max_diff(out, DensityMatrix::basis_state(2, 0).matrix()) < 1e-15);
  CHECK_THROWS_AS(amplitude_damping(1.01), ConfigError);

  const KrausChannel both = tensor(amplitude_damping(0.01), amplitude_damping(0.01));
  const double closed = (std::pow(1 + std::sqrt(0.99), 4) + 4) / 20;
  CHECK(std::abs(average_gate_fidelity(both) - closed) < 1e-12);
  CHECK(std::abs(closed - 0.9920) < 1e-4);
}

TEST_CASE("thermal relaxation", "[noise]") {
  CHECK(max_diff(kraus_to_superop(thermal_relaxation(100, 20, 0)).liouville(),
                 Matrix::Identity(4, 4)) < 1e-15);
  CHECK_THROWS_AS(thermal_rates(20, 100, 5), ConfigError);
  CHECK_THROWS_AS(thermal_rates(0, 0, 5), ConfigError);

  // Times in ns: T1 = 100 ms, T2 = 20 ms, Tg = 20 ns.
  const double t1 = 1e8, t2 = 2e7, tg = 20;
  const ThermalRates r = thermal_rates(t1, t2, tg);
  CHECK(r.p_reset == Approx(1 - std::exp(-2e-7)).epsilon(1e-8));
  CHECK(r.p_dephase ==
        Approx((1 - r.p_reset) * (1 - std::exp(-tg / t2 + tg / t1))).epsilon(1e-8));
  CHECK(thermal_rates(50, 50, 10).p_dephase == 0.0);

  // Superoperator matches the stated mixture on random inputs.
  const double pr = 0.1, pz = 0.05;
  const double big_t1 = 1.0 / -std::log(1 - pr);
  const double inv_t2 = -std::log(1 - pz / (1 - pr)) + 1.0 / big_t1;
  const KrausChannel k = thermal_relaxation(big_t1, 1.0 / inv_t2, 1.0);
  Rng rng(8);
  const Matrix z = pauli<double>(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = test::random_density(2, rng);
    const Matrix expected = (1 - pr - pz) * rho + pz * z * rho * z +
                            pr * rho.trace() * DensityMatrix::basis_state(2, 0).matrix();
    CHECK(max_diff(k.apply(rho), expected) < 1e-12);
  }
}

TEST_CASE("coherent XY error", "[noise]") {
  CHECK(max_diff(coherent_xy_error(1.0, 0.0, 0.0).matrix(), Matrix::Identity(4, 4)) < 1e-15);

  // Eigen-decomposition oracle for the commuting generator.
  const double th = 0.8, dth = 0.01, dz = 0.01;
  const Matrix gen = dth * hamiltonian_xy() + (th + dth) * dz * hamiltonian_zz();
  Eigen::SelfAdjointEigenSolver<Matrix> es(gen);
  Vector phases(4);
  for (int k = 0; k < 4; ++k) phases(k) = std::polar(1.0, -es.eigenvalues()(k));
  const Matrix oracle = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  CHECK(max_diff(coherent_xy_error(th, dth, dz).matrix(), oracle) < 1e-13);

  // Composed gate at theta = pi equals exp of the full generator.
  const double pi = std::numbers::pi;
  const Matrix full_gen = hamiltonian_xy() + dz * hamiltonian_zz();
  const Matrix arg = Complex(0, -(pi + dth)) * full_gen;
  const Matrix full = arg.exp();
  const Matrix composed = coherent_xy_error(pi, dth, dz).matrix() * xy(pi);
  CHECK(max_diff(composed, full) < 1e-12);
}

TEST_CASE("coherent error infidelity is second order", "[noise]") {
  const auto infidelity = [](double dth) {
    return 1 - average_gate_fidelity(KrausChannel::unitary(coherent_xy_error(1.3, dth, 0.0)));
  };
  const double ratio = infidelity(0.02) / infidelity(0.01);
  CHECK(std::abs(ratio - 4.0) < 0.2);
}

TEST_CASE("fidelity formulas", "[noise]") {
  CHECK(average_gate_fidelity(KrausChannel::identity(4)) == Approx(1.0).epsilon(1e-15));
  CHECK(fidelity_from_alpha(1.0, 4) == 1.0);
  CHECK(fidelity_from_alpha(0.99, 4) == Approx(0.9925).epsilon(1e-14));
  CHECK_THROWS_AS(fidelity_from_alpha(0.0, 4), ConfigError);
  CHECK(interleaved_fidelity(0.97, 0.97, 4).fidelity == Approx(1.0));
  CHECK_FALSE(interleaved_fidelity(0.97, 0.96, 4).unphysical);
  CHECK(interleaved_fidelity(0.96, 0.97, 4).unphysical);

  // Noise-free part conjugated back to the identity frame has fidelity 1.
  Rng rng(9);
  const UnitaryOp u = haar_sample(4, rng);
  const Superoperator s = compose(unitary_to_superop(u.adjoint()), unitary_to_superop(u));
  CHECK(average_gate_fidelity(s) == Approx(1.0).epsilon(1e-12));
  CHECK(average_gate_fidelity(unitary_to_superop(u)) < 1.0);
}

TEST_CASE("constructed channels pass CPTP checks", "[noise]") {
  for (double p : {0.0, 0.01, 0.5, 1.0}) {
    CHECK(is_cptp(depolarizing(1, p)));
    CHECK(is_cptp(depolarizing(2, p)));
    CHECK(is_cptp(amplitude_damping(p)));
  }
  CHECK(is_cptp(thermal_relaxation(100, 20, 40)));
  CHECK(is_cptp(tensor(thermal_relaxation(100, 20, 40), amplitude_damping(0.2))));
}

TEST_CASE("noise model", "[noise]") {
  NoiseModel model;
  CHECK(model.is_noiseless());
  CHECK_THROWS_AS(model.set(GateKind::CNOT, {CoherentXYRecipe{0.01, 0.0}}), ConfigError);
  CHECK_THROWS_AS(model.set(GateKind::U2, {DepolarizingRecipe{2.0}}), ConfigError);
  model.set(GateKind::CNOT, {DepolarizingRecipe{0.01}});
  model.set(GateKind::U3, {AmplitudeDampingRecipe{0.01}});
  CHECK_FALSE(model.is_noiseless());

  // Unlisted kinds (U1 by default) are noiseless.
  CHECK(max_diff(model.channel(GateKind::U1, {0}, 2).liouville(),
                 Matrix::Identity(16, 16)) == 0.0);
  CHECK(average_gate_fidelity(model.channel(GateKind::CNOT, {0, 1}, 2)) ==
        Approx(0.9925).epsilon(1e-13));
  // Single-qubit recipe on qubit 1 leaves qubit 0 untouched.
  const Superoperator s = model.channel(GateKind::U3, {1}, 2);
  const Matrix expected = kraus_to_superop(embed_channel(amplitude_damping(0.01), {1}, 2))
                              .liouville();
  CHECK(max_diff(s.liouville(), expected) < 1e-15);

  NoiseModel xy_model;
  xy_model.set(GateKind::XY, {ThermalRecipe{1e5, 2e4, 100, true}, CoherentXYRecipe{0.01, 0.01}});
  CHECK(xy_model.has_coherent(GateKind::XY));
  const Superoperator half = xy_model.channel(GateKind::XY, {0, 1}, 2, std::numbers::pi / 2);
  const KrausChannel one = thermal_relaxation(1e5, 2e4, 50);
  CHECK(max_diff(half.liouville(), kraus_to_superop(tensor(one, one)).liouville()) < 1e-14);
  CHECK(max_diff(xy_model.coherent(GateKind::XY, 0.5),
                 coherent_xy_error(0.5, 0.01, 0.01).matrix()) < 1e-15);
}

TEST_CASE("gate kind names round trip", "[noise]") {
  for (GateKind k : {GateKind::U1, GateKind::U2, GateKind::U3, GateKind::CNOT,
                     GateKind::ISWAP, GateKind::XY, GateKind::NATIVE, GateKind::ELEMENT}) {
    CHECK(gate_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(gate_kind_from_string("bogus"), ConfigError);
}

}  // namespace
}  // namespace rblab
