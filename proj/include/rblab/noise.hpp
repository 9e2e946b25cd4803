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

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rblab/qcore.hpp"

namespace rblab {

/// Kinds of operations a noise recipe can be attached to.
enum class GateKind { U1, U2, U3, CNOT, ISWAP, XY, NATIVE, ELEMENT };

inline std::string to_string(GateKind k) {
  switch (k) {
    case GateKind::U1: return "U1";
    case GateKind::U2: return "U2";
    case GateKind::U3: return "U3";
    case GateKind::CNOT: return "CNOT";
    case GateKind::ISWAP: return "ISWAP";
    case GateKind::XY: return "XY";
    case GateKind::NATIVE: return "NATIVE";
    case GateKind::ELEMENT: return "ELEMENT";
  }
  return "?";
}

inline GateKind gate_kind_from_string(const std::string& s) {
  for (GateKind k : {GateKind::U1, GateKind::U2, GateKind::U3, GateKind::CNOT,
                     GateKind::ISWAP, GateKind::XY, GateKind::NATIVE,
                     GateKind::ELEMENT}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown gate kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Channel constructors

/// (1-p) rho + p I / 2^n, as the Pauli-mixture Kraus set.
inline KrausChannel depolarizing(int num_qubits, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("depolarizing: p must lie in [0, 1]");
  }
  if (num_qubits < 1 || num_qubits > 4) {
    throw ConfigError("depolarizing: unsupported qubit count");
  }
  const int n_paulis = 1 << (2 * num_qubits);
  const double share = p / n_paulis;
  std::vector<Matrix> kraus;
  kraus.reserve(n_paulis);
  kraus.push_back(std::sqrt(1.0 - p + share) *
                  pauli_string<double>(num_qubits, 0));
  if (share > 0.0) {
    for (int i = 1; i < n_paulis; ++i) {
      kraus.push_back(std::sqrt(share) * pauli_string<double>(num_qubits, i));
    }
  }
  return KrausChannel(Eigen::Index{1} << num_qubits, std::move(kraus));
}

inline KrausChannel amplitude_damping(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError("amplitude_damping: gamma must lie in [0, 1]");
  }
  Matrix a0 = Matrix::Zero(2, 2);
  a0(0, 0) = 1.0;
  a0(1, 1) = std::sqrt(1.0 - gamma);
  Matrix a1 = Matrix::Zero(2, 2);
  a1(0, 1) = std::sqrt(gamma);
  return KrausChannel(2, {a0, a1});
}

struct ThermalRates {
  double p_reset = 0;
  double p_dephase = 0;
};

/// Reset and dephasing probabilities for gate time tg (all times in ns).
inline ThermalRates thermal_rates(double t1, double t2, double tg) {
  if (!(t1 > 0.0 && t2 > 0.0) || tg < 0.0) {
    throw ConfigError("thermal_relaxation: T1, T2 must be > 0 and Tg >= 0");
  }
  if (t2 > t1) {
    throw ConfigError("thermal_relaxation: requires T2 <= T1");
  }
  ThermalRates r;
  r.p_reset = -std::expm1(-tg / t1);
  r.p_dephase = (1.0 - r.p_reset) * -std::expm1(-tg / t2 + tg / t1);
  return r;
}

/// (1 - p_r - p_z) rho + p_z Z rho Z + p_r Tr[rho] |0><0|, single qubit.
inline KrausChannel thermal_relaxation(double t1, double t2, double tg) {
  const ThermalRates r = thermal_rates(t1, t2, tg);
  const double keep = std::max(0.0, 1.0 - r.p_reset - r.p_dephase);
  std::vector<Matrix> kraus;
  kraus.push_back(std::sqrt(keep) * Matrix::Identity(2, 2));
  if (r.p_dephase > 0.0) kraus.push_back(std::sqrt(r.p_dephase) * pauli<double>(3));
  if (r.p_reset > 0.0) {
    Matrix k0 = Matrix::Zero(2, 2);
    k0(0, 0) = std::sqrt(r.p_reset);
    Matrix k1 = Matrix::Zero(2, 2);
    k1(0, 1) = std::sqrt(r.p_reset);
    kraus.push_back(k0);
    kraus.push_back(k1);
  }
  return KrausChannel(2, std::move(kraus));
}

/// H_XY = -(XX + YY) / 4.
inline Matrix hamiltonian_xy() {
  return -0.25 * (kron<double>(pauli<double>(1), pauli<double>(1)) +
                  kron<double>(pauli<double>(2), pauli<double>(2)));
}

/// H_ZZ = -ZZ / 4.
inline Matrix hamiltonian_zz() {
  return -0.25 * kron<double>(pauli<double>(3), pauli<double>(3));
}

/// Extra unitary multiplying the ideal XY(theta) when the evolution time is
/// off by d_theta and a relative ZZ coupling d_z is present.
inline UnitaryOp coherent_xy_error(double theta, double d_theta, double d_z) {
  const Matrix h = d_theta * hamiltonian_xy() +
                   (theta + d_theta) * d_z * hamiltonian_zz();
  return UnitaryOp(expm_hermitian<double>(h, 1.0));
}

/// Kraus sets of two channels acting on disjoint subsystems (a on the left).
inline KrausChannel tensor(const KrausChannel& a, const KrausChannel& b) {
  std::vector<Matrix> kraus;
  kraus.reserve(a.operators().size() * b.operators().size());
  for (const auto& x : a.operators())
    for (const auto& y : b.operators()) kraus.push_back(kron<double>(x, y));
  return KrausChannel(a.dim() * b.dim(), std::move(kraus));
}

/// Lift a channel on `qubits` to the full n-qubit register.
inline KrausChannel embed_channel(const KrausChannel& k,
                                  const std::vector<int>& qubits,
                                  int num_qubits) {
  std::vector<Matrix> kraus;
  kraus.reserve(k.operators().size());
  for (const auto& a : k.operators()) {
    kraus.push_back(embed<double>(a, qubits, num_qubits));
  }
  return KrausChannel(Eigen::Index{1} << num_qubits, std::move(kraus));
}

// ---------------------------------------------------------------------------
// Fidelity formulas

/// (sum_k |Tr A_k|^2 + D) / (D^2 + D).
inline double average_gate_fidelity(const KrausChannel& k) {
  const double d = static_cast<double>(k.dim());
  double s = 0;
  for (const auto& a : k.operators()) s += std::norm(a.trace());
  return (s + d) / (d * d + d);
}

/// Same quantity from the Liouville matrix: Tr S = sum_k |Tr A_k|^2.
inline double average_gate_fidelity(const Superoperator& s) {
  const double d = static_cast<double>(s.dim());
  return (s.liouville().trace().real() + d) / (d * d + d);
}

/// Depolarizing parameter (sum_k |Tr A_k|^2 - 1) / (D^2 - 1).
inline double depolarizing_parameter(const KrausChannel& k) {
  const double d = static_cast<double>(k.dim());
  double s = 0;
  for (const auto& a : k.operators()) s += std::norm(a.trace());
  return (s - 1.0) / (d * d - 1.0);
}

inline double fidelity_from_alpha(double alpha, int dim) {
  if (alpha == 0.0) throw ConfigError("fidelity_from_alpha: alpha must be nonzero");
  return alpha + (1.0 - alpha) / dim;
}

struct InterleavedFidelity {
  double fidelity = 1.0;
  /// alpha_interleaved exceeded alpha_reference; the fit is unphysical.
  bool unphysical = false;
};

inline InterleavedFidelity interleaved_fidelity(double alpha, double alpha_int,
                                                int dim) {
  if (alpha == 0.0) throw ConfigError("interleaved_fidelity: alpha must be nonzero");
  const double d = static_cast<double>(dim);
  return {1.0 - (d - 1.0) / d * (1.0 - alpha_int / alpha), alpha_int > alpha};
}

// ---------------------------------------------------------------------------
// Noise model

struct DepolarizingRecipe {
  double p = 0;
  /// Act on the whole register instead of the gate's own qubits.
  bool all_qubits = false;
};
struct AmplitudeDampingRecipe {
  double gamma = 0;
};
/// Times in nanoseconds.
struct ThermalRecipe {
  double t1 = 0;
  double t2 = 0;
  double tg = 0;
  /// Gate time proportional to the XY angle: tg * theta / pi.
  bool scale_with_theta = false;
};
struct CoherentXYRecipe {
  double d_theta = 0;
  double d_z = 0;
};

using ChannelRecipe = std::variant<DepolarizingRecipe, AmplitudeDampingRecipe,
                                   ThermalRecipe, CoherentXYRecipe>;

/// Per-gate-kind recipes. Incoherent recipes are applied after the ideal gate
/// in listed order; a coherent XY recipe is fused into the gate unitary.
class NoiseModel {
 public:
  NoiseModel() = default;

  void set(GateKind kind, std::vector<ChannelRecipe> recipes) {
    for (const auto& r : recipes) {
      if (std::holds_alternative<CoherentXYRecipe>(r) && kind != GateKind::ISWAP &&
          kind != GateKind::XY && kind != GateKind::NATIVE) {
        throw ConfigError("coherent_xy noise only applies to ISWAP, XY or NATIVE");
      }
      if (const auto* d = std::get_if<DepolarizingRecipe>(&r)) {
        if (!(d->p >= 0.0 && d->p <= 1.0)) throw ConfigError("depolarizing: p outside [0, 1]");
      }
      if (const auto* a = std::get_if<AmplitudeDampingRecipe>(&r)) {
        if (!(a->gamma >= 0.0 && a->gamma <= 1.0)) {
          throw ConfigError("amplitude_damping: gamma outside [0, 1]");
        }
      }
      if (const auto* t = std::get_if<ThermalRecipe>(&r)) thermal_rates(t->t1, t->t2, t->tg);
    }
    recipes_[kind] = std::move(recipes);
  }

  bool has(GateKind kind) const { return recipes_.count(kind) > 0; }

  const std::vector<ChannelRecipe>& recipes(GateKind kind) const {
    static const std::vector<ChannelRecipe> kNone;
    const auto it = recipes_.find(kind);
    return it == recipes_.end() ? kNone : it->second;
  }

  bool is_noiseless() const {
    for (const auto& [kind, list] : recipes_)
      if (!list.empty()) return false;
    return true;
  }

  /// Incoherent part for a gate of `kind` on `targets` in an n-qubit register.
  Superoperator channel(GateKind kind, const std::vector<int>& targets,
                        int num_qubits, double theta = std::numbers::pi) const {
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    Matrix total = Matrix::Identity(dim * dim, dim * dim);
    for (const auto& recipe : recipes(kind)) {
      if (std::holds_alternative<CoherentXYRecipe>(recipe)) continue;
      const KrausChannel k = recipe_channel(recipe, targets, num_qubits, theta);
      total = liouville_of_kraus<double>(k.operators()) * total;
    }
    return Superoperator(total);
  }

  /// Coherent over-rotation fused with an XY(theta) gate; identity otherwise.
  Matrix coherent(GateKind kind, double theta = std::numbers::pi) const {
    Matrix u = Matrix::Identity(4, 4);
    for (const auto& recipe : recipes(kind)) {
      if (const auto* c = std::get_if<CoherentXYRecipe>(&recipe)) {
        u = coherent_xy_error(theta, c->d_theta, c->d_z).matrix() * u;
      }
    }
    return u;
  }

  bool has_coherent(GateKind kind) const {
    for (const auto& recipe : recipes(kind))
      if (std::holds_alternative<CoherentXYRecipe>(recipe)) return true;
    return false;
  }

  static KrausChannel recipe_channel(const ChannelRecipe& recipe,
                                     const std::vector<int>& targets,
                                     int num_qubits, double theta) {
    std::vector<int> all(num_qubits);
    for (int q = 0; q < num_qubits; ++q) all[q] = q;
    if (const auto* d = std::get_if<DepolarizingRecipe>(&recipe)) {
      const auto& qs = d->all_qubits ? all : targets;
      return embed_channel(depolarizing(static_cast<int>(qs.size()), d->p), qs,
                           num_qubits);
    }
    if (const auto* a = std::get_if<AmplitudeDampingRecipe>(&recipe)) {
      return per_qubit(amplitude_damping(a->gamma), targets, num_qubits);
    }
    if (const auto* t = std::get_if<ThermalRecipe>(&recipe)) {
      const double tg =
          t->scale_with_theta ? t->tg * std::abs(theta) / std::numbers::pi : t->tg;
      return per_qubit(thermal_relaxation(t->t1, t->t2, tg), targets, num_qubits);
    }
    return KrausChannel::identity(Eigen::Index{1} << num_qubits);
  }

 private:
  static KrausChannel per_qubit(const KrausChannel& single,
                                const std::vector<int>& targets, int num_qubits) {
    KrausChannel out = KrausChannel::identity(Eigen::Index{1} << num_qubits);
    for (int q : targets) {
      const KrausChannel lifted = embed_channel(single, {q}, num_qubits);
      std::vector<Matrix> kraus;
      for (const auto& x : lifted.operators())
        for (const auto& y : out.operators()) kraus.push_back(x * y);
      out = KrausChannel(out.dim(), std::move(kraus));
    }
    return out;
  }

  std::map<GateKind, std::vector<ChannelRecipe>> recipes_;
};

}  // namespace rblab
