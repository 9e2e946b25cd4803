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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "rblab/compile.hpp"
#include "rblab/groups.hpp"
#include "rblab/noise.hpp"
#include "rblab/qcore.hpp"

namespace rblab {

/// Where noise is attached: after every compiled elementary gate, or once
/// after every group element (recipes under GateKind::ELEMENT).
enum class NoiseGranularity { Elementary, Element };

/// Fixed gate inserted after every random element in interleaved runs.
struct InterleavedGate {
  std::string name;
  double theta = std::numbers::pi;
  Matrix unitary;
  /// Recipe key used when the model has no NATIVE entry.
  GateKind noise_key = GateKind::NATIVE;

  /// "CNOT", "ISWAP", "SWAP" or "XY" (the last takes theta).
  static InterleavedGate named(const std::string& name,
                               double theta = std::numbers::pi) {
    InterleavedGate g;
    g.name = name;
    g.theta = theta;
    if (name == "CNOT") {
      g.unitary = cnot(0, 1);
      g.noise_key = GateKind::CNOT;
    } else if (name == "ISWAP") {
      g.unitary = iswap();
      g.theta = std::numbers::pi;
      g.noise_key = GateKind::ISWAP;
    } else if (name == "XY") {
      g.unitary = xy(theta);
      g.noise_key = GateKind::XY;
    } else if (name == "SWAP") {
      g.unitary = swap_gate();
    } else {
      throw ConfigError("unknown interleaved gate '" + name + "'");
    }
    return g;
  }
};

struct RbConfig {
  GateGroup::Kind group = GateGroup::Kind::Clifford;
  int num_qubits = 2;
  std::vector<int> lengths;
  int circuits_per_length = 30;
  /// 0 means exact probabilities.
  int shots = 5000;
  /// Sample the full computational-basis distribution instead of a
  /// binomial on the survival outcome.
  bool multinomial = false;
  TwoQubitBasis basis = TwoQubitBasis::Cnot;
  NoiseModel noise;
  NoiseGranularity granularity = NoiseGranularity::Elementary;
  std::optional<InterleavedGate> interleaved;
  std::optional<Matrix> g_end;
  /// Computational-basis outcome counted as survival (|0...0> by default).
  int survival_outcome = 0;
  /// Channels applied to the initial state and before measurement.
  std::optional<Superoperator> spam_prep;
  std::optional<Superoperator> spam_meas;
  std::uint64_t seed = 1;

  int dim() const { return 1 << num_qubits; }

  void validate() const {
    if (num_qubits < 1 || num_qubits > 2) throw ConfigError("num_qubits must be 1 or 2");
    if (lengths.empty()) throw ConfigError("lengths must not be empty");
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (lengths[i] < 1) throw ConfigError("lengths must be positive");
      if (i > 0 && lengths[i] <= lengths[i - 1]) {
        throw ConfigError("lengths must be strictly increasing");
      }
    }
    if (circuits_per_length < 1) throw ConfigError("circuits_per_length must be >= 1");
    if (shots < 0) throw ConfigError("shots must be >= 0");
    if (survival_outcome < 0 || survival_outcome >= dim()) {
      throw ConfigError("survival_outcome out of range");
    }
    if (interleaved && interleaved->unitary.rows() != dim()) {
      throw ConfigError("interleaved gate dimension does not match the register");
    }
    if (g_end && g_end->rows() != dim()) throw ConfigError("g_end dimension mismatch");
    for (const auto* s : {&spam_prep, &spam_meas}) {
      if (*s && (*s)->dim() != dim()) throw ConfigError("SPAM channel dimension mismatch");
    }
    if (num_qubits == 1 && interleaved && interleaved->unitary.rows() != 2) {
      throw ConfigError("interleaved gate needs two qubits");
    }
  }
};

// ---------------------------------------------------------------------------
// Sequences

struct Sequence {
  std::vector<GroupElement> gates;
  bool interleaved = false;
  GroupElement inversion;
};

namespace detail {

inline GroupElement wrap_element(const GateGroup& group, const UnitaryOp& u) {
  if (group.kind() == GateGroup::Kind::Clifford) {
    const auto idx = CliffordTable::get(group.num_qubits()).index_of(u.matrix());
    return {u, idx};
  }
  return {u, std::nullopt};
}

}  // namespace detail

/// m random elements, optional interleaved gate after each, then the
/// inversion element that maps the ideal product to g_end.
inline Sequence generate_sequence(int m, const RbConfig& config, const GateGroup& group,
                                  Rng& rng) {
  if (m < 1) throw ConfigError("generate_sequence: m must be >= 1");
  Sequence seq;
  seq.interleaved = config.interleaved.has_value();
  seq.gates.reserve(m);
  std::vector<UnitaryOp> applied;
  applied.reserve(seq.interleaved ? 2 * m : m);
  std::optional<UnitaryOp> v;
  if (seq.interleaved) v = UnitaryOp(config.interleaved->unitary);
  for (int i = 0; i < m; ++i) {
    seq.gates.push_back(group.sample(rng));
    applied.push_back(seq.gates.back().unitary);
    if (v) applied.push_back(*v);
  }
  const UnitaryOp g_end = config.g_end ? UnitaryOp(*config.g_end)
                                       : UnitaryOp::identity(config.dim());
  seq.inversion = detail::wrap_element(group, invert_product(applied, g_end));
  return seq;
}

// ---------------------------------------------------------------------------
// Simulation

class Simulator {
 public:
  explicit Simulator(const RbConfig& config) : config_(config) {
    config_.validate();
    const int n = config_.num_qubits;
    for (GateKind k : {GateKind::U1, GateKind::U2, GateKind::U3}) {
      for (int q = 0; q < n; ++q) cache(k, {q});
    }
    if (n == 2) {
      for (GateKind k : {GateKind::CNOT, GateKind::ISWAP}) {
        cache(k, {0, 1});
        cache(k, {1, 0});
      }
      iswap_actual_ = Matrix(config_.noise.coherent(GateKind::ISWAP) * iswap());
    }
    std::vector<int> all(n);
    for (int q = 0; q < n; ++q) all[q] = q;
    cache(GateKind::ELEMENT, all);
    if (config_.interleaved) {
      const auto& v = *config_.interleaved;
      const GateKind key = config_.noise.has(GateKind::NATIVE) ? GateKind::NATIVE : v.noise_key;
      const bool xy_family = v.name == "XY" || v.name == "ISWAP";
      interleaved_ideal_ = v.unitary;
      interleaved_actual_ =
          xy_family ? Matrix(config_.noise.coherent(key, v.theta) * v.unitary) : v.unitary;
      const Superoperator s = config_.noise.channel(key, all, n, v.theta);
      if (!is_identity(s.liouville())) interleaved_noise_ = s.liouville();
    }
    group_ = GateGroup(config_.group, n);
    const Eigen::Index d = config_.dim();
    rho0_ = Matrix::Zero(d, d);
    rho0_(0, 0) = 1.0;
    if (config_.spam_prep) rho0_ = config_.spam_prep->apply(rho0_);
  }

  const RbConfig& config() const { return config_; }
  const GateGroup& group() const { return group_; }

  /// Elementary-gate circuit used for a group element.
  Circuit compile(const GroupElement& g) const {
    if (config_.num_qubits == 1) return compile_single_qubit(g.unitary.matrix());
    if (g.clifford_index) return compile_clifford2(*g.clifford_index, config_.basis);
    return kak_compile(g.unitary.matrix(), config_.basis);
  }

  /// Noisy implementation of one group element as a superoperator.
  Superoperator element_channel(const GroupElement& g) const {
    const Eigen::Index d = config_.dim();
    Matrix total = Matrix::Identity(d * d, d * d);
    for (const Step& s : steps(g)) {
      total = liouville_of_unitary<double>(s.unitary) * total;
      if (s.noise) total = *s.noise * total;
    }
    return Superoperator(total);
  }

  Superoperator interleaved_channel() const {
    if (!config_.interleaved) throw ConfigError("no interleaved gate configured");
    Matrix s = liouville_of_unitary<double>(interleaved_actual_);
    if (interleaved_noise_) s = *interleaved_noise_ * s;
    return Superoperator(s);
  }

  /// State just before measurement, by step-by-step evolution.
  Matrix final_state(const Sequence& seq) const {
    Matrix rho = rho0_;
    auto run = [&](const std::vector<Step>& list) {
      for (const Step& s : list) apply(rho, s);
    };
    const auto v = interleaved_steps();
    for (const auto& g : seq.gates) {
      run(steps(g));
      if (seq.interleaved) run(v);
    }
    run(steps(seq.inversion));
    if (config_.spam_meas) rho = config_.spam_meas->apply(rho);
    return rho;
  }

  /// Outcome distribution over the computational basis.
  std::vector<double> probabilities(const Sequence& seq) const {
    const Matrix rho = final_state(seq);
    std::vector<double> p(rho.rows());
    for (Eigen::Index i = 0; i < rho.rows(); ++i) p[i] = checked(rho(i, i).real());
    return p;
  }

  double survival(const Sequence& seq) const {
    return probabilities(seq)[config_.survival_outcome];
  }

  /// Whole-sequence superoperator by one Liouville product chain.
  Superoperator sequence_superop(const Sequence& seq) const {
    const Eigen::Index d = config_.dim();
    Matrix total = Matrix::Identity(d * d, d * d);
    const Matrix v = seq.interleaved ? interleaved_channel().liouville() : Matrix();
    for (const auto& g : seq.gates) {
      total = element_channel(g).liouville() * total;
      if (seq.interleaved) total = v * total;
    }
    total = element_channel(seq.inversion).liouville() * total;
    return Superoperator(total);
  }

  /// <<E_M^dagger(Pi)| S_total |E_SP(rho0)>>, the chain form of survival().
  double survival_chain(const Sequence& seq) const {
    const Eigen::Index d = config_.dim();
    Matrix total = sequence_superop(seq).liouville();
    if (config_.spam_meas) total = config_.spam_meas->liouville() * total;
    Matrix pi = Matrix::Zero(d, d);
    pi(config_.survival_outcome, config_.survival_outcome) = 1.0;
    const Complex p = vectorize<double>(pi).dot(total * vectorize<double>(rho0_));
    return checked(p.real());
  }

 private:
  struct Step {
    Matrix unitary;
    const Matrix* noise = nullptr;
  };

  static bool is_identity(const Matrix& m) {
    return max_abs<double>(Matrix(m - Matrix::Identity(m.rows(), m.cols()))) == 0.0;
  }

  static double checked(double p) {
    if (!(p > -1e-9 && p < 1 + 1e-9)) {
      throw NumericalError("probability " + std::to_string(p) + " outside [0, 1]");
    }
    return std::clamp(p, 0.0, 1.0);
  }

  void cache(GateKind kind, const std::vector<int>& qubits) {
    const Superoperator s = config_.noise.channel(kind, qubits, config_.num_qubits);
    if (!is_identity(s.liouville())) noise_[{kind, qubits}] = s.liouville();
  }

  const Matrix* noise_for(GateKind kind, const std::vector<int>& qubits) const {
    const auto it = noise_.find({kind, qubits});
    return it == noise_.end() ? nullptr : &it->second;
  }

  std::vector<Step> steps(const GroupElement& g) const {
    const int n = config_.num_qubits;
    if (config_.granularity == NoiseGranularity::Element) {
      std::vector<int> all(n);
      for (int q = 0; q < n; ++q) all[q] = q;
      return {Step{g.unitary.matrix(), noise_for(GateKind::ELEMENT, all)}};
    }
    const Circuit c = compile(g);
    std::vector<Step> out;
    out.reserve(c.gates.size());
    for (const auto& gate : c.gates) {
      const Matrix local = gate.kind == GateKind::ISWAP ? iswap_actual_ : gate.matrix();
      out.push_back({embed<double>(local, gate.qubits, n), noise_for(gate.kind, gate.qubits)});
    }
    return out;
  }

  std::vector<Step> interleaved_steps() const {
    if (!config_.interleaved) return {};
    return {Step{interleaved_actual_, interleaved_noise_ ? &*interleaved_noise_ : nullptr}};
  }

  static void apply(Matrix& rho, const Step& s) {
    rho = s.unitary * rho * s.unitary.adjoint();
    if (s.noise) rho = unvectorize<double>(Vector(*s.noise * vectorize<double>(rho)));
  }

  RbConfig config_;
  GateGroup group_{GateGroup::Kind::Haar, 1};
  Matrix rho0_;
  Matrix iswap_actual_;
  Matrix interleaved_ideal_, interleaved_actual_;
  std::optional<Matrix> interleaved_noise_;
  std::map<std::pair<GateKind, std::vector<int>>, Matrix> noise_;
};

// ---------------------------------------------------------------------------
// Experiment loop

struct LengthData {
  int m = 0;
  std::vector<double> survival;
  double mean = 0;
  double std_err = 0;
};

struct RbDataset {
  int num_qubits = 2;
  int shots = 0;
  bool interleaved = false;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<LengthData> lengths;

  int dim() const { return 1 << num_qubits; }
};

namespace detail {

[[noreturn]] inline void rethrow_with_context(std::exception_ptr e, int m, int circuit) {
  const std::string where =
      " (m=" + std::to_string(m) + ", circuit=" + std::to_string(circuit) + ")";
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError& x) {
    throw ConfigError(x.what() + where);
  } catch (const DimensionError& x) {
    throw DimensionError(x.what() + where);
  } catch (const NumericalError& x) {
    throw NumericalError(x.what() + where);
  }
}

inline double sample_survival(const Simulator& sim, const Sequence& seq, Rng& rng) {
  const RbConfig& cfg = sim.config();
  if (cfg.shots == 0) return sim.survival(seq);
  if (!cfg.multinomial) {
    std::binomial_distribution<int> draw(cfg.shots, sim.survival(seq));
    return static_cast<double>(draw(rng)) / cfg.shots;
  }
  // Multinomial by sequential conditional binomials.
  const std::vector<double> p = sim.probabilities(seq);
  int left = cfg.shots;
  double mass = 1.0;
  int hit = 0;
  for (std::size_t i = 0; i < p.size() && left > 0; ++i) {
    const double q = mass > 0 ? std::clamp(p[i] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<int> draw(left, q);
    const int k = i + 1 == p.size() ? left : draw(rng);
    if (static_cast<int>(i) == cfg.survival_outcome) hit = k;
    left -= k;
    mass -= p[i];
  }
  return static_cast<double>(hit) / cfg.shots;
}

}  // namespace detail

/// Survival estimate for circuit `index` at length m; depends only on
/// (seed, m, index).
inline double run_circuit(const Simulator& sim, int m, int index) {
  Rng rng = make_stream(sim.config().seed, static_cast<std::uint64_t>(m),
                        static_cast<std::uint64_t>(index));
  const Sequence seq = generate_sequence(m, sim.config(), sim.group(), rng);
  return detail::sample_survival(sim, seq, rng);
}

/// Runs the (m, circuit) grid on `threads` workers (0 = hardware count).
inline RbDataset run_experiment(const RbConfig& config, int threads = 1) {
  const Simulator sim(config);
  const int k = config.circuits_per_length;
  const int total = static_cast<int>(config.lengths.size()) * k;
  std::vector<double> results(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < total; t = next++) {
      try {
        results[t] = run_circuit(sim, config.lengths[t / k], t % k);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(total, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (int t = 0; t < total; ++t) {
    if (errors[t]) detail::rethrow_with_context(errors[t], config.lengths[t / k], t % k);
  }

  RbDataset out;
  out.num_qubits = config.num_qubits;
  out.shots = config.shots;
  out.interleaved = config.interleaved.has_value();
  out.seed = config.seed;
  for (std::size_t li = 0; li < config.lengths.size(); ++li) {
    LengthData row;
    row.m = config.lengths[li];
    row.survival.assign(results.begin() + li * k, results.begin() + (li + 1) * k);
    double s = 0;
    for (double x : row.survival) s += x;
    row.mean = s / k;
    if (k > 1) {
      double v = 0;
      for (double x : row.survival) v += (x - row.mean) * (x - row.mean);
      row.std_err = std::sqrt(v / (k - 1) / k);
    }
    out.lengths.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Error-rate oracle and default lengths

/// Mean infidelity of the composite error channel phi(g) omega(g)^-1 over
/// `samples` draws from the group; equal to the infidelity of the averaged
/// error channel that plain RB estimates.
inline double monte_carlo_error_oracle(const RbConfig& config, int samples,
                                       std::uint64_t seed) {
  RbConfig plain = config;
  plain.interleaved.reset();
  if (plain.lengths.empty()) plain.lengths = {1};
  const Simulator sim(plain);
  Rng rng = make_stream(seed, 0x6f7261636c65ULL);
  double acc = 0;
  for (int i = 0; i < samples; ++i) {
    const GroupElement g = sim.group().sample(rng);
    const Matrix ideal = liouville_of_unitary<double>(g.unitary.matrix());
    const Superoperator err(sim.element_channel(g).liouville() * ideal.adjoint());
    acc += 1.0 - average_gate_fidelity(err);
  }
  return acc / samples;
}

/// 11 geometrically spaced lengths from 1 to about 10 / r, with r a pilot
/// oracle estimate; capped at `max_length`.
inline std::vector<int> default_lengths(const RbConfig& config, int count = 11,
                                        int max_length = 1000) {
  const double r = monte_carlo_error_oracle(config, 200, config.seed ^ 0x5eedULL);
  double top = r > 1e-6 ? 10.0 / r : 100.0;
  top = std::clamp(top, static_cast<double>(count), static_cast<double>(max_length));
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    int m = static_cast<int>(std::lround(std::pow(top, static_cast<double>(i) / (count - 1))));
    if (!out.empty()) m = std::max(m, out.back() + 1);
    out.push_back(m);
  }
  return out;
}

}  // namespace rblab
