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

// rblab: run RB experiments, sweeps and fits from JSON specs.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 theorem premise unmet.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "rblab/analysis.hpp"
#include "rblab/compile.hpp"
#include "rblab/experiment.hpp"
#include "rblab/noise.hpp"
#include "rblab/theory.hpp"

namespace {

using namespace rblab;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPremise = 4;

struct Common {
  std::string spec;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
  std::optional<int> shots;
  std::optional<int> repetitions;
};

void add_common(CLI::App* cmd, Common& c, bool need_spec) {
  auto* opt = cmd->add_option("--spec", c.spec, "Experiment spec (JSON)");
  if (need_spec) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override the master seed");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--shots", c.shots, "Override shots per circuit (0 = exact)");
  cmd->add_option("--repetitions", c.repetitions, "Override the repetition count");
}

ExperimentSpec load_spec(const Common& c) {
  ExperimentSpec spec = ExperimentSpec::load(c.spec);
  if (c.seed) spec.override_seed(*c.seed);
  if (c.shots) spec.override_shots(*c.shots);
  if (c.repetitions) spec.override_repetitions(*c.repetitions);
  if (!c.out.empty()) spec.out_dir = c.out;
  return spec;
}

void emit(const Json& j, const std::string& out, const std::string& file) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  fs::create_directories(out);
  std::ofstream f(fs::path(out) / file);
  if (!f) throw ConfigError("cannot write '" + (fs::path(out) / file).string() + "'");
  f << j.dump(2) << "\n";
}

int cmd_run(const Common& c) {
  const ExperimentSpec spec = load_spec(c);
  const RunReport report = run_spec(spec, c.threads);
  write_run(report, spec.config.dim(), spec.out_dir);
  const SuiteStats r = report.r_stats();
  std::printf("%s: r = %.6f +- %.6f", spec.name.c_str(), r.mean, r.std);
  if (const auto f = report.fidelity_stats()) std::printf(", F = %.6f +- %.6f", f->mean, f->std);
  if (report.oracle_r) std::printf(", oracle r = %.6f", *report.oracle_r);
  std::printf(" (%zu repetition(s), written to %s)\n", report.repetitions.size(), spec.out_dir.c_str());
  return 0;
}

int cmd_sweep(const Common& c, const std::vector<double>& thetas) {
  const ExperimentSpec spec = load_spec(c);
  const SweepReport report = sweep_xy(spec, thetas, c.threads);
  write_sweep(report, spec.out_dir);
  std::cout << sweep_csv(report);
  return 0;
}

int cmd_fit(const std::string& csv, const std::string& out, int qubits) {
  const auto pts = read_summary_csv(csv);
  const DecayFit fit = fit_decay(pts);
  Json j = fit_json(fit, 1 << qubits);
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    emit(j, out, "fit.json");
    std::ofstream f(fs::path(out) / "plot.csv");
    f << "m,observed,fitted\n";
    for (const auto& p : pts) f << detail::fmt(p.m) << "," << detail::fmt(p.p) << "," << detail::fmt(fit.predict(p.m)) << "\n";
  }
  return 0;
}

Matrix read_unitary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + " is not valid JSON: " + e.what());
  }
  if (j.is_object()) j = j.at("unitary");
  if (!j.is_array() || j.empty()) throw ConfigError("unitary: expected rows of [re, im] pairs");
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix u(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != n) {
      throw DimensionError("unitary: matrix must be square");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const Json& z = j[r][k];
      if (!z.is_array() || z.size() != 2) throw ConfigError("unitary: entries are [re, im] pairs");
      u(r, k) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  if (max_abs<double>(Matrix(u * u.adjoint() - Matrix::Identity(n, n))) > 1e-8) {
    throw ConfigError("unitary: matrix is not unitary");
  }
  return u;
}

int cmd_compile(const std::string& path, const std::string& basis_name, const std::string& out) {
  const Matrix u = read_unitary(path);
  TwoQubitBasis basis = TwoQubitBasis::Cnot;
  if (basis_name == "iswap") basis = TwoQubitBasis::Iswap;
  else if (basis_name != "cnot") throw ConfigError("basis must be 'cnot' or 'iswap'");
  Circuit circuit;
  if (u.rows() == 2) circuit = compile_single_qubit(u);
  else if (u.rows() == 4) circuit = kak_compile(u, basis);
  else throw DimensionError("compile: only 2x2 and 4x4 unitaries are supported");
  Json gates = Json::array();
  for (const auto& g : circuit.gates) {
    gates.push_back({{"kind", to_string(g.kind)}, {"qubits", g.qubits}, {"params", g.params}});
  }
  const Matrix back = recompose(circuit);
  Json j{{"num_qubits", circuit.num_qubits},
         {"gates", gates},
         {"two_qubit_count", circuit.count(GateKind::CNOT) + circuit.count(GateKind::ISWAP)},
         {"single_qubit_count", circuit.single_qubit_count()},
         {"phase_distance", phase_distance<double>(back, u)}};
  emit(j, out, "circuit.json");
  return 0;
}

struct FidelityArgs {
  std::string type = "depolarizing";
  int qubits = 1;
  double p = 0, gamma = 0, t1 = 0, t2 = 0, tg = 0, theta = std::numbers::pi, d_theta = 0, d_z = 0;
};

int cmd_fidelity(const FidelityArgs& a, const std::string& out) {
  if (a.qubits < 1 || a.qubits > 2) throw ConfigError("--qubits must be 1 or 2");
  KrausChannel k = KrausChannel::identity(2);
  std::vector<int> all(a.qubits);
  for (int q = 0; q < a.qubits; ++q) all[q] = q;
  if (a.type == "depolarizing") {
    k = depolarizing(a.qubits, a.p);
  } else if (a.type == "amplitude_damping") {
    k = NoiseModel::recipe_channel(AmplitudeDampingRecipe{a.gamma}, all, a.qubits, a.theta);
  } else if (a.type == "thermal") {
    k = NoiseModel::recipe_channel(ThermalRecipe{a.t1, a.t2, a.tg, false}, all, a.qubits, a.theta);
  } else if (a.type == "coherent_xy") {
    if (a.qubits != 2) throw ConfigError("coherent_xy acts on two qubits");
    k = KrausChannel::unitary(coherent_xy_error(a.theta, a.d_theta, a.d_z));
  } else {
    throw ConfigError("unknown channel type '" + a.type + "'");
  }
  const Json j{{"type", a.type},
               {"dim", 1 << a.qubits},
               {"fidelity", average_gate_fidelity(k)},
               {"alpha", depolarizing_parameter(k)}};
  emit(j, out, "fidelity.json");
  return 0;
}

struct TheoremArgs {
  std::string group = "clifford1";
  std::string noise = "kick";
  double delta = 0.01;
  double p = 0.01;
  int max_m = 10;
  std::uint64_t seed = 1;
};

int cmd_verify(const TheoremArgs& a, const std::string& out) {
  using Real = long double;
  using namespace rblab::theory;
  const auto rep = FiniteGroupRep<Real>::build(FiniteGroup<Real>::by_name(a.group));
  std::vector<Mat<Real>> phi;
  Real eps = 0;
  if (a.noise == "kick") {
    const auto gens = random_kick_generators<Real>(rep.group.size(), rep.group.dim(), a.seed);
    eps = calibrate_kick(rep, gens, static_cast<Real>(a.delta));
    phi = kick_implementation(rep, gens, eps);
  } else if (a.noise == "depolarizing") {
    if (!(a.p >= 0 && a.p <= 1)) throw ConfigError("--p must lie in [0, 1]");
    phi = depolarized_implementation(rep, static_cast<Real>(a.p));
  } else {
    throw ConfigError("--noise must be 'kick' or 'depolarizing'");
  }
  if (a.max_m < 1) throw ConfigError("--max-m must be >= 1");
  const auto r = verify_theorem(rep, phi, a.max_m);
  Json rows = Json::array();
  for (std::size_t i = 0; i < r.lengths.size(); ++i) {
    rows.push_back({{"m", r.lengths[i]},
                    {"exact", static_cast<double>(r.exact[i])},
                    {"model", static_cast<double>(r.model[i])},
                    {"residual", static_cast<double>(r.residual[i])},
                    {"bound", static_cast<double>(r.bound[i])}});
  }
  const Json j{{"group", r.group},
               {"noise", a.noise},
               {"delta", static_cast<double>(r.delta_upper)},
               {"delta_lower", static_cast<double>(r.delta_lower)},
               {"kick", static_cast<double>(eps)},
               {"seed", a.seed},
               {"lemma_bounds_hold", r.lemma_bounds_hold},
               {"lengths", rows},
               {"pass", r.pass}};
  emit(j, out, "theorem.json");
  return r.pass ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized-benchmarking simulation lab"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts;
  auto* run = app.add_subcommand("run", "Run an RB experiment spec");
  add_common(run, run_opts, true);

  auto* sweep = app.add_subcommand("sweep-xy", "Interleaved FRB over XY(theta)");
  add_common(sweep, sweep_opts, true);
  std::vector<double> thetas;
  sweep->add_option("--thetas", thetas, "Angles in [0, pi] (default: from the spec)");

  std::string fit_csv, fit_out;
  int fit_qubits = 2;
  auto* fit = app.add_subcommand("fit", "Fit a summary CSV");
  fit->add_option("csv", fit_csv, "Summary CSV (m,mean_survival,std_err,n_circuits)")->required();
  fit->add_option("--out", fit_out, "Output directory (default: stdout)");
  fit->add_option("--qubits", fit_qubits, "Register size for r and F")->check(CLI::Range(1, 2));

  std::string unitary_path, basis = "cnot", compile_out;
  auto* comp = app.add_subcommand("compile", "Compile a unitary into elementary gates");
  comp->add_option("unitary", unitary_path, "JSON rows of [re, im] pairs")->required();
  comp->add_option("--basis", basis, "cnot or iswap");
  comp->add_option("--out", compile_out, "Output directory (default: stdout)");

  FidelityArgs fa;
  std::string fid_out;
  auto* fid = app.add_subcommand("fidelity", "Average gate fidelity of a noise channel");
  fid->add_option("--type", fa.type, "depolarizing, amplitude_damping, thermal, coherent_xy");
  fid->add_option("--qubits", fa.qubits, "Number of qubits");
  fid->add_option("--p", fa.p, "Depolarizing probability");
  fid->add_option("--gamma", fa.gamma, "Damping probability per qubit");
  fid->add_option("--t1", fa.t1, "T1 in ns");
  fid->add_option("--t2", fa.t2, "T2 in ns");
  fid->add_option("--tg", fa.tg, "Gate time in ns");
  fid->add_option("--theta", fa.theta, "XY angle");
  fid->add_option("--d-theta", fa.d_theta, "Over-rotation");
  fid->add_option("--d-z", fa.d_z, "ZZ error coefficient");
  fid->add_option("--out", fid_out, "Output directory (default: stdout)");

  TheoremArgs ta;
  std::string thm_out;
  auto* thm = app.add_subcommand("verify-theorem", "Check the finite-group decay model and bound");
  thm->add_option("--group", ta.group, "clifford1, pauli1, z2 or trivial");
  thm->add_option("--noise", ta.noise, "kick or depolarizing");
  thm->add_option("--delta", ta.delta, "Certified delta for kick noise");
  thm->add_option("--p", ta.p, "Depolarizing probability");
  thm->add_option("--max-m", ta.max_m, "Largest sequence length");
  thm->add_option("--seed", ta.seed, "Seed for the kick generators");
  thm->add_option("--out", thm_out, "Output directory (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts, thetas);
    if (*fit) return cmd_fit(fit_csv, fit_out, fit_qubits);
    if (*comp) return cmd_compile(unitary_path, basis, compile_out);
    if (*fid) return cmd_fidelity(fa, fid_out);
    if (*thm) return cmd_verify(ta, thm_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PremiseError& e) {
    std::cerr << "premise unmet: " << e.what() << "\n";
    return kExitPremise;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
