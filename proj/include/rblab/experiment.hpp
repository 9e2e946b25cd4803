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

// Experiment specs (JSON), repetition suites, the XY sweep and the file
// writers shared by the command-line tool.

#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rblab/analysis.hpp"
#include "rblab/error.hpp"
#include "rblab/noise.hpp"
#include "rblab/rbengine.hpp"

namespace rblab {

using Json = nlohmann::json;

inline constexpr int kSpecVersion = 1;

// ---------------------------------------------------------------------------
// Parsing helpers

namespace detail {

inline const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

inline void only_keys(const Json& j, std::initializer_list<const char*> keys,
                      const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) throw ConfigError(where + ": unknown field '" + k + "'");
  }
}

}  // namespace detail

/// Duration in nanoseconds: a bare number is taken as ns; strings accept
/// the suffixes s, ms, us and ns.
inline double parse_time_ns(const Json& j, const std::string& where = "time") {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ConfigError(where + ": expected a number or a string with a unit");
  const std::string s = j.get<std::string>();
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse '" + s + "'");
  }
  std::string unit = s.substr(used);
  unit.erase(0, unit.find_first_not_of(' '));
  if (unit == "ns" || unit.empty()) return value;
  if (unit == "us") return value * 1e3;
  if (unit == "ms") return value * 1e6;
  if (unit == "s") return value * 1e9;
  throw ConfigError(where + ": unknown time unit '" + unit + "' (s, ms, us, ns)");
}

inline ChannelRecipe parse_recipe(const Json& j, const std::string& where) {
  const std::string type = detail::require(j, "type", where).get<std::string>();
  if (type == "depolarizing") {
    detail::only_keys(j, {"type", "p", "all_qubits"}, where);
    return DepolarizingRecipe{detail::number(detail::require(j, "p", where), where + ".p"),
                              j.value("all_qubits", false)};
  }
  if (type == "amplitude_damping") {
    detail::only_keys(j, {"type", "gamma"}, where);
    return AmplitudeDampingRecipe{
        detail::number(detail::require(j, "gamma", where), where + ".gamma")};
  }
  if (type == "thermal") {
    detail::only_keys(j, {"type", "t1", "t2", "tg", "scale_with_theta"}, where);
    return ThermalRecipe{parse_time_ns(detail::require(j, "t1", where), where + ".t1"),
                         parse_time_ns(detail::require(j, "t2", where), where + ".t2"),
                         parse_time_ns(detail::require(j, "tg", where), where + ".tg"),
                         j.value("scale_with_theta", false)};
  }
  if (type == "coherent_xy") {
    detail::only_keys(j, {"type", "d_theta", "d_z"}, where);
    return CoherentXYRecipe{j.contains("d_theta") ? detail::number(j["d_theta"], where) : 0.0,
                            j.contains("d_z") ? detail::number(j["d_z"], where) : 0.0};
  }
  throw ConfigError(where + ": unknown channel type '" + type +
                    "' (depolarizing, amplitude_damping, thermal, coherent_xy)");
}

inline std::vector<ChannelRecipe> parse_recipes(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of channels");
  std::vector<ChannelRecipe> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(parse_recipe(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

/// {"CNOT": [...], "U2": [...], ...}; kinds without an entry are noiseless.
inline NoiseModel parse_noise(const Json& j) {
  NoiseModel model;
  if (j.is_null()) return model;
  if (!j.is_object()) throw ConfigError("noise: expected an object keyed by gate kind");
  for (const auto& [key, list] : j.items()) {
    model.set(gate_kind_from_string(key), parse_recipes(list, "noise." + key));
  }
  return model;
}

inline Superoperator spam_channel(const Json& j, int num_qubits, const std::string& where) {
  std::vector<int> all(num_qubits);
  for (int q = 0; q < num_qubits; ++q) all[q] = q;
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  Matrix total = Matrix::Identity(dim * dim, dim * dim);
  for (const auto& r : parse_recipes(j, where)) {
    if (std::holds_alternative<CoherentXYRecipe>(r)) {
      throw ConfigError(where + ": coherent_xy is not a SPAM channel");
    }
    total = liouville_of_kraus<double>(
                NoiseModel::recipe_channel(r, all, num_qubits, std::numbers::pi).operators()) *
            total;
  }
  return Superoperator(total);
}

/// 64-bit FNV-1a as 16 hex digits.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Experiment spec

struct ExperimentSpec {
  std::string name = "experiment";
  RbConfig config;
  bool auto_lengths = false;
  int repetitions = 1;
  /// Samples of the Monte-Carlo error-rate oracle (0 = skip).
  int oracle_samples = 0;
  std::string out_dir = "out";
  /// XY sweep angles.
  std::vector<double> thetas;
  /// Canonical document, including command-line overrides.
  Json document;

  static ExperimentSpec from_json(const Json& doc) {
    using detail::require;
    detail::only_keys(doc, {"version", "name", "experiment", "noise", "spam", "analysis",
                            "repetitions", "output", "sweep"},
                      "spec");
    if (require(doc, "version", "spec") != kSpecVersion) {
      throw ConfigError("spec: unsupported version (expected " + std::to_string(kSpecVersion) + ")");
    }
    ExperimentSpec s;
    s.document = doc;
    s.name = doc.value("name", std::string("experiment"));
    const Json& e = require(doc, "experiment", "spec");
    detail::only_keys(e, {"group", "num_qubits", "lengths", "circuits_per_length", "shots",
                          "multinomial", "basis", "granularity", "interleaved",
                          "survival_outcome", "seed"},
                      "experiment");
    RbConfig& c = s.config;
    const std::string group = e.value("group", std::string("clifford"));
    if (group == "clifford") {
      c.group = GateGroup::Kind::Clifford;
    } else if (group == "haar") {
      c.group = GateGroup::Kind::Haar;
    } else {
      throw ConfigError("experiment.group: expected 'clifford' or 'haar'");
    }
    c.num_qubits = e.value("num_qubits", 2);
    if (!e.contains("lengths") || e["lengths"] == "auto") {
      s.auto_lengths = true;
    } else if (e["lengths"].is_array()) {
      c.lengths = e["lengths"].get<std::vector<int>>();
    } else {
      throw ConfigError("experiment.lengths: expected a list or \"auto\"");
    }
    c.circuits_per_length = e.value("circuits_per_length", 30);
    c.shots = e.value("shots", 5000);
    c.multinomial = e.value("multinomial", false);
    const std::string basis = e.value("basis", std::string("cnot"));
    if (basis == "cnot") {
      c.basis = TwoQubitBasis::Cnot;
    } else if (basis == "iswap") {
      c.basis = TwoQubitBasis::Iswap;
    } else {
      throw ConfigError("experiment.basis: expected 'cnot' or 'iswap'");
    }
    const std::string gran = e.value("granularity", std::string("elementary"));
    if (gran == "elementary") {
      c.granularity = NoiseGranularity::Elementary;
    } else if (gran == "element") {
      c.granularity = NoiseGranularity::Element;
    } else {
      throw ConfigError("experiment.granularity: expected 'elementary' or 'element'");
    }
    if (e.contains("interleaved") && !e["interleaved"].is_null()) {
      const Json& v = e["interleaved"];
      detail::only_keys(v, {"gate", "theta"}, "experiment.interleaved");
      c.interleaved = InterleavedGate::named(require(v, "gate", "experiment.interleaved").get<std::string>(),
                                             v.value("theta", std::numbers::pi));
    }
    c.survival_outcome = e.value("survival_outcome", 0);
    c.seed = e.value("seed", std::uint64_t{1});
    c.noise = parse_noise(doc.value("noise", Json()));
    if (doc.contains("spam")) {
      const Json& sp = doc["spam"];
      detail::only_keys(sp, {"prep", "meas"}, "spam");
      if (sp.contains("prep")) c.spam_prep = spam_channel(sp["prep"], c.num_qubits, "spam.prep");
      if (sp.contains("meas")) c.spam_meas = spam_channel(sp["meas"], c.num_qubits, "spam.meas");
    }
    if (doc.contains("analysis")) {
      detail::only_keys(doc["analysis"], {"oracle_samples"}, "analysis");
      s.oracle_samples = doc["analysis"].value("oracle_samples", 0);
    }
    s.repetitions = doc.value("repetitions", 1);
    if (doc.contains("output")) {
      detail::only_keys(doc["output"], {"dir"}, "output");
      s.out_dir = doc["output"].value("dir", std::string("out"));
    }
    if (doc.contains("sweep")) {
      detail::only_keys(doc["sweep"], {"thetas"}, "sweep");
      s.thetas = doc["sweep"].value("thetas", std::vector<double>{});
    }
    s.validate();
    return s;
  }

  static ExperimentSpec load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec '" + path.string() + "'");
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ConfigError("spec '" + path.string() + "' is not valid JSON: " + e.what());
    }
    try {
      return from_json(doc);
    } catch (const Json::exception& e) {
      throw ConfigError("spec '" + path.string() + "': " + e.what());
    }
  }

  void validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (oracle_samples < 0) throw ConfigError("analysis.oracle_samples must be >= 0");
    for (double t : thetas) {
      if (!(t >= 0 && t <= std::numbers::pi + 1e-12)) {
        throw ConfigError("sweep.thetas must lie in [0, pi]");
      }
    }
    RbConfig probe = config;
    if (auto_lengths) probe.lengths = {1};
    probe.validate();
  }

  void override_seed(std::uint64_t seed) {
    config.seed = seed;
    document["experiment"]["seed"] = seed;
  }
  void override_shots(int shots) {
    config.shots = shots;
    document["experiment"]["shots"] = shots;
    validate();
  }
  void override_repetitions(int r) {
    repetitions = r;
    document["repetitions"] = r;
    validate();
  }

  /// Hash of the canonical document without output paths.
  std::string hash() const {
    Json d = document;
    d.erase("output");
    return fnv1a_hex(d.dump());
  }
};

// ---------------------------------------------------------------------------
// Running

struct RepetitionResult {
  std::uint64_t seed = 0;
  RbDataset reference;
  DecayFit reference_fit;
  double r = 0;
  std::optional<RbDataset> interleaved;
  std::optional<DecayFit> interleaved_fit;
  std::optional<InterleavedReport> gate;
};

struct SuiteStats {
  double mean = 0;
  double std = 0;
};

inline SuiteStats suite_stats(const std::vector<double>& xs) {
  SuiteStats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= xs.size();
  if (xs.size() > 1) {
    double v = 0;
    for (double x : xs) v += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(v / (xs.size() - 1));
  }
  return s;
}

struct RunReport {
  std::string name;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<int> lengths;
  std::vector<RepetitionResult> repetitions;
  std::optional<double> oracle_r;

  SuiteStats r_stats() const {
    std::vector<double> xs;
    for (const auto& rep : repetitions) xs.push_back(rep.r);
    return suite_stats(xs);
  }
  std::optional<SuiteStats> fidelity_stats() const {
    std::vector<double> xs;
    for (const auto& rep : repetitions)
      if (rep.gate) xs.push_back(rep.gate->fidelity);
    if (xs.empty()) return std::nullopt;
    return suite_stats(xs);
  }
};

/// Seed of repetition k: the master seed plus k.
inline std::uint64_t repetition_seed(std::uint64_t master, int k) {
  return master + static_cast<std::uint64_t>(k);
}

inline RbConfig resolved_config(const ExperimentSpec& spec) {
  RbConfig c = spec.config;
  if (spec.auto_lengths) c.lengths = default_lengths(c);
  c.validate();
  return c;
}

inline DecayFit fit_dataset(const RbDataset& data) { return fit_decay(fit_points(data)); }

/// Reference (and, if configured, interleaved) runs for every repetition.
inline RunReport run_spec(const ExperimentSpec& spec, int threads = 1) {
  RunReport report;
  report.name = spec.name;
  report.config_hash = spec.hash();
  report.seed = spec.config.seed;
  const RbConfig base = resolved_config(spec);
  report.lengths = base.lengths;
  for (int k = 0; k < spec.repetitions; ++k) {
    RepetitionResult rep;
    rep.seed = repetition_seed(base.seed, k);
    RbConfig ref = base;
    ref.seed = rep.seed;
    ref.interleaved.reset();
    rep.reference = run_experiment(ref, threads);
    rep.reference.config_hash = report.config_hash;
    rep.reference_fit = fit_dataset(rep.reference);
    rep.r = error_per_gate(rep.reference_fit, base.dim());
    if (base.interleaved) {
      RbConfig inter = base;
      inter.seed = rep.seed;
      rep.interleaved = run_experiment(inter, threads);
      rep.interleaved->config_hash = report.config_hash;
      rep.interleaved_fit = fit_dataset(*rep.interleaved);
      rep.gate = interleaved_report(rep.reference_fit, *rep.interleaved_fit, base.dim());
    }
    report.repetitions.push_back(std::move(rep));
  }
  if (spec.oracle_samples > 0) {
    report.oracle_r = monte_carlo_error_oracle(base, spec.oracle_samples, base.seed);
  }
  return report;
}

// ---------------------------------------------------------------------------
// XY sweep

/// Average fidelity of the XY(theta) error channel: the configured
/// incoherent part after the coherent over-rotation.
inline double xy_theory_fidelity(const NoiseModel& noise, double theta) {
  const Superoperator incoherent = noise.channel(GateKind::XY, {0, 1}, 2, theta);
  const Matrix coherent = liouville_of_unitary<double>(noise.coherent(GateKind::XY, theta));
  return average_gate_fidelity(Superoperator(incoherent.liouville() * coherent));
}

struct SweepRow {
  double theta = 0;
  double f_measured = 1;
  double f_uncertainty = 0;
  double f_theory = 1;
};

struct SweepReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<int> lengths;
  DecayFit reference_fit;
  std::vector<SweepRow> rows;
};

inline std::vector<double> default_thetas() {
  const double pi = std::numbers::pi;
  return {0.0, pi / 4, pi / 2, 3 * pi / 4, pi};
}

/// Interleaved RB of XY(theta) for each angle against one shared reference.
inline SweepReport sweep_xy(const ExperimentSpec& spec, std::vector<double> thetas = {},
                            int threads = 1) {
  if (thetas.empty()) thetas = spec.thetas.empty() ? default_thetas() : spec.thetas;
  for (double t : thetas) {
    if (!(t >= 0 && t <= std::numbers::pi + 1e-12)) throw ConfigError("theta must lie in [0, pi]");
  }
  if (spec.config.num_qubits != 2) throw ConfigError("sweep-xy needs two qubits");
  SweepReport out;
  out.config_hash = spec.hash();
  out.seed = spec.config.seed;
  RbConfig base = resolved_config(spec);
  base.interleaved.reset();
  out.lengths = base.lengths;
  RbDataset ref = run_experiment(base, threads);
  out.reference_fit = fit_dataset(ref);
  for (double theta : thetas) {
    RbConfig inter = base;
    inter.interleaved = InterleavedGate::named("XY", theta);
    const DecayFit fit = fit_dataset(run_experiment(inter, threads));
    const InterleavedReport r = interleaved_report(out.reference_fit, fit, 4);
    out.rows.push_back({theta, r.fidelity, r.uncertainty, xy_theory_fidelity(base.noise, theta)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Writers

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string provenance(const std::string& hash, std::uint64_t seed) {
  return "# config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

}  // namespace detail

inline Json dataset_json(const RbDataset& d) {
  Json j;
  j["config_hash"] = d.config_hash;
  j["seed"] = d.seed;
  j["num_qubits"] = d.num_qubits;
  j["shots"] = d.shots;
  j["interleaved"] = d.interleaved;
  Json rows = Json::array();
  for (const auto& row : d.lengths) {
    rows.push_back({{"m", row.m}, {"survival", row.survival}, {"mean", row.mean},
                    {"std_err", row.std_err}});
  }
  j["lengths"] = rows;
  return j;
}

inline std::string circuits_csv(const RbDataset& d) {
  std::string s = detail::provenance(d.config_hash, d.seed) + "m,circuit,survival\n";
  for (const auto& row : d.lengths) {
    for (std::size_t i = 0; i < row.survival.size(); ++i) {
      s += std::to_string(row.m) + "," + std::to_string(i) + "," + detail::fmt(row.survival[i]) + "\n";
    }
  }
  return s;
}

inline std::string summary_csv(const RbDataset& d) {
  std::string s = detail::provenance(d.config_hash, d.seed) + "m,mean_survival,std_err,n_circuits\n";
  for (const auto& row : d.lengths) {
    s += std::to_string(row.m) + "," + detail::fmt(row.mean) + "," + detail::fmt(row.std_err) +
         "," + std::to_string(row.survival.size()) + "\n";
  }
  return s;
}

inline Json fit_json(const DecayFit& f, int dim) {
  Json cov = Json::array();
  for (int i = 0; i < 3; ++i) cov.push_back({f.cov(i, 0), f.cov(i, 1), f.cov(i, 2)});
  const double r = error_per_gate(f, dim);
  return {{"A", f.A},           {"B", f.B},
          {"alpha", f.alpha},   {"cov", cov},
          {"r", r},             {"F", 1.0 - r},
          {"converged", f.converged}, {"degenerate", f.degenerate},
          {"residual", f.residual}};
}

inline std::string plot_csv(const std::vector<FitPoint>& pts, const DecayFit& f,
                            const std::string& hash, std::uint64_t seed) {
  std::string s = detail::provenance(hash, seed) + "m,observed,fitted\n";
  for (const auto& p : pts) s += detail::fmt(p.m) + "," + detail::fmt(p.p) + "," + detail::fmt(f.predict(p.m)) + "\n";
  return s;
}

inline std::string sweep_csv(const SweepReport& r) {
  std::string s = detail::provenance(r.config_hash, r.seed) + "theta,F_measured,F_uncertainty,F_theory\n";
  for (const auto& row : r.rows) {
    s += detail::fmt(row.theta) + "," + detail::fmt(row.f_measured) + "," +
         detail::fmt(row.f_uncertainty) + "," + detail::fmt(row.f_theory) + "\n";
  }
  return s;
}

/// Summary CSV (as written above) back into fit points weighted by
/// 1 / std_err^2, or uniformly when any std_err is zero.
inline std::vector<FitPoint> read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::string line;
  bool header = false;
  std::vector<FitPoint> pts;
  std::vector<double> errs;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "m,mean_survival,std_err,n_circuits") {
        throw ConfigError(path.string() + ": expected header 'm,mean_survival,std_err,n_circuits'");
      }
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ": bad number '" + cell + "'");
      }
    }
    if (v.size() != 4) throw ConfigError(path.string() + ": expected 4 columns in '" + line + "'");
    pts.push_back({v[0], v[1], 1.0});
    errs.push_back(v[2]);
  }
  if (!header) throw ConfigError(path.string() + ": empty file");
  const bool weighted = !errs.empty() && std::all_of(errs.begin(), errs.end(), [](double e) { return e > 0; });
  if (weighted) {
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i].weight = 1.0 / (errs[i] * errs[i]);
  }
  return pts;
}

/// Writes every dataset, fit and plot file plus report.json into `dir`.
inline void write_run(const RunReport& report, int dim, const std::filesystem::path& dir) {
  const bool many = report.repetitions.size() > 1;
  Json reps = Json::array();
  for (std::size_t k = 0; k < report.repetitions.size(); ++k) {
    const auto& rep = report.repetitions[k];
    const std::string suffix = many ? "_rep" + std::to_string(k) : "";
    auto emit = [&](const std::string& tag, const RbDataset& d, const DecayFit& f) {
      const std::string base = tag + suffix;
      detail::write_text(dir / (base + ".dataset.json"), dataset_json(d).dump(2) + "\n");
      detail::write_text(dir / (base + ".circuits.csv"), circuits_csv(d));
      detail::write_text(dir / (base + ".summary.csv"), summary_csv(d));
      Json fj = fit_json(f, dim);
      fj["config_hash"] = report.config_hash;
      fj["seed"] = d.seed;
      detail::write_text(dir / (base + ".fit.json"), fj.dump(2) + "\n");
      detail::write_text(dir / (base + ".plot.csv"),
                         plot_csv(fit_points(d), f, report.config_hash, d.seed));
    };
    emit("reference", rep.reference, rep.reference_fit);
    Json rj{{"seed", rep.seed}, {"r", rep.r}, {"alpha", rep.reference_fit.alpha}};
    if (rep.interleaved) {
      emit("interleaved", *rep.interleaved, *rep.interleaved_fit);
      rj["alpha_interleaved"] = rep.interleaved_fit->alpha;
      rj["F"] = rep.gate->fidelity;
      rj["F_uncertainty"] = rep.gate->uncertainty;
      rj["unphysical"] = rep.gate->unphysical;
    }
    reps.push_back(rj);
  }
  Json j{{"name", report.name},
         {"config_hash", report.config_hash},
         {"seed", report.seed},
         {"lengths", report.lengths},
         {"repetitions", reps}};
  const SuiteStats rs = report.r_stats();
  j["r_mean"] = rs.mean;
  j["r_std"] = rs.std;
  if (const auto fs = report.fidelity_stats()) {
    j["F_mean"] = fs->mean;
    j["F_std"] = fs->std;
  }
  if (report.oracle_r) j["oracle_r"] = *report.oracle_r;
  detail::write_text(dir / "report.json", j.dump(2) + "\n");
  if (many) {
    std::string s = detail::provenance(report.config_hash, report.seed) + "repetition,seed,r,F\n";
    for (std::size_t k = 0; k < report.repetitions.size(); ++k) {
      const auto& rep = report.repetitions[k];
      s += std::to_string(k) + "," + std::to_string(rep.seed) + "," + detail::fmt(rep.r) + "," +
           (rep.gate ? detail::fmt(rep.gate->fidelity) : std::string()) + "\n";
    }
    detail::write_text(dir / "repetitions.csv", s);
  }
}

inline void write_sweep(const SweepReport& report, const std::filesystem::path& dir) {
  detail::write_text(dir / "sweep.csv", sweep_csv(report));
  Json j{{"config_hash", report.config_hash},
         {"seed", report.seed},
         {"lengths", report.lengths},
         {"reference", fit_json(report.reference_fit, 4)}};
  detail::write_text(dir / "sweep.json", j.dump(2) + "\n");
}

}  // namespace rblab
