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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rblab/experiment.hpp"

using namespace rblab;
namespace fs = std::filesystem;

namespace {

Json small_spec() {
  return Json::parse(R"({
    "version": 1,
    "name": "small",
    "experiment": {"group": "clifford", "num_qubits": 2, "lengths": [1, 2, 4, 8, 16],
                   "circuits_per_length": 4, "shots": 0, "seed": 3,
                   "interleaved": {"gate": "CNOT"}},
    "noise": {"CNOT": [{"type": "depolarizing", "p": 0.01}],
              "U3": [{"type": "thermal", "t1": "50us", "t2": "30us", "tg": 20}]},
    "output": {"dir": "somewhere"}
  })");
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rblab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RBLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("time units", "[experiment]") {
  CHECK(parse_time_ns(Json(60)) == 60.0);
  CHECK(parse_time_ns(Json("60ns")) == 60.0);
  CHECK(parse_time_ns(Json("20us")) == 20000.0);
  CHECK(parse_time_ns(Json("0.1 ms")) == Catch::Approx(1e5));
  CHECK(parse_time_ns(Json("2s")) == 2e9);
  CHECK_THROWS_AS(parse_time_ns(Json("5 min")), ConfigError);
  CHECK_THROWS_AS(parse_time_ns(Json("fast")), ConfigError);
  CHECK_THROWS_AS(parse_time_ns(Json(true)), ConfigError);
}

TEST_CASE("spec parsing", "[experiment]") {
  const ExperimentSpec s = ExperimentSpec::from_json(small_spec());
  CHECK(s.name == "small");
  CHECK(s.config.lengths == std::vector<int>{1, 2, 4, 8, 16});
  CHECK(s.config.interleaved);
  CHECK(s.config.interleaved->name == "CNOT");
  CHECK(s.config.noise.has(GateKind::CNOT));
  const auto& thermal = std::get<ThermalRecipe>(s.config.noise.recipes(GateKind::U3).front());
  CHECK(thermal.t1 == 50000.0);
  CHECK(thermal.tg == 20.0);
  CHECK(s.out_dir == "somewhere");
  CHECK_FALSE(s.auto_lengths);
}

TEST_CASE("spec validation", "[experiment]") {
  auto broken = [](auto edit) {
    Json j = small_spec();
    edit(j);
    return j;
  };
  CHECK_THROWS_AS(ExperimentSpec::from_json(broken([](Json& j) { j["version"] = 7; })), ConfigError);
  CHECK_THROWS_AS(ExperimentSpec::from_json(broken([](Json& j) { j["bogus"] = 1; })), ConfigError);
  CHECK_THROWS_AS(ExperimentSpec::from_json(broken([](Json& j) { j["experiment"]["group"] = "su3"; })),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentSpec::from_json(broken([](Json& j) { j["experiment"]["lengths"] = {4, 2}; })),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentSpec::from_json(broken([](Json& j) { j["experiment"]["shots"] = -1; })),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentSpec::from_json(broken([](Json& j) {
                    j["noise"]["CNOT"] = Json::parse(R"([{"type": "depolarizing", "p": 1.5}])");
                  })),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentSpec::from_json(broken([](Json& j) {
                    j["noise"]["U2"] = Json::parse(R"([{"type": "coherent_xy", "d_theta": 0.1}])");
                  })),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentSpec::from_json(broken([](Json& j) { j["noise"]["TOFFOLI"] = Json::array(); })),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentSpec::from_json(broken([](Json& j) { j["repetitions"] = 0; })), ConfigError);
  CHECK_THROWS_AS(ExperimentSpec::from_json(broken([](Json& j) { j["sweep"] = {{"thetas", {4.0}}}; })),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentSpec::load("/nonexistent/spec.json"), ConfigError);
}

TEST_CASE("config hash ignores output paths and tracks overrides", "[experiment]") {
  ExperimentSpec a = ExperimentSpec::from_json(small_spec());
  Json moved = small_spec();
  moved["output"]["dir"] = "elsewhere";
  const ExperimentSpec b = ExperimentSpec::from_json(moved);
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  const std::string before = a.hash();
  a.override_seed(99);
  CHECK(a.hash() != before);
  CHECK(a.config.seed == 99);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("writers emit provenance and exact headers", "[experiment]") {
  const ExperimentSpec s = ExperimentSpec::from_json(small_spec());
  const RunReport r = run_spec(s);
  const RbDataset& d = r.repetitions.front().reference;
  std::istringstream summary(summary_csv(d));
  std::string first, header;
  std::getline(summary, first);
  std::getline(summary, header);
  CHECK(first == "# config_hash=" + s.hash() + " seed=3");
  CHECK(header == "m,mean_survival,std_err,n_circuits");
  CHECK(circuits_csv(d).find("\nm,circuit,survival\n") != std::string::npos);
  CHECK(dataset_json(d)["config_hash"] == s.hash());
  CHECK(r.repetitions.front().gate);

  const fs::path dir = temp_dir("writers");
  write_run(r, 4, dir);
  for (const char* f : {"reference.dataset.json", "reference.circuits.csv", "reference.summary.csv",
                        "reference.fit.json", "reference.plot.csv", "interleaved.summary.csv",
                        "report.json"}) {
    CHECK(fs::exists(dir / f));
  }
  const Json fit = Json::parse(slurp(dir / "reference.fit.json"));
  for (const char* k : {"A", "B", "alpha", "cov", "r", "F"}) CHECK(fit.contains(k));
  CHECK(fit["cov"].size() == 3);

  // The summary CSV feeds back into the fit.
  const auto pts = read_summary_csv(dir / "reference.summary.csv");
  REQUIRE(pts.size() == 5);
  CHECK(pts[3].m == 8);
  CHECK(pts[3].p == d.lengths[3].mean);
}

TEST_CASE("synthetic decay CSV fits exactly", "[experiment]") {
  const auto pts = read_summary_csv(fs::path(RBLAB_SPEC_DIR) / "synthetic_decay.csv");
  const DecayFit f = fit_decay(pts);
  CHECK(std::abs(f.alpha - 0.98) < 1e-9);
  CHECK(std::abs(f.A - 0.75) < 1e-8);
  CHECK(std::abs(f.B - 0.25) < 1e-8);
}

TEST_CASE("noiseless spec gives a degenerate fit", "[experiment]") {
  const ExperimentSpec s = ExperimentSpec::load(fs::path(RBLAB_SPEC_DIR) / "noiseless.json");
  const RunReport r = run_spec(s);
  CHECK(r.repetitions.front().reference_fit.degenerate);
  CHECK(r.repetitions.front().r == 0.0);
}

TEST_CASE("repetition suites", "[experiment]") {
  ExperimentSpec s = ExperimentSpec::from_json(small_spec());
  s.override_repetitions(3);
  const RunReport r = run_spec(s);
  REQUIRE(r.repetitions.size() == 3);
  CHECK(r.repetitions[1].seed == 4);
  const auto rs = r.r_stats();
  CHECK(rs.std > 0);
  CHECK(r.fidelity_stats());
  const auto one = suite_stats({2.0});
  CHECK(one.mean == 2.0);
  CHECK(one.std == 0.0);
  const auto two = suite_stats({1.0, 3.0});
  CHECK(two.std == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("XY theory column", "[experiment]") {
  NoiseModel none;
  CHECK(xy_theory_fidelity(none, 0.0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(xy_theory_fidelity(none, std::numbers::pi) == Catch::Approx(1.0).margin(1e-15));

  // Coherent error only: unitary error channel, F = (|Tr U|^2 + D) / (D^2 + D).
  NoiseModel coh;
  coh.set(GateKind::XY, {CoherentXYRecipe{0.01, 0.0}});
  const Matrix u = coherent_xy_error(1.0, 0.01, 0.0).matrix();
  const double oracle = (std::norm(u.trace()) + 4.0) / 20.0;
  CHECK(std::abs(xy_theory_fidelity(coh, 1.0) - oracle) < 1e-14);

  auto deficit = [](double dt) {
    NoiseModel m;
    m.set(GateKind::XY, {CoherentXYRecipe{dt, 0.0}});
    return 1.0 - xy_theory_fidelity(m, std::numbers::pi / 2);
  };
  CHECK(deficit(0.02) / deficit(0.01) == Catch::Approx(4.0).epsilon(0.01));

  NoiseModel thermal;
  thermal.set(GateKind::XY, {ThermalRecipe{1e5, 2e4, 60, true}});
  CHECK(xy_theory_fidelity(thermal, 0.0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(xy_theory_fidelity(thermal, std::numbers::pi) < xy_theory_fidelity(thermal, std::numbers::pi / 2));
}

TEST_CASE("zero-noise sweep is perfect", "[experiment]") {
  Json j = Json::parse(R"({
    "version": 1,
    "experiment": {"group": "haar", "lengths": [1, 2, 3, 4, 5], "circuits_per_length": 2,
                   "shots": 0, "basis": "iswap", "seed": 1},
    "sweep": {"thetas": [0.0, 1.0]}
  })");
  const SweepReport r = sweep_xy(ExperimentSpec::from_json(j));
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(row.f_measured == Catch::Approx(1.0).margin(1e-12));
    CHECK(row.f_theory == Catch::Approx(1.0).margin(1e-15));
  }
  CHECK(sweep_csv(r).find("\ntheta,F_measured,F_uncertainty,F_theory\n") != std::string::npos);
  CHECK_THROWS_AS(sweep_xy(ExperimentSpec::from_json(j), {-0.5}), ConfigError);
}

TEST_CASE("command-line exit codes", "[experiment][cli]") {
  const fs::path dir = temp_dir("cli");
  const std::string spec_dir = RBLAB_SPEC_DIR;
  CHECK(run_cli("fidelity --type depolarizing --qubits 2 --p 0.01") == 0);
  CHECK(run_cli("fit " + spec_dir + "/synthetic_decay.csv --out " + (dir / "fit").string()) == 0);
  const Json fit = Json::parse(slurp(dir / "fit" / "fit.json"));
  CHECK(std::abs(fit["alpha"].get<double>() - 0.98) < 1e-9);

  CHECK(run_cli("run --spec " + spec_dir + "/noiseless.json --out " + (dir / "run").string()) == 0);
  CHECK(fs::exists(dir / "run" / "report.json"));

  std::ofstream(dir / "bad.json") << R"({"version": 1, "experiment": {"group": "nope"}})";
  CHECK(run_cli("run --spec " + (dir / "bad.json").string()) == 2);
  CHECK(run_cli("run --spec /nonexistent.json") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("fidelity --type depolarizing --qubits 2 --p 3") == 2);

  std::ofstream(dir / "u.json") << "[[[1,0],[0,0]],[[0,0],[0,1]]]";
  CHECK(run_cli("compile " + (dir / "u.json").string() + " --out " + (dir / "c").string()) == 0);
  const Json circuit = Json::parse(slurp(dir / "c" / "circuit.json"));
  CHECK(circuit["phase_distance"].get<double>() < 1e-9);
  std::ofstream(dir / "nonunitary.json") << "[[[1,0],[1,0]],[[0,0],[1,0]]]";
  CHECK(run_cli("compile " + (dir / "nonunitary.json").string()) == 2);

  CHECK(run_cli("verify-theorem --group clifford1 --noise kick --delta 0.01 --out " +
                (dir / "thm").string()) == 0);
  CHECK(Json::parse(slurp(dir / "thm" / "theorem.json"))["pass"] == true);
  CHECK(run_cli("verify-theorem --group clifford1 --noise kick --delta 0.2") == 4);
}

TEST_CASE("thread count does not change output files", "[experiment][cli]") {
  const fs::path dir = temp_dir("threads");
  Json j = small_spec();
  j["experiment"]["shots"] = 200;
  std::ofstream(dir / "spec.json") << j.dump();
  REQUIRE(run_cli("run --spec " + (dir / "spec.json").string() + " --threads 1 --out " + (dir / "a").string()) == 0);
  REQUIRE(run_cli("run --spec " + (dir / "spec.json").string() + " --threads 4 --out " + (dir / "b").string()) == 0);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const fs::path other = dir / "b" / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
    ++compared;
  }
  CHECK(compared >= 10);
}
