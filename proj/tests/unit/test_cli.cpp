// Copyright 2026 The nmqsd Authors
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


#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "nmqsd/error.hpp"
#include "nmqsd/config.hpp"
#include "nmqsd/experiment.hpp"

using namespace nmqsd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nmqsd_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string& header) {
  std::ifstream in(p);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

ExperimentConfig parse(const std::string& text) {
  const ValidationResult v = validate_config(text);
  for (const auto& i : v.issues) MESSAGE(i.path << ": " << i.message);
  REQUIRE(v.ok());
  return *v.config;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NMQSD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kTwoModes = R"(
model: damped_oscillator
Omega: 1.0
system_dim: 6
bath:
  type: discrete_modes
  temperature: 0.4
  modes:
    - {g: 0.25, omega: 0.9, mode_dim: 7}
    - {g: 0.2, omega: 1.2, mode_dim: 6}
grid: {t_max: 2.0, n_steps: 2000}
initial_state: {fock: 1}
)";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("coefficients file carries the derived columns") {
  ExperimentConfig cfg = parse(R"(
model: damped_oscillator
Omega: 1.0
bath: {type: exponential_kernel, gamma1: 1.0, gamma2: 0.4, kappa: 5.0, omega_c: 0.7}
grid: {t_max: 2.0, n_steps: 200}
runs: [coefficients]
)");
  const fs::path dir = scratch("coefficients");
  const RunReport rep = run_experiment(cfg, RunOptions{dir.string(), 1});
  REQUIRE(rep.ok());
  std::string header;
  const auto rows = read_csv(dir / "coefficients.csv", header);
  CHECK(header == "t,re_a,im_a,re_b,im_b,re_c,im_c,re_d,im_d");
  REQUIRE(rows.size() == 201);
  for (const auto& r : rows) {
    CHECK(r[5] == -r[1]);
    CHECK(r[6] == r[2]);
    CHECK(r[7] == -r[3]);
    CHECK(r[8] == r[4]);
  }
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["status"] == "ok");
  CHECK(report["nmqsd_version"] == kVersion);
}

TEST_CASE("master equation against the oracle through the runner") {
  ExperimentConfig cfg = parse(std::string(kTwoModes) + "runs: [master, oracle, compare]\n");
  const fs::path dir = scratch("two_modes");
  const RunReport rep = run_experiment(cfg, RunOptions{dir.string(), 2});
  REQUIRE(rep.ok());
  const auto report = nlohmann::json::parse(rep.json);
  const auto& cmp = report["tasks"].back();
  REQUIRE(cmp["task"] == "compare");
  const double td = cmp["diagnostics"]["pairs"][0]["max_trace_distance"];
  CHECK(td <= 2e-3);

  ExperimentConfig swapped = parse(std::string(kTwoModes) + "runs: [oracle, master, {compare: [oracle, master]}]\n");
  const fs::path dir2 = scratch("two_modes_swapped");
  const RunReport rep2 = run_experiment(swapped, RunOptions{dir2.string(), 1});
  REQUIRE(rep2.ok());
  const auto report2 = nlohmann::json::parse(rep2.json);
  CHECK(report2["tasks"].back()["diagnostics"]["pairs"][0]["max_trace_distance"] == td);
  CHECK(slurp(dir / "compare.csv") == slurp(dir2 / "compare.csv"));
}

TEST_CASE("outputs are byte-identical across runs and worker counts") {
  ExperimentConfig cfg = parse(R"(
model: damped_oscillator
Omega: 1.0
system_dim: 8
bath:
  type: discrete_modes
  temperature: 1.0
  modes:
    - {g: 0.4, omega: 1.0}
grid: {t_max: 1.0, n_steps: 64}
initial_state: {coherent: [0.5, 0.1]}
runs:
  - trajectories: {M: 300, seed: 11}
  - coefficients
  - master
  - compare
)");
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  REQUIRE(run_experiment(cfg, RunOptions{a.string(), 1}).ok());
  REQUIRE(run_experiment(cfg, RunOptions{b.string(), 3}).ok());
  REQUIRE(run_experiment(cfg, RunOptions{c.string(), 1}).ok());
  for (const char* f : {"trajectories.csv", "coefficients.csv", "master.csv", "compare.csv"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    CHECK_MESSAGE(slurp(a / f) == slurp(c / f), f);
    CHECK(!slurp(a / f).empty());
  }
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("exit_codes");
  {
    std::ofstream(dir / "good.yaml") << "model: damped_oscillator\nOmega: 1.0\n"
                                        "bath: {type: exponential_kernel, gamma1: 1.0, kappa: 4.0}\n"
                                        "grid: {t_max: 1.0, n_steps: 20}\n"
                                        "runs: [coefficients]\n";
    std::ofstream(dir / "bad.yaml") << "bath: {type: exponential_kernel, gamma1: -1.0, kappa: 4.0}\n"
                                       "grid: {t_max: 1.0, n_steps: 20}\n"
                                       "runs: []\n";
    std::ofstream(dir / "broken.yaml") << "bath: [unclosed\n";
  }
  CHECK(run_cli("version") == 0);
  CHECK(run_cli("validate " + (dir / "good.yaml").string()) == 0);
  CHECK(run_cli("validate " + (dir / "bad.yaml").string()) == 1);
  CHECK(run_cli("validate " + (dir / "broken.yaml").string()) == 1);
  CHECK(run_cli("validate " + (dir / "missing.yaml").string()) == 1);
  CHECK(run_cli("run " + (dir / "good.yaml").string() + " --output-dir " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "coefficients.csv"));
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(run_cli("frobnicate") == 1);
}

TEST_CASE("shipped configs validate") {
  for (const auto& entry : fs::directory_iterator(fs::path(NMQSD_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".yaml") continue;
    const ValidationResult v = load_config(entry.path().string());
    CHECK_MESSAGE(v.ok(), entry.path().string());
  }
}

}  // TEST_SUITE
