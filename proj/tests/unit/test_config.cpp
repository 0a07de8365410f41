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


#include <algorithm>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "nmqsd/error.hpp"
#include "nmqsd/config.hpp"
#include "nmqsd/experiment.hpp"

using namespace nmqsd;

namespace {

const char* kMinimal = R"(
model: damped_oscillator
Omega: 1.0
bath:
  type: exponential_kernel
  gamma1: 1.0
  kappa: 4.0
grid: {t_max: 1.0, n_steps: 20}
runs: [coefficients]
)";

bool has_issue(const ValidationResult& v, const std::string& path) {
  return std::any_of(v.issues.begin(), v.issues.end(),
                     [&](const ConfigIssue& i) { return i.path == path; });
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config echoes its defaults") {
  const ValidationResult v = validate_config(kMinimal);
  REQUIRE(v.ok());
  const auto echo = nlohmann::json::parse(config_json(*v.config));
  CHECK(echo["model"] == "damped_oscillator");
  CHECK(echo["Omega"] == 1.0);
  CHECK(echo["system_dim"] == 10);
  CHECK(echo["bath"]["gamma2"] == 0.0);
  CHECK(echo["bath"]["omega_c"] == 0.0);
  CHECK(echo["output_dir"] == "nmqsd_out");
  CHECK(echo["tolerances"]["compare"] == 2e-3);
  CHECK(echo["tolerances"]["trace"] == 1e-8);
  CHECK(echo["initial_state"].is_null());
}

TEST_CASE("non-positive mode frequency") {
  const ValidationResult v = validate_config(R"(
model: damped_oscillator
Omega: 1.0
bath:
  type: discrete_modes
  temperature: 0.5
  modes:
    - {g: 0.3, omega: -1}
grid: {t_max: 1.0, n_steps: 20}
runs: [coefficients]
)");
  CHECK_FALSE(v.ok());
  CHECK(has_issue(v, "bath.modes[0].omega"));
}

TEST_CASE("trajectories need an initial state") {
  const ValidationResult v = validate_config(R"(
model: damped_oscillator
Omega: 1.0
bath:
  type: discrete_modes
  temperature: 0.5
  modes:
    - {g: 0.3, omega: 1.0}
grid: {t_max: 1.0, n_steps: 20}
runs:
  - trajectories: {M: 100}
)");
  CHECK_FALSE(v.ok());
  CHECK(has_issue(v, "initial_state"));
}

TEST_CASE("empty runs") {
  const ValidationResult v = validate_config(R"(
model: damped_oscillator
Omega: 1.0
bath: {type: exponential_kernel, gamma1: 1.0, kappa: 4.0}
grid: {t_max: 1.0, n_steps: 20}
runs: []
)");
  CHECK_FALSE(v.ok());
  CHECK(has_issue(v, "runs"));
}

TEST_CASE("every problem is reported") {
  const ValidationResult v = validate_config(R"(
model: damped_oscillator
Omega: fast
colour: blue
bath:
  type: discrete_modes
  temperature: -1
  modes:
    - {g: 0.3, omega: 0}
grid: {t_max: 1.0, n_steps: 400}
initial_state: {fock: 12}
runs:
  - trajectories: {M: 100}
  - oracle
  - lindblad
)");
  CHECK_FALSE(v.ok());
  for (const char* path : {"Omega", "colour", "bath.temperature", "bath.modes[0].omega", "grid.n_steps"}) {
    CHECK_MESSAGE(has_issue(v, path), path);
  }
  CHECK(v.issues.size() >= 6);
}

TEST_CASE("model-specific checks") {
  const ValidationResult reg = validate_config(R"(
model: dephasing
bath: {type: exponential_kernel, gamma1: 0.1, kappa: 2.0}
grid: {t_max: 1.0, n_steps: 20}
initial_state: {fock: 1}
runs: [master]
)");
  CHECK_FALSE(reg.ok());
  CHECK(has_issue(reg, "initial_state"));

  const ValidationResult oracle = validate_config(R"(
model: damped_oscillator
Omega: 1.0
bath: {type: exponential_kernel, gamma1: 0.1, kappa: 2.0}
grid: {t_max: 1.0, n_steps: 20}
initial_state: {fock: 1}
runs: [oracle]
)");
  CHECK_FALSE(oracle.ok());

  const ValidationResult ok = validate_config(R"(
model: dephasing
Omega: 0.5
bath: {type: exponential_kernel, gamma1: 0.1, kappa: 2.0}
grid: {t_max: 1.0, n_steps: 20}
initial_state: {register: "+0"}
runs: [coefficients, master]
)");
  CHECK(ok.ok());
  CHECK(model_operators(*ok.config).H.rows() == 4);
}

}  // TEST_SUITE
