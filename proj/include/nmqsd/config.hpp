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


#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nmqsd/bath.hpp"
#include "nmqsd/grid.hpp"
#include "nmqsd/noise.hpp"

namespace nmqsd {

enum class ModelKind { damped_oscillator, dephasing };
enum class TaskKind { coefficients, trajectories, master, lindblad, oracle, compare };

std::string to_string(ModelKind m);
std::string to_string(TaskKind t);

struct InitialState {
  enum class Kind { fock, coherent, register_basis };
  Kind kind = Kind::fock;
  Index fock_n = 0;
  Complex amplitude{0.0, 0.0};
  std::string basis;  // characters 0, 1, +, - ; first character is the leftmost factor
};

struct Task {
  TaskKind kind = TaskKind::master;
  // trajectories
  Index trajectories = 0;
  std::uint64_t seed = 1;
  NoiseMethod noise = NoiseMethod::cholesky;
  // lindblad
  std::optional<double> gamma1;
  std::optional<double> gamma2;
  // compare: names of series tasks; empty means every series task in the run
  std::vector<TaskKind> series;
};

struct Tolerances {
  double compare = 2e-3;             // deterministic series pairs
  double trajectory_compare = 0.05;  // pairs involving the trajectory ensemble
  double trace = 1e-8;
  double herm = 1e-10;
  double positivity = 1e-8;          // min eigenvalue >= -positivity
  double energy = 1e-10;             // oracle <H_tot> drift
};

struct ExperimentConfig {
  ModelKind model = ModelKind::damped_oscillator;
  double Omega = 1.0;
  Index system_dim = 10;              // oscillator truncation; register size sets it for dephasing
  BathModel bath;
  std::vector<Index> mode_dims;       // oracle truncation per discrete mode
  TimeGrid grid{1.0, 2};
  std::optional<InitialState> initial_state;
  std::vector<Task> runs;
  std::string output_dir = "nmqsd_out";
  Tolerances tolerances;

  bool has(TaskKind k) const;
};

struct ConfigIssue {
  std::string path;
  std::string message;
};

struct ValidationResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigIssue> issues;
  bool ok() const noexcept { return config.has_value() && issues.empty(); }
};

/// Parses and validates a YAML experiment description. Every problem is
/// collected with its key path; parsing does not stop at the first one.
ValidationResult validate_config(const std::string& text);
ValidationResult load_config(const std::string& path);

inline constexpr int kMaxRegisterQubits = 4;

}  // namespace nmqsd
