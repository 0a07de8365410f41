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

#include <optional>
#include <string>
#include <vector>

#include "nmqsd/config.hpp"
#include "nmqsd/quantum_core.hpp"

namespace nmqsd {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::optional<std::string> output_dir;  // overrides the config value
  int workers = 1;
};

struct TaskReport {
  std::string name;
  bool ok = true;
  std::string error;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

struct RunReport {
  std::string output_dir;
  std::vector<TaskReport> tasks;
  std::string json;  // contents of report.json

  bool ok() const noexcept;
};

/// System operators of the configured model.
struct ModelOperators {
  MatrixXc H;
  MatrixXc L;         // coupling operator
  MatrixXc lowering;  // a, or sum of sigma_minus for the register
  MatrixXc number;    // a^+ a, or sum (1 + sigma_z)/2
};

ModelOperators model_operators(const ExperimentConfig& config);
StateVector initial_vector(const ExperimentConfig& config);

/// Echo of the validated configuration with every default filled in.
std::string config_json(const ExperimentConfig& config);

/// Runs the tasks in dependency order, writes one CSV per task and
/// report.json into the output directory. A failing task is recorded and the
/// remaining tasks that do not depend on it still run.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options);

}  // namespace nmqsd
