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


#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nmqsd/config.hpp"
#include "nmqsd/experiment.hpp"
#include "nmqsd/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitTaskFailure = 2;
constexpr int kExitInternal = 3;

void print_issues(const nmqsd::ValidationResult& v) {
  for (const auto& issue : v.issues) {
    std::cerr << (issue.path.empty() ? "<root>" : issue.path) << ": " << issue.message << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nmqsd: non-Markovian QSD trajectories and convolutionless master equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  int workers = 0;

  auto* run = app.add_subcommand("run", "run the tasks of an experiment config");
  run->add_option("config", config_path, "experiment YAML file")->required();
  run->add_option("--output-dir", output_dir, "override output_dir from the config");
  run->add_option("--workers", workers, "worker threads (default: NMQSD_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "validate an experiment config");
  validate->add_option("config", config_path, "experiment YAML file")->required();

  app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (app.got_subcommand("version")) {
      std::cout << "nmqsd " << nmqsd::kVersion << '\n';
      return kExitOk;
    }
    const nmqsd::ValidationResult v = nmqsd::load_config(config_path);
    if (!v.ok()) {
      print_issues(v);
      std::cerr << v.issues.size() << " configuration error(s)\n";
      return kExitValidation;
    }
    if (app.got_subcommand("validate")) {
      std::cout << nmqsd::config_json(*v.config) << '\n';
      return kExitOk;
    }
    nmqsd::RunOptions opts;
    if (!output_dir.empty()) opts.output_dir = output_dir;
    opts.workers = workers > 0 ? workers : nmqsd::default_workers();
    const nmqsd::RunReport report = nmqsd::run_experiment(*v.config, opts);
    for (const auto& t : report.tasks) {
      std::cout << t.name << ": " << (t.ok ? "ok" : "FAILED");
      if (!t.ok) std::cout << " (" << t.error << ")";
      std::cout << '\n';
      for (const auto& w : t.warnings) std::cout << "  warning: " << w << '\n';
    }
    std::cout << "report: " << report.output_dir << "/report.json\n";
    return report.ok() ? kExitOk : kExitTaskFailure;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
