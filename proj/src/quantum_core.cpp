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

#include "nmqsd/quantum_core.hpp"

#include <cmath>

#include "nmqsd/grid.hpp"

namespace nmqsd {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_grid: return "invalid-grid";
    case ErrorCode::invalid_state: return "invalid-state";
    case ErrorCode::shape: return "shape";
    case ErrorCode::divergent_occupation: return "divergent-occupation";
    case ErrorCode::kernel_not_admissible: return "kernel-not-admissible";
    case ErrorCode::insufficient_sample: return "insufficient-sample";
    case ErrorCode::solver_singular: return "solver-singular";
    case ErrorCode::nonlinear_blowup: return "nonlinear-blowup";
    case ErrorCode::staging: return "staging";
    case ErrorCode::propagation_diverged: return "propagation-diverged";
    case ErrorCode::invalid_rate: return "invalid-rate";
    case ErrorCode::model_mismatch: return "model-mismatch";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

TimeGrid::TimeGrid(double t_max, Index n_steps) : t_max_(t_max), n_steps_(n_steps) {
  if (n_steps < 2) throw Error(ErrorCode::invalid_grid, "n_steps must be at least 2");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw Error(ErrorCode::invalid_grid, "t_max must be positive and finite");
  }
}

VectorXc fock_state(Index dim, Index n) {
  if (n < 0 || n >= dim) {
    throw Error(ErrorCode::invalid_state, "Fock level " + std::to_string(n) + " outside truncation");
  }
  VectorXc psi = VectorXc::Zero(dim);
  psi(n) = 1.0;
  return psi;
}

VectorXc coherent_state(Index dim, Complex alpha) {
  if (dim < 1) throw Error(ErrorCode::invalid_dimension, "empty Fock space");
  VectorXc psi(dim);
  psi(0) = 1.0;
  for (Index m = 1; m < dim; ++m) psi(m) = psi(m - 1) * alpha / std::sqrt(static_cast<double>(m));
  return psi / psi.norm();
}

}  // namespace nmqsd
