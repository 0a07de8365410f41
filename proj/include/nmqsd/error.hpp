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

#include <stdexcept>
#include <string>

namespace nmqsd {

enum class ErrorCode {
  invalid_dimension,
  invalid_grid,
  invalid_state,
  shape,
  divergent_occupation,
  kernel_not_admissible,
  insufficient_sample,
  solver_singular,
  nonlinear_blowup,
  staging,
  propagation_diverged,
  invalid_rate,
  model_mismatch,
  truncation,
  config,
};

const char* to_string(ErrorCode code) noexcept;

/// Every library failure is reported through this type; `code()` tells the
/// caller which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nmqsd
