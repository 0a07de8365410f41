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

#include <variant>
#include <vector>

#include "nmqsd/grid.hpp"
#include "nmqsd/types.hpp"

namespace nmqsd {

struct BathMode {
  Complex g;
  double omega = 1.0;
};

struct DiscreteModes {
  std::vector<BathMode> modes;
  double temperature = 0.0;
};

/// alpha_1 = (gamma1 kappa / 2) exp(-kappa tau - i omega_c tau),
/// alpha_2 = (gamma2 kappa / 2) exp(-kappa tau + i omega_c tau).
struct ExponentialKernel {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double kappa = 1.0;
  double omega_c = 0.0;
};

using BathModel = std::variant<DiscreteModes, ExponentialKernel>;

void validate_bath(const BathModel& bath);

/// Bose-Einstein occupation; zero at zero temperature.
double mean_occupation(double omega, double temperature);

/// Continuous-time correlation functions, valid for any sign of tau
/// through alpha(-tau) = conj(alpha(tau)).
Complex alpha1(const BathModel& bath, double tau);
Complex alpha2(const BathModel& bath, double tau);

/// alpha_1, alpha_2 sampled at tau_k = k dt, k = 0..n_steps.
class CorrelationTable {
 public:
  CorrelationTable(TimeGrid grid, VectorXc alpha1, VectorXc alpha2);

  const TimeGrid& grid() const noexcept { return grid_; }
  const VectorXc& alpha1() const noexcept { return alpha1_; }
  const VectorXc& alpha2() const noexcept { return alpha2_; }

  /// Lag in grid steps, either sign.
  Complex alpha1(Index lag) const noexcept {
    return lag >= 0 ? alpha1_(lag) : std::conj(alpha1_(-lag));
  }
  Complex alpha2(Index lag) const noexcept {
    return lag >= 0 ? alpha2_(lag) : std::conj(alpha2_(-lag));
  }

  /// beta(s_i, s_j) = alpha2(s_i - s_j) - alpha1(s_j - s_i).
  Complex beta(Index i, Index j) const noexcept { return alpha2(i - j) - alpha1(j - i); }

  /// alpha_1 - conj(alpha_2) on the grid; the temperature-independent
  /// kernel that drives the homogeneous u equation.
  VectorXc memory_kernel() const { return alpha1_ - alpha2_.conjugate(); }

  bool zero_temperature() const noexcept { return alpha2_.cwiseAbs().maxCoeff() == 0.0; }

  /// Same grid and alpha_1, alpha_2 replaced by alpha_1 + alpha_2 (dephasing).
  VectorXc total() const { return alpha1_ + alpha2_; }

 private:
  TimeGrid grid_;
  VectorXc alpha1_;
  VectorXc alpha2_;
};

CorrelationTable correlation_table(const BathModel& bath, const TimeGrid& grid);

/// True iff alpha_2 vanishes on the grid and alpha_1 equals the
/// zero-temperature mode sum sum |g|^2 exp(-i omega tau).
bool zero_temperature_limit_check(const BathModel& bath, const TimeGrid& grid);

}  // namespace nmqsd
