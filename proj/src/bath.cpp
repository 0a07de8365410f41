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

#include "nmqsd/bath.hpp"

#include <cmath>
#include <string>

#include "nmqsd/error.hpp"

namespace nmqsd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double mean_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) {
    throw Error(ErrorCode::divergent_occupation,
                "mean occupation diverges for omega = " + std::to_string(omega));
  }
  if (temperature < 0.0) {
    throw Error(ErrorCode::config, "negative temperature");
  }
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(omega / temperature);
}

void validate_bath(const BathModel& bath) {
  std::visit(overloaded{
                 [](const DiscreteModes& b) {
                   if (b.temperature < 0.0) throw Error(ErrorCode::config, "negative temperature");
                   for (const auto& m : b.modes) (void)mean_occupation(m.omega, b.temperature);
                 },
                 [](const ExponentialKernel& b) {
                   if (!(b.kappa > 0.0)) throw Error(ErrorCode::config, "kappa must be positive");
                   if (b.gamma1 < 0.0 || b.gamma2 < 0.0) {
                     throw Error(ErrorCode::invalid_rate, "negative kernel rate");
                   }
                   if (b.gamma2 > b.gamma1) {
                     throw Error(ErrorCode::kernel_not_admissible, "gamma2 exceeds gamma1");
                   }
                 },
             },
             bath);
}

Complex alpha1(const BathModel& bath, double tau) {
  return std::visit(overloaded{
                        [tau](const DiscreteModes& b) {
                          Complex s = 0.0;
                          for (const auto& m : b.modes) {
                            const double nbar = mean_occupation(m.omega, b.temperature);
                            s += (nbar + 1.0) * std::norm(m.g) * std::exp(-kI * m.omega * tau);
                          }
                          return s;
                        },
                        [tau](const ExponentialKernel& b) {
                          return 0.5 * b.gamma1 * b.kappa *
                                 std::exp(-b.kappa * std::abs(tau) - kI * b.omega_c * tau);
                        },
                    },
                    bath);
}

Complex alpha2(const BathModel& bath, double tau) {
  return std::visit(overloaded{
                        [tau](const DiscreteModes& b) {
                          Complex s = 0.0;
                          for (const auto& m : b.modes) {
                            const double nbar = mean_occupation(m.omega, b.temperature);
                            s += nbar * std::norm(m.g) * std::exp(kI * m.omega * tau);
                          }
                          return s;
                        },
                        [tau](const ExponentialKernel& b) {
                          return 0.5 * b.gamma2 * b.kappa *
                                 std::exp(-b.kappa * std::abs(tau) + kI * b.omega_c * tau);
                        },
                    },
                    bath);
}

CorrelationTable::CorrelationTable(TimeGrid grid, VectorXc alpha1, VectorXc alpha2)
    : grid_(grid), alpha1_(std::move(alpha1)), alpha2_(std::move(alpha2)) {
  if (alpha1_.size() != grid_.size() || alpha2_.size() != grid_.size()) {
    throw Error(ErrorCode::shape, "correlation arrays do not match the grid");
  }
}

CorrelationTable correlation_table(const BathModel& bath, const TimeGrid& grid) {
  validate_bath(bath);
  VectorXc a1(grid.size()), a2(grid.size());
  for (Index k = 0; k < grid.size(); ++k) {
    a1(k) = alpha1(bath, grid.time(k));
    a2(k) = alpha2(bath, grid.time(k));
  }
  // real symmetric spectra give real alpha(0)
  a1(0) = a1(0).real();
  a2(0) = a2(0).real();
  return CorrelationTable(grid, std::move(a1), std::move(a2));
}

bool zero_temperature_limit_check(const BathModel& bath, const TimeGrid& grid) {
  const CorrelationTable table = correlation_table(bath, grid);
  if (!table.zero_temperature()) return false;
  if (const auto* modes = std::get_if<DiscreteModes>(&bath)) {
    for (Index k = 0; k < grid.size(); ++k) {
      Complex ref = 0.0;
      for (const auto& m : modes->modes) ref += std::norm(m.g) * std::exp(-kI * m.omega * grid.time(k));
      if (std::abs(ref - table.alpha1()(k)) > 1e-14 * (1.0 + std::abs(ref))) return false;
    }
  }
  return true;
}

}  // namespace nmqsd
