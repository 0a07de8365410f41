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

#include <vector>

#include "nmqsd/bath.hpp"
#include "nmqsd/grid.hpp"
#include "nmqsd/quantum_core.hpp"
#include "nmqsd/series.hpp"

namespace nmqsd {

struct OracleMode {
  Complex g;
  double omega = 1.0;
  Index mode_dim = 2;
};

/// System oscillator coupled to a few explicit bath modes,
/// H_tot = Omega a^+a + sum (g* a^+ b + g a b^+) + sum omega b^+b.
/// Basis index = s + S (b_1 + D_1 (b_2 + ...)), system digit fastest.
struct OracleConfig {
  Index system_dim = 2;
  std::vector<OracleMode> modes;
  double temperature = 0.0;
  double Omega = 1.0;
};

inline constexpr Index kMaxOracleDimension = 4096;
inline constexpr double kMaxThermalLeakage = 1e-6;
inline constexpr Index kEnergySamples = 256;

/// Thermal weight beyond the truncation, q^mode_dim with q = exp(-omega/T).
double thermal_leakage(double omega, double temperature, Index mode_dim);

/// Smallest mode_dim with thermal_leakage <= kMaxThermalLeakage.
Index suggested_mode_dim(double omega, double temperature);

Index total_dimension(const OracleConfig& config);
Index bath_dimension(const OracleConfig& config);

/// Throws config (shape or size) or truncation (thermal leakage) errors.
void validate_oracle(const OracleConfig& config);

/// The same modes as a pipeline bath model.
DiscreteModes oracle_bath(const OracleConfig& config);

MatrixXc total_hamiltonian(const OracleConfig& config);

/// Tensor product of truncated Gibbs states, diagonal in the bath Fock basis.
DensityMatrix thermal_bath_state(const OracleConfig& config);

/// rho_sys (x) rho_bath in the oracle ordering.
DensityMatrix product_state(const DensityMatrix& rho_sys, const DensityMatrix& rho_bath);

/// Partial trace over all bath factors.
DensityMatrix reduced_state(const DensityMatrix& rho_tot, const OracleConfig& config);

double total_energy(const DensityMatrix& rho_tot, const OracleConfig& config);

/// rho(t_{k+1}) = U rho(t_k) U^+ with U = exp(-i H_tot dt) built once from the
/// exact spectrum. Stores every total state, so intended for small dimensions.
std::vector<DensityMatrix> evolve_total(const DensityMatrix& rho_tot, const OracleConfig& config,
                                        const TimeGrid& grid);

struct OracleRun {
  DensitySeries reduced;
  VectorXr energy;             // <H_tot> at energy_times
  VectorXr energy_times;
  double energy_drift = 0.0;   // max |<H_tot>(t) - <H_tot>(0)|
  Index pure_states = 0;
  double dropped_weight = 0.0;  // initial-state weight below the cutoff
};

/// Reduced dynamics for rho_sys (x) thermal bath. The initial state is split
/// into pure product states, each evolved exactly in the excitation-number
/// blocks of H_tot; components with weight below `cutoff` are dropped.
OracleRun oracle_reduced_series(const DensityMatrix& rho_sys0, const OracleConfig& config,
                                const TimeGrid& grid, double cutoff = 1e-14);

}  // namespace nmqsd
