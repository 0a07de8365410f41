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
#include <vector>

#include "nmqsd/kernels.hpp"
#include "nmqsd/noise.hpp"
#include "nmqsd/quantum_core.hpp"
#include "nmqsd/series.hpp"

namespace nmqsd {

/// O-bar operators at t_k: Obar1 = s1 a + n1, Obar2 = s2 a^+ + n2.
struct OperatorAssembly {
  Index k = 0;
  Complex s1, s2, n1, n2;
  MatrixXc Obar1;
  MatrixXc Obar2;
};

/// n1(t_k) = sum_m w_m K1(k, m) w*_m and n2(t_k) = sum_m w_m K2(k, m) z*_m.
struct NoiseFunctionals {
  VectorXc n1;
  VectorXc n2;
};

NoiseFunctionals noise_functionals(const TrajectoryKernels& kernels, const NoisePath& noise);

OperatorAssembly assemble_O(const TrajectoryKernels& kernels, Index k, const NoisePath& noise,
                            const FockSpace& fock);

struct Trajectory {
  std::vector<StateVector> states;  // one per grid point, unnormalized
  double max_top_population = 0.0;  // relative weight of the two top levels
  bool leakage() const noexcept { return max_top_population > kLeakageThreshold; }
};

/// Linear QSD for the damped oscillator, explicit midpoint in the frame
/// rotating with Omega a^+a (free rotation exact), noise and kernel data
/// linearly interpolated at half steps.
Trajectory propagate_trajectory(const StateVector& psi0, const NoisePath& noise,
                                const TrajectoryKernels& kernels, const FockSpace& fock);

struct EnsembleResult {
  DensitySeries rho_series;
  Index n_trajectories = 0;
  VectorXr norm_mean;
  VectorXr norm_var;
  double max_trace_drift = 0.0;
  Index leaking_trajectories = 0;
};

/// rho(t_k) = (1/M) sum |psi><psi| without renormalization.
EnsembleResult ensemble_average(const std::vector<Trajectory>& trajectories, const TimeGrid& grid);

struct EnsembleOptions {
  Index trajectories = 1000;
  std::uint64_t seed = 1;
  std::uint64_t first_stream = 0;
  int workers = 1;
  NoiseMethod method = NoiseMethod::cholesky;
  std::optional<BathModel> bath;  // required for discrete-mode noise
  Index block = 64;               // fixed reduction block; independent of workers
  bool keep_final = false;        // retain final states and noise paths
};

struct EnsembleRun {
  EnsembleResult result;
  std::vector<StateVector> final_states;
  std::vector<NoisePath> noises;
};

/// Streams trajectories stream_id = first_stream .. first_stream + M - 1.
/// Partial sums are formed per fixed-size block and combined in block order,
/// so the output is bit-identical for any worker count.
EnsembleRun run_ensemble(const StateVector& psi0, const CorrelationTable& correlations,
                         const TrajectoryKernels& kernels, const FockSpace& fock,
                         const EnsembleOptions& options);

/// Dephasing family: L = L^+, [H, L] = i kappa 1, Obar_i = F_i(t) L - kappa G_i(t)
/// with F_i = int alpha_i(t - s) ds and G_i = int alpha_i(t - s)(t - s) ds.
struct DephasingSystem {
  MatrixXc H;
  MatrixXc L;
  double kappa = 0.0;
};

Trajectory propagate_dephasing_trajectory(const StateVector& psi0, const NoisePath& noise,
                                          const CorrelationTable& correlations,
                                          const DephasingSystem& sys);

EnsembleRun run_dephasing_ensemble(const StateVector& psi0, const CorrelationTable& correlations,
                                   const DephasingSystem& sys, const EnsembleOptions& options);

struct NovikovReport {
  Index samples = 0;
  std::vector<Index> s_indices;
  double max_lhs = 0.0;        // max |M[w*_s P_t]|
  double max_rhs = 0.0;        // max |int conj(alpha_2(s-s')) R_2^+(t,s') ds'|
  double max_deviation = 0.0;  // max |lhs - rhs|
  double max_ratio = 0.0;      // max |lhs - rhs| / (5 standard errors)
  bool passed = false;
};

/// Novikov identity M[w*_s P_t] = int_0^t conj(alpha_2(s - s')) M[P_t O_2^+(t,s')] ds'
/// at t = t_index, entrywise, for up to `s_points` values of s.
NovikovReport novikov_check(const std::vector<StateVector>& final_states,
                            const std::vector<NoisePath>& noises, const FJSlice& slice,
                            const CorrelationTable& correlations, const FockSpace& fock,
                            Index s_points = 9);

}  // namespace nmqsd
