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

#include <ostream>
#include <vector>

#include "nmqsd/bath.hpp"
#include "nmqsd/grid.hpp"

namespace nmqsd {

inline constexpr double kConditionWarning = 1e12;

/// Master-equation coefficients. c and d are derived from a and b and are
/// never computed independently.
struct CoefficientTable {
  TimeGrid grid;
  VectorXc a, b, c, d;
  double max_condition = 1.0;
  Index ill_conditioned_rows = 0;

  static CoefficientTable from_ab(const TimeGrid& grid, VectorXc a, VectorXc b);
};

struct DephasingCoefficients {
  TimeGrid grid;
  VectorXc f;
  VectorXc g;
  double kappa = 0.0;
};

/// How the final-value Volterra rows are solved. Both solve the identical
/// trapezoidal equations; `toeplitz` exploits the difference-kernel
/// structure (initial-value marching plus FFT correlations) and is the
/// production path, `dense_collocation` assembles and factors every row.
enum class Discretization { dense_collocation, toeplitz };

/// u(t_k, s_i) for i = 0..k by dense collocation. `condition` receives the
/// reciprocal of the LU condition estimate.
VectorXc solve_u(const CorrelationTable& correlations, Index t_index, double Omega,
                 double* condition = nullptr);

struct SourceRow {
  VectorXc X;
  VectorXc Y;
};

/// X(t,s) = int_0^t alpha_2(s' - s) conj(u(t,s')) ds',
/// Y(t,s) = int_0^t alpha_1(s' - s) u(t,s') ds'.
SourceRow solve_sources(const VectorXc& u_row, const CorrelationTable& correlations);

struct FGHIRow {
  VectorXc F, G, H, I;
  double condition = 1.0;
};

/// Dense-collocation F, G, H, I on s in [0, t_k].
FGHIRow solve_FGHI(const CorrelationTable& correlations, double Omega, Index t_index);

CoefficientTable master_coefficients(const CorrelationTable& correlations, double Omega,
                                     Discretization method = Discretization::toeplitz,
                                     int workers = 1);

/// Zero-temperature path: F = u-profile / final value, b = 0.
CoefficientTable zero_temperature_coefficients(const CorrelationTable& correlations, double Omega);

/// Homogeneous profile U(tau_m), m = 0..n; u(t_k, s_i) = U(k - i).
VectorXc u_profile(const CorrelationTable& correlations, double Omega);

/// f_1, f_2 and j_1, j_2 at fixed t_k; j(i, m) = j(t_k; s_i, s'_m). On the
/// line s = s' the stored value is the quadrature representative: the mean
/// of both one-sided limits in the interior, the right limit at s' = 0 and
/// the left limit at the corner s = s' = t (so j(k, k) = -sigma).
struct FJSlice {
  Index t_index = 0;
  VectorXc f1, f2;
  MatrixXc j1, j2;
  double condition = 1.0;
};

FJSlice solve_fj_s_route(const CorrelationTable& correlations, double Omega, Index t_index);

/// Forward t-stepping of the coupled nonlinear equations (cross-check only).
/// f1[k], f2[k] hold rows over s = 0..k; j1, j2 hold the slice at t_max.
struct FJTables {
  std::vector<VectorXc> f1, f2;
  MatrixXc j1, j2;
};

FJTables solve_fj_t_route(const CorrelationTable& correlations, double Omega);

/// Noise-independent trajectory data: s1(t_k), s2(t_k) and the reduced
/// j-kernels K1(k, m) = sum_i w_i alpha_1(t_k - s_i) j_1(t_k; s_i, s'_m),
/// K2 likewise with alpha_2 and j_2.
struct TrajectoryKernels {
  TimeGrid grid;
  double Omega = 0.0;
  VectorXc s1, s2;
  MatrixXc K1, K2;
  double max_condition = 1.0;
};

inline constexpr Index kMaxTrajectorySteps = 256;

TrajectoryKernels trajectory_kernels(const CorrelationTable& correlations, double Omega,
                                     int workers = 1);

DephasingCoefficients dephasing_coefficients(const CorrelationTable& correlations, double kappa);

void write_coefficients_csv(const CoefficientTable& coeffs, std::ostream& out);

}  // namespace nmqsd
