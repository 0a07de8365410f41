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

#include "nmqsd/kernels.hpp"
#include "nmqsd/quantum_core.hpp"
#include "nmqsd/series.hpp"

namespace nmqsd {

/// d rho/dt = -i Omega [N, rho] + a [A, rho A^+] + b [A, A^+ rho]
///            + c [A^+, A rho] + d [A^+, rho A]
MatrixXc convolutionless_rhs(const MatrixXc& rho, Complex a, Complex b, Complex c, Complex d,
                             double Omega, const FockSpace& fock);

/// Classical RK4 on the coefficient grid; coefficients are linearly
/// interpolated at half steps.
DensitySeries integrate_convolutionless(const DensityMatrix& rho0, const CoefficientTable& coeffs,
                                        double Omega, const FockSpace& fock);

/// Markovian limit with constant rates, stepped on `grid`.
DensitySeries integrate_lindblad(const DensityMatrix& rho0, double gamma1, double gamma2,
                                 const MatrixXc& L, const MatrixXc& H, const TimeGrid& grid);

/// Dephasing family: requires L = L^+ and [H, L] = i kappa 1.
DensitySeries integrate_dephasing(const DensityMatrix& rho0, const DephasingCoefficients& deph,
                                  const MatrixXc& H, const MatrixXc& L);

}  // namespace nmqsd
