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

#include "nmqsd/master.hpp"

#include <algorithm>
#include <cmath>

#include "nmqsd/error.hpp"

namespace nmqsd {

namespace {

/// RK4 over the grid. rhs(k, h, rho) evaluates the generator at t_k + h dt
/// with h in {0, 1/2, 1}; the right-hand side is Hermitized and the
/// residual recorded.
template <typename Rhs>
DensitySeries rk4(const DensityMatrix& rho0, const TimeGrid& grid, Rhs&& rhs) {
  const double dt = grid.dt();
  double residual = 0.0;
  auto eval = [&](Index k, double h, const MatrixXc& rho) {
    MatrixXc d = rhs(k, h, rho);
    residual = std::max(residual, hermiticity_defect(d));
    return MatrixXc(0.5 * (d + d.adjoint()));
  };
  std::vector<DensityMatrix> states;
  states.reserve(static_cast<std::size_t>(grid.size()));
  states.push_back(rho0);
  MatrixXc rho = rho0;
  for (Index k = 0; k < grid.n_steps(); ++k) {
    const MatrixXc k1 = eval(k, 0.0, rho);
    const MatrixXc k2 = eval(k, 0.5, rho + 0.5 * dt * k1);
    const MatrixXc k3 = eval(k, 0.5, rho + 0.5 * dt * k2);
    const MatrixXc k4 = eval(k, 1.0, rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!rho.allFinite()) {
      throw Error(ErrorCode::propagation_diverged, "density matrix became non-finite");
    }
    states.push_back(rho);
  }
  DensitySeries s = make_series(grid, std::move(states));
  s.max_hermitization_residual = residual;
  return s;
}

Complex interpolate(const VectorXc& v, Index k, double h) {
  if (h == 0.0) return v(k);
  if (h == 1.0) return v(k + 1);
  return (1.0 - h) * v(k) + h * v(k + 1);
}

void check_density(const DensityMatrix& rho0, Index dim) {
  if (rho0.rows() != dim || rho0.cols() != dim) {
    throw Error(ErrorCode::shape, "initial density matrix does not match the operator dimension");
  }
}

}  // namespace

MatrixXc convolutionless_rhs(const MatrixXc& rho, Complex a, Complex b, Complex c, Complex d,
                             double Omega, const FockSpace& fock) {
  const MatrixXc& A = fock.annihilator;
  const MatrixXc& Ad = fock.creator;
  const MatrixXc Arho = A * rho;
  const MatrixXc rhoA = rho * A;
  const MatrixXc Adrho = Ad * rho;
  const MatrixXc rhoAd = rho * Ad;
  MatrixXc out = -kI * Omega * (fock.number_op * rho - rho * fock.number_op);
  out += a * (A * rhoAd - rhoAd * A);
  out += b * (A * Adrho - Adrho * A);
  out += c * (Ad * Arho - Arho * Ad);
  out += d * (Ad * rhoA - rhoA * Ad);
  return out;
}

DensitySeries integrate_convolutionless(const DensityMatrix& rho0, const CoefficientTable& coeffs,
                                        double Omega, const FockSpace& fock) {
  check_density(rho0, fock.dim);
  const Index n = coeffs.grid.size();
  if (coeffs.a.size() != n || coeffs.b.size() != n || coeffs.c.size() != n ||
      coeffs.d.size() != n) {
    throw Error(ErrorCode::shape, "coefficient table does not match its grid");
  }
  return rk4(rho0, coeffs.grid, [&](Index k, double h, const MatrixXc& rho) {
    return convolutionless_rhs(rho, interpolate(coeffs.a, k, h), interpolate(coeffs.b, k, h),
                               interpolate(coeffs.c, k, h), interpolate(coeffs.d, k, h), Omega,
                               fock);
  });
}

DensitySeries integrate_lindblad(const DensityMatrix& rho0, double gamma1, double gamma2,
                                 const MatrixXc& L, const MatrixXc& H, const TimeGrid& grid) {
  if (gamma1 < 0.0 || gamma2 < 0.0) {
    throw Error(ErrorCode::invalid_rate, "Lindblad rates must be non-negative");
  }
  check_density(rho0, H.rows());
  if (L.rows() != H.rows() || L.cols() != H.cols()) {
    throw Error(ErrorCode::shape, "L and H dimensions differ");
  }
  const MatrixXc Ld = L.adjoint();
  const MatrixXc LdL = Ld * L;
  const MatrixXc LLd = L * Ld;
  return rk4(rho0, grid, [&](Index, double, const MatrixXc& rho) {
    MatrixXc out = -kI * (H * rho - rho * H);
    out += 0.5 * gamma1 * (2.0 * L * rho * Ld - LdL * rho - rho * LdL);
    out += 0.5 * gamma2 * (2.0 * Ld * rho * L - LLd * rho - rho * LLd);
    return out;
  });
}

DensitySeries integrate_dephasing(const DensityMatrix& rho0, const DephasingCoefficients& deph,
                                  const MatrixXc& H, const MatrixXc& L) {
  check_density(rho0, H.rows());
  const double scale = 1.0 + H.cwiseAbs().maxCoeff() * L.cwiseAbs().maxCoeff();
  if (hermiticity_defect(L) > 1e-12 * (1.0 + L.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::model_mismatch, "dephasing operator L must be Hermitian");
  }
  const MatrixXc comm = commutator(H, L) - kI * deph.kappa * MatrixXc::Identity(H.rows(), H.cols());
  if (comm.cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::model_mismatch, "[H, L] is not i kappa times the identity");
  }
  if (deph.f.size() != deph.grid.size() || deph.g.size() != deph.grid.size()) {
    throw Error(ErrorCode::shape, "dephasing coefficients do not match their grid");
  }
  return rk4(rho0, deph.grid, [&](Index k, double h, const MatrixXc& rho) {
    const Complex f = interpolate(deph.f, k, h);
    const Complex g = interpolate(deph.g, k, h);
    const MatrixXc Lrho = L * rho;
    const MatrixXc rhoL = rho * L;
    MatrixXc out = -kI * (H * rho - rho * H);
    out += f * (Lrho * L - L * Lrho);
    out += std::conj(f) * (L * rhoL - rhoL * L);
    out += g * (rho * L - L * rho);
    out += std::conj(g) * (L * rho - rho * L);
    return out;
  });
}

}  // namespace nmqsd
