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

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nmqsd/error.hpp"
#include "nmqsd/types.hpp"

namespace nmqsd {

/// Density matrices and state vectors are plain Eigen objects; the time they
/// belong to is carried by the enclosing series.
using DensityMatrix = MatrixXc;
using StateVector = VectorXc;

/// Truncated oscillator ladder operators on |0>..|dim-1>.
template <typename Scalar = double>
struct BasicFockSpace {
  Index dim = 0;
  Matrix<Scalar> annihilator;
  Matrix<Scalar> creator;
  Matrix<Scalar> number_op;
};

using FockSpace = BasicFockSpace<double>;

template <typename Scalar = double>
BasicFockSpace<Scalar> build_fock_space(Index dim) {
  if (dim < 2) {
    throw Error(ErrorCode::invalid_dimension,
                "Fock dimension must be at least 2, got " + std::to_string(dim));
  }
  BasicFockSpace<Scalar> fs;
  fs.dim = dim;
  fs.annihilator = Matrix<Scalar>::Zero(dim, dim);
  for (Index m = 1; m < dim; ++m) {
    fs.annihilator(m - 1, m) = std::sqrt(static_cast<Scalar>(m));
  }
  fs.creator = fs.annihilator.adjoint();
  fs.number_op = fs.creator * fs.annihilator;
  return fs;
}

template <typename A, typename B>
auto commutator(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  return (x * y - y * x).eval();
}

struct Diagnostics {
  double herm_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
};

template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& rho) {
  if (rho.rows() != rho.cols()) throw Error(ErrorCode::shape, "matrix is not square");
  if (rho.size() == 0) return 0.0;
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
Diagnostics density_diagnostics(const Eigen::MatrixBase<Derived>& rho) {
  if (rho.rows() != rho.cols()) {
    throw Error(ErrorCode::shape, "density matrix is not square");
  }
  using Plain = typename Derived::PlainObject;
  Diagnostics d;
  d.herm_defect = hermiticity_defect(rho);
  d.trace_defect = std::abs(rho.trace() - typename Derived::Scalar(1));
  const Plain herm = (0.5 * (rho + rho.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Plain> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

/// Half the trace norm of the difference.
template <typename A, typename B>
double trace_distance(const Eigen::MatrixBase<A>& rho1, const Eigen::MatrixBase<B>& rho2) {
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols() || rho1.rows() != rho1.cols()) {
    throw Error(ErrorCode::shape, "trace_distance: dimension mismatch");
  }
  using Plain = typename A::PlainObject;
  const Plain diff = (rho1 - rho2).eval();
  Eigen::JacobiSVD<Plain> svd(diff);
  return 0.5 * svd.singularValues().sum();
}

/// Combined population of the `levels` highest basis states.
template <typename Derived>
double top_population(const Eigen::MatrixBase<Derived>& rho, Index levels = 2) {
  const Index n = rho.rows();
  double p = 0.0;
  for (Index i = std::max<Index>(0, n - levels); i < n; ++i) p += std::real(rho(i, i));
  return p;
}

VectorXc fock_state(Index dim, Index n);

/// Truncated coherent state, renormalized on the truncated space.
VectorXc coherent_state(Index dim, Complex alpha);

inline constexpr double kLeakageThreshold = 1e-6;

}  // namespace nmqsd
