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

#include "nmqsd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>
#define EIGEN_FFTW_DEFAULT
#include <unsupported/Eigen/FFT>

#include "nmqsd/csv.hpp"
#include "nmqsd/error.hpp"
#include "nmqsd/parallel.hpp"

namespace nmqsd {

namespace {

void check_row(const CorrelationTable& correlations, Index t_index) {
  if (t_index < 0 || t_index > correlations.grid().n_steps()) {
    throw Error(ErrorCode::shape, "t index " + std::to_string(t_index) + " outside the grid");
  }
}

/// T[L] = trapezoid of A over lags 0..L; T[0] = 0.
VectorXc lag_trapezoid(const VectorXc& A, double dt) {
  VectorXc T = VectorXc::Zero(A.size());
  for (Index L = 1; L < A.size(); ++L) T(L) = T(L - 1) + 0.5 * dt * (A(L - 1) + A(L));
  return T;
}

/// Rows j < k: y_{j+1} - y_j - dt/2 (R_j + R_{j+1}) y; row k selects y_k.
MatrixXc interval_system(const MatrixXc& R, double dt) {
  const Index n = R.rows();
  MatrixXc M = MatrixXc::Zero(n, n);
  for (Index j = 0; j + 1 < n; ++j) {
    M.row(j) = -0.5 * dt * (R.row(j) + R.row(j + 1));
    M(j, j) -= 1.0;
    M(j, j + 1) += 1.0;
  }
  M(n - 1, n - 1) = 1.0;
  return M;
}

VectorXc interval_rhs(const VectorXc& src, double dt, Complex final_value) {
  const Index n = src.size();
  VectorXc rhs(n);
  for (Index j = 0; j + 1 < n; ++j) rhs(j) = 0.5 * dt * (src(j) + src(j + 1));
  rhs(n - 1) = final_value;
  return rhs;
}

double lu_condition(const Eigen::PartialPivLU<MatrixXc>& lu) {
  const double rc = lu.rcond();
  if (!(rc > 0.0) || !std::isfinite(rc)) {
    throw Error(ErrorCode::solver_singular, "collocation matrix is singular (rcond = 0)");
  }
  return 1.0 / rc;
}

void row_coefficients(const CorrelationTable& correlations, Index k, const VectorXc& F,
                      const VectorXc& G, const VectorXc& H, const VectorXc& I, Complex& a,
                      Complex& b) {
  const double dt = correlations.grid().dt();
  a = 0.0;
  b = 0.0;
  for (Index i = 0; i <= k; ++i) {
    const double w = trapezoid_weight(i, 0, k, dt);
    if (w == 0.0) continue;
    const Complex c1 = std::conj(correlations.alpha1()(k - i));
    const Complex a2 = correlations.alpha2()(k - i);
    a += w * (c1 * std::conj(F(i)) - a2 * I(i));
    b += w * (c1 * std::conj(G(i)) - a2 * H(i));
  }
}


using CVec = std::vector<Complex>;

/// FFT workspace for rows with 2k + 1 <= L; kernels are cut to lags |d| <= K.
struct FFTBucket {
  Index L = 0;
  Index K = 0;
  CVec fr1, fr2, fg, fgh;  // transforms of reversed alpha_1, alpha_2 and Green functions
};

/// Shared, read-only state of the Toeplitz route.
struct ToeplitzRoute {
  Index n = 0;
  double dt = 0.0;
  VectorXc U;
  std::vector<FFTBucket> buckets;

  const FFTBucket& bucket(Index k) const {
    for (const auto& b : buckets) {
      if (2 * k + 1 <= b.L) return b;
    }
    return buckets.back();
  }
};

ToeplitzRoute make_route(const CorrelationTable& correlations, double Omega) {
  ToeplitzRoute r;
  r.n = correlations.grid().n_steps();
  r.dt = correlations.grid().dt();
  r.U = u_profile(correlations, Omega);
  const Index n = r.n;
  const double dt = r.dt;

  // Green function of the lower-triangular Toeplitz operator acting on
  // particular solutions with zero initial value (F family: c = -i Omega,
  // kernel -B0; the H family is its complex conjugate).
  const VectorXc B0 = correlations.memory_kernel();
  const Complex c = -kI * Omega;
  auto K = [&](Index d) { return -B0(d); };
  VectorXc T(n + 1);
  T(0) = 1.0 - 0.5 * dt * (c + 0.5 * dt * K(0));
  if (n >= 1) T(1) = -1.0 - 0.5 * dt * (dt * K(1) + c + 0.5 * dt * K(0));
  for (Index d = 2; d <= n; ++d) T(d) = -0.5 * dt * dt * (K(d) + K(d - 1));
  VectorXc g(n + 1);
  g(0) = 1.0 / T(0);
  for (Index d = 1; d <= n; ++d) {
    Complex s = 0.0;
    for (Index e = 1; e <= d; ++e) s += T(e) * g(d - e);
    g(d) = -s / T(0);
  }

  Eigen::FFT<double> fft;
  for (Index L = 16;; L *= 2) {
    FFTBucket b;
    b.L = L;
    b.K = std::min(n, (L - 1) / 2);
    CVec rev1(L, 0.0), rev2(L, 0.0), gv(L, 0.0), ghv(L, 0.0);
    for (Index l = 0; l <= 2 * b.K; ++l) {
      rev1[l] = correlations.alpha1(b.K - l);
      rev2[l] = correlations.alpha2(b.K - l);
    }
    for (Index d = 0; d <= b.K; ++d) {
      gv[d] = g(d);
      ghv[d] = std::conj(g(d));
    }
    fft.fwd(b.fr1, rev1);
    fft.fwd(b.fr2, rev2);
    fft.fwd(b.fg, gv);
    fft.fwd(b.fgh, ghv);
    r.buckets.push_back(std::move(b));
    if (2 * n + 1 <= L) break;
  }
  return r;
}

struct RowResult {
  Complex a = 0.0;
  Complex b = 0.0;
  double condition = 1.0;
};

RowResult toeplitz_row(const ToeplitzRoute& r, const CorrelationTable& correlations, Index k,
                       Eigen::FFT<double>& fft) {
  RowResult res;
  if (k == 0) return res;
  const double dt = r.dt;
  const VectorXc& U = r.U;
  const FFTBucket& bk = r.bucket(k);
  const Index L = bk.L;
  const Index K = bk.K;

  // y_i = w_i u(t, s_i); x = conj(y), so its transform is the mirrored conjugate
  CVec y(L, 0.0), yhat, xhat(L), work(L), outX, outY;
  for (Index i = 0; i <= k; ++i) y[i] = trapezoid_weight(i, 0, k, dt) * U(k - i);
  fft.fwd(yhat, y);
  for (Index q = 0; q < L; ++q) xhat[q] = std::conj(yhat[(L - q) % L]) * bk.fr2[q];
  for (Index q = 0; q < L; ++q) work[q] = yhat[q] * bk.fr1[q];
  fft.inv(outX, xhat);
  fft.inv(outY, work);

  // trapezoidal increments of the sources: -X for F, +Y for H
  CVec bx(L, 0.0), by(L, 0.0), px, py;
  for (Index m = 1; m <= k; ++m) {
    bx[m] = -0.5 * dt * (outX[K + m - 1] + outX[K + m]);
    by[m] = 0.5 * dt * (outY[K + m - 1] + outY[K + m]);
  }
  fft.fwd(xhat, bx);
  for (Index q = 0; q < L; ++q) xhat[q] *= bk.fg[q];
  fft.inv(px, xhat);
  fft.fwd(work, by);
  for (Index q = 0; q < L; ++q) work[q] *= bk.fgh[q];
  fft.inv(py, work);
  px[0] = 0.0;
  py[0] = 0.0;

  const Complex uk = U(k);
  double umax = 0.0;
  for (Index i = 0; i <= k; ++i) umax = std::max(umax, std::abs(U(i)));
  res.condition = std::abs(uk) > 0.0 ? umax / std::abs(uk) : HUGE_VAL;
  if (!std::isfinite(res.condition)) {
    throw Error(ErrorCode::solver_singular,
                "homogeneous solution vanishes at t index " + std::to_string(k));
  }
  const Complex cF = (1.0 - px[k]) / uk;
  const Complex cG = px[k] / uk;
  const Complex cH = (1.0 - py[k]) / std::conj(uk);
  const Complex cI = py[k] / std::conj(uk);
  for (Index i = 0; i <= k; ++i) {
    const double w = trapezoid_weight(i, 0, k, dt);
    const Complex c1 = std::conj(correlations.alpha1()(k - i));
    const Complex a2 = correlations.alpha2()(k - i);
    const Complex F = cF * U(i) + px[i];
    const Complex G = cG * U(i) - px[i];
    const Complex H = cH * std::conj(U(i)) + py[i];
    const Complex I = cI * std::conj(U(i)) - py[i];
    res.a += w * (c1 * std::conj(F) - a2 * I);
    res.b += w * (c1 * std::conj(G) - a2 * H);
  }
  return res;
}

}  // namespace

CoefficientTable CoefficientTable::from_ab(const TimeGrid& grid, VectorXc a, VectorXc b) {
  if (a.size() != grid.size() || b.size() != grid.size()) {
    throw Error(ErrorCode::shape, "coefficient arrays do not match the grid");
  }
  CoefficientTable t{grid, std::move(a), std::move(b), {}, {}};
  t.c = -t.a.conjugate();
  t.d = -t.b.conjugate();
  return t;
}

VectorXc u_profile(const CorrelationTable& correlations, double Omega) {
  const Index n = correlations.grid().n_steps();
  const double dt = correlations.grid().dt();
  const VectorXc B0 = correlations.memory_kernel();
  const Complex coef = -kI * Omega - 0.5 * dt * B0(0);
  VectorXc U(n + 1), r(n + 1);
  U(0) = 1.0;
  r(0) = -kI * Omega;
  for (Index m = 0; m < n; ++m) {
    Complex known = 0.5 * dt * B0(m + 1) * U(0);
    for (Index mp = 1; mp <= m; ++mp) known += dt * B0(m + 1 - mp) * U(mp);
    U(m + 1) = (U(m) + 0.5 * dt * r(m) - 0.5 * dt * known) / (1.0 - 0.5 * dt * coef);
    r(m + 1) = coef * U(m + 1) - known;
  }
  return U;
}

VectorXc solve_u(const CorrelationTable& correlations, Index t_index, double Omega,
                 double* condition) {
  check_row(correlations, t_index);
  const Index k = t_index;
  const double dt = correlations.grid().dt();
  if (k == 0) {
    if (condition) *condition = 1.0;
    return VectorXc::Ones(1);
  }
  MatrixXc R = MatrixXc::Zero(k + 1, k + 1);
  for (Index j = 0; j <= k; ++j) {
    R(j, j) += kI * Omega;
    for (Index i = j; i <= k; ++i) R(j, i) -= trapezoid_weight(i, j, k, dt) * correlations.beta(j, i);
  }
  Eigen::PartialPivLU<MatrixXc> lu(interval_system(R, dt));
  const double cond = lu_condition(lu);
  if (condition) *condition = cond;
  VectorXc u = lu.solve(interval_rhs(VectorXc::Zero(k + 1), dt, 1.0));
  u(k) = 1.0;
  return u;
}

SourceRow solve_sources(const VectorXc& u_row, const CorrelationTable& correlations) {
  const Index k = u_row.size() - 1;
  check_row(correlations, k);
  const double dt = correlations.grid().dt();
  SourceRow s{VectorXc::Zero(k + 1), VectorXc::Zero(k + 1)};
  for (Index j = 0; j <= k; ++j) {
    for (Index i = 0; i <= k; ++i) {
      const double w = trapezoid_weight(i, 0, k, dt);
      s.X(j) += w * correlations.alpha2(i - j) * std::conj(u_row(i));
      s.Y(j) += w * correlations.alpha1(i - j) * u_row(i);
    }
  }
  return s;
}

FGHIRow solve_FGHI(const CorrelationTable& correlations, double Omega, Index t_index) {
  check_row(correlations, t_index);
  const Index k = t_index;
  const double dt = correlations.grid().dt();
  FGHIRow row;
  if (k == 0) {
    row.F = row.H = VectorXc::Ones(1);
    row.G = row.I = VectorXc::Zero(1);
    return row;
  }
  double cond_u = 1.0;
  const VectorXc u = solve_u(correlations, k, Omega, &cond_u);
  const SourceRow src = solve_sources(u, correlations);

  MatrixXc RF = MatrixXc::Zero(k + 1, k + 1), RH = MatrixXc::Zero(k + 1, k + 1);
  for (Index j = 0; j <= k; ++j) {
    RF(j, j) -= kI * Omega;
    RH(j, j) += kI * Omega;
    for (Index i = 0; i <= j; ++i) {
      const double w = trapezoid_weight(i, 0, j, dt);
      RF(j, i) += w * correlations.beta(i, j);
      RH(j, i) += w * correlations.beta(j, i);
    }
  }
  Eigen::PartialPivLU<MatrixXc> luF(interval_system(RF, dt)), luH(interval_system(RH, dt));
  row.condition = std::max({cond_u, lu_condition(luF), lu_condition(luH)});
  row.F = luF.solve(interval_rhs(-src.X, dt, 1.0));
  row.G = luF.solve(interval_rhs(src.X, dt, 0.0));
  row.H = luH.solve(interval_rhs(src.Y, dt, 1.0));
  row.I = luH.solve(interval_rhs(-src.Y, dt, 0.0));
  row.F(k) = row.H(k) = 1.0;
  row.G(k) = row.I(k) = 0.0;
  return row;
}

CoefficientTable master_coefficients(const CorrelationTable& correlations, double Omega,
                                     Discretization method, int workers) {
  const TimeGrid& grid = correlations.grid();
  const Index n = grid.n_steps();
  VectorXc a = VectorXc::Zero(n + 1), b = VectorXc::Zero(n + 1);
  std::vector<double> cond(n + 1, 1.0);

  if (method == Discretization::dense_collocation) {
    parallel_for(n, workers, [&](Index r) {
      const Index k = r + 1;
      const FGHIRow row = solve_FGHI(correlations, Omega, k);
      row_coefficients(correlations, k, row.F, row.G, row.H, row.I, a(k), b(k));
      cond[k] = row.condition;
    });
  } else {
    const ToeplitzRoute route = make_route(correlations, Omega);
    const Index chunks = std::max<Index>(1, std::min<Index>(n, 4 * std::max(workers, 1)));
    // FFT plans are created here, serially; executing them concurrently is safe
    std::vector<Eigen::FFT<double>> ffts(chunks);
    for (auto& fft : ffts) {
      for (const auto& b : route.buckets) {
        CVec in(b.L, 0.0), out;
        fft.fwd(out, in);
        fft.inv(in, out);
      }
    }
    parallel_for(chunks, workers, [&](Index c) {
      Eigen::FFT<double>& fft = ffts[c];
      for (Index k = 1 + c; k <= n; k += chunks) {
        const RowResult rr = toeplitz_row(route, correlations, k, fft);
        a(k) = rr.a;
        b(k) = rr.b;
        cond[k] = rr.condition;
      }
    });
  }
  CoefficientTable table = CoefficientTable::from_ab(grid, std::move(a), std::move(b));
  for (double c : cond) {
    table.max_condition = std::max(table.max_condition, c);
    if (c > kConditionWarning) ++table.ill_conditioned_rows;
  }
  return table;
}

CoefficientTable zero_temperature_coefficients(const CorrelationTable& correlations,
                                               double Omega) {
  if (!correlations.zero_temperature()) {
    throw Error(ErrorCode::model_mismatch, "zero-temperature path needs alpha_2 = 0");
  }
  const TimeGrid& grid = correlations.grid();
  const Index n = grid.n_steps();
  const double dt = grid.dt();
  const VectorXc& A1 = correlations.alpha1();

  // u' = -i Omega u - int_0^tau alpha_1(tau - tau') u(tau') dtau', u(0) = 1
  VectorXc U(n + 1);
  U(0) = 1.0;
  Complex r_prev = -kI * Omega;
  const Complex diag = -kI * Omega - 0.5 * dt * A1(0);
  for (Index m = 1; m <= n; ++m) {
    Complex hist = 0.5 * dt * A1(m) * U(0);
    for (Index j = 1; j < m; ++j) hist += dt * A1(m - j) * U(j);
    U(m) = (U(m - 1) + 0.5 * dt * (r_prev - hist)) / (1.0 - 0.5 * dt * diag);
    r_prev = diag * U(m) - hist;
  }

  VectorXc a = VectorXc::Zero(n + 1);
  double max_cond = 1.0;
  Index bad = 0;
  for (Index k = 1; k <= n; ++k) {
    if (U(k) == 0.0) throw Error(ErrorCode::solver_singular, "u vanishes");
    double umax = 0.0;
    for (Index i = 0; i <= k; ++i) {
      umax = std::max(umax, std::abs(U(i)));
      const Complex F = U(i) / U(k);
      a(k) += trapezoid_weight(i, 0, k, dt) * std::conj(A1(k - i)) * std::conj(F);
    }
    const double c = umax / std::abs(U(k));
    max_cond = std::max(max_cond, c);
    if (c > kConditionWarning) ++bad;
  }
  CoefficientTable t = CoefficientTable::from_ab(grid, std::move(a), VectorXc::Zero(n + 1));
  t.max_condition = max_cond;
  t.ill_conditioned_rows = bad;
  return t;
}

namespace {

/// One of the two s-route operators: f1/j1 (sgn = +1) or f2/j2 (sgn = -1).
struct SRouteOperator {
  Index k = 0;
  double dt = 0.0;
  double Omega = 0.0;
  double sgn = 1.0;
  VectorXc Aa, Ab;   // memory kernels left / right of s
  VectorXc Ta, Tb;   // lag trapezoids
  Eigen::PartialPivLU<MatrixXc> lu;
  double condition = 1.0;

  SRouteOperator(const CorrelationTable& correlations, double Om, Index t_index, bool second)
      : k(t_index), dt(correlations.grid().dt()), Omega(Om), sgn(second ? -1.0 : 1.0) {
    Aa = (second ? correlations.alpha2() : correlations.alpha1()).head(k + 1);
    Ab = (second ? correlations.alpha1() : correlations.alpha2()).head(k + 1);
    Ta = lag_trapezoid(Aa, dt);
    Tb = lag_trapezoid(Ab, dt);
    MatrixXc R = MatrixXc::Zero(k + 1, k + 1);
    for (Index j = 0; j <= k; ++j) {
      R(j, j) -= kI * sgn * Omega;
      for (Index i = 0; i <= j; ++i) R(j, i) -= sgn * trapezoid_weight(i, 0, j, dt) * Aa(j - i);
      for (Index i = j; i <= k; ++i) R(j, i) -= sgn * trapezoid_weight(i, j, k, dt) * Ab(i - j);
    }
    lu.compute(interval_system(R, dt));
    condition = lu_condition(lu);
  }

  /// Memory part of the operator applied to the unit step at s'_m.
  Complex step_memory(Index j, Index m) const {
    Complex left = j > m ? Ta(j - m) : Complex(0.0);
    Complex right = j >= m ? Tb(k - j) : Tb(k - j) - Tb(m - j);
    return -sgn * (left + right);
  }

  /// Right-hand side for the smooth part y of j = y + sigma theta_m.
  VectorXc step_rhs(Index m, double sigma) const {
    VectorXc rhs = VectorXc::Zero(k + 1);
    rhs(k) = -sigma;
    if (m == k) return rhs;
    Complex mem_next = step_memory(0, m);
    for (Index j = 0; j < k; ++j) {
      const Complex mem = mem_next;
      mem_next = step_memory(j + 1, m);
      const double th = (j + 1 <= m) ? 0.0 : 1.0;
      rhs(j) = sigma * 0.5 * dt * (2.0 * (-kI * sgn * Omega * th) + mem + mem_next);
    }
    return rhs;
  }

  /// Quadrature representative of theta_m at node i.
  static double step_node(Index i, Index m, Index k) {
    if (m == k || i < m) return 0.0;
    if (i > m) return 1.0;
    return m == 0 ? 1.0 : 0.5;
  }
};

}  // namespace

FJSlice solve_fj_s_route(const CorrelationTable& correlations, double Omega, Index t_index) {
  check_row(correlations, t_index);
  const Index k = t_index;
  FJSlice out;
  out.t_index = k;
  if (k == 0) {
    out.f1 = out.f2 = VectorXc::Ones(1);
    out.j1 = MatrixXc::Constant(1, 1, -1.0);
    out.j2 = MatrixXc::Constant(1, 1, 1.0);
    return out;
  }
  for (int op = 0; op < 2; ++op) {
    const SRouteOperator S(correlations, Omega, k, op == 1);
    const double sigma = op == 0 ? 1.0 : -1.0;
    VectorXc e = VectorXc::Zero(k + 1);
    e(k) = 1.0;
    VectorXc f = S.lu.solve(e);
    f(k) = 1.0;
    MatrixXc rhs(k + 1, k + 1);
    for (Index m = 0; m <= k; ++m) rhs.col(m) = S.step_rhs(m, sigma);
    MatrixXc J = S.lu.solve(rhs);
    for (Index m = 0; m <= k; ++m) {
      for (Index i = 0; i <= k; ++i) J(i, m) += sigma * SRouteOperator::step_node(i, m, k);
      if (m < k) J(k, m) = 0.0;
    }
    J(k, k) = -sigma;
    out.condition = std::max(out.condition, S.condition);
    (op == 0 ? out.f1 : out.f2) = std::move(f);
    (op == 0 ? out.j1 : out.j2) = std::move(J);
  }
  return out;
}

FJTables solve_fj_t_route(const CorrelationTable& correlations, double Omega) {
  const Index n = correlations.grid().n_steps();
  const double dt = correlations.grid().dt();
  const VectorXc& A1 = correlations.alpha1();
  const VectorXc& A2 = correlations.alpha2();

  struct State {
    VectorXc F1, F2;
    MatrixXc J1, J2;
  };
  // j is stored with its left limit on s = s'; the quadrature adds the
  // jump fraction (full at s' = 0, half in the interior).
  auto rhs = [&](Index k, const State& x) {
    State d;
    VectorXc v1(k + 1), v2(k + 1);
    for (Index i = 0; i <= k; ++i) {
      const double w = trapezoid_weight(i, 0, k, dt);
      v1(i) = w * A1(k - i);
      v2(i) = w * A2(k - i);
    }
    const Complex S = (v1.transpose() * x.F1)(0) + (v2.transpose() * x.F2)(0);
    Eigen::Matrix<Complex, 1, Eigen::Dynamic> J1v = v1.transpose() * x.J1;
    Eigen::Matrix<Complex, 1, Eigen::Dynamic> J2v = v2.transpose() * x.J2;
    for (Index s = 0; s < k; ++s) {
      const double frac = s == 0 ? 1.0 : 0.5;
      J1v(s) += frac * v1(s);
      J2v(s) -= frac * v2(s);
    }
    d.F1 = kI * Omega * x.F1 + S * x.F1 - J2v.transpose();
    d.F2 = -kI * Omega * x.F2 - S * x.F2 - J1v.transpose();
    d.J1 = x.F1 * J1v;
    d.J2 = -x.F2 * J2v;
    return d;
  };
  auto extend = [](const State& x) {
    const Index m = x.F1.size();
    State y;
    y.F1.resize(m + 1);
    y.F2.resize(m + 1);
    y.F1 << x.F1, 1.0;
    y.F2 << x.F2, 1.0;
    y.J1 = MatrixXc::Zero(m + 1, m + 1);
    y.J2 = MatrixXc::Zero(m + 1, m + 1);
    y.J1.topLeftCorner(m, m) = x.J1;
    y.J2.topLeftCorner(m, m) = x.J2;
    y.J1.col(m) = -y.F1;
    y.J2.col(m) = y.F2;
    return y;
  };
  auto check = [](const VectorXc& before, const VectorXc& after, Index k) {
    const double scale = std::max(1.0, before.cwiseAbs().maxCoeff());
    const double change = (after - before).cwiseAbs().maxCoeff();
    if (!std::isfinite(change) || change > 0.5 * scale) {
      throw Error(ErrorCode::nonlinear_blowup,
                  "t-route step " + std::to_string(k) + " changed f by more than 50%");
    }
  };

  FJTables out;
  State x{VectorXc::Ones(1), VectorXc::Ones(1), MatrixXc::Constant(1, 1, -1.0),
          MatrixXc::Constant(1, 1, 1.0)};
  out.f1.push_back(x.F1);
  out.f2.push_back(x.F2);
  for (Index k = 0; k < n; ++k) {
    const State d = rhs(k, x);
    State p{x.F1 + dt * d.F1, x.F2 + dt * d.F2, x.J1 + dt * d.J1, x.J2 + dt * d.J2};
    const State pe = extend(p);
    const State d2 = rhs(k + 1, pe);
    const Index m = k + 1;
    State nx{x.F1 + 0.5 * dt * (d.F1 + d2.F1.head(m)), x.F2 + 0.5 * dt * (d.F2 + d2.F2.head(m)),
             x.J1 + 0.5 * dt * (d.J1 + d2.J1.topLeftCorner(m, m)),
             x.J2 + 0.5 * dt * (d.J2 + d2.J2.topLeftCorner(m, m))};
    check(x.F1, nx.F1, k);
    check(x.F2, nx.F2, k);
    x = extend(nx);
    out.f1.push_back(x.F1);
    out.f2.push_back(x.F2);
  }
  out.j1 = std::move(x.J1);
  out.j2 = std::move(x.J2);
  return out;
}

TrajectoryKernels trajectory_kernels(const CorrelationTable& correlations, double Omega,
                                     int workers) {
  const TimeGrid& grid = correlations.grid();
  const Index n = grid.n_steps();
  if (n > kMaxTrajectorySteps) {
    throw Error(ErrorCode::invalid_grid, "trajectory grids are limited to " +
                                             std::to_string(kMaxTrajectorySteps) + " steps");
  }
  const double dt = grid.dt();
  TrajectoryKernels tk{grid, Omega, VectorXc::Zero(n + 1), VectorXc::Zero(n + 1),
                       MatrixXc::Zero(n + 1, n + 1), MatrixXc::Zero(n + 1, n + 1)};
  std::vector<double> cond(n + 1, 1.0);
  parallel_for(n, workers, [&](Index r) {
    const Index k = r + 1;
    for (int op = 0; op < 2; ++op) {
      const SRouteOperator S(correlations, Omega, k, op == 1);
      const double sigma = op == 0 ? 1.0 : -1.0;
      VectorXc v(k + 1);
      for (Index i = 0; i <= k; ++i) v(i) = trapezoid_weight(i, 0, k, dt) * S.Aa(k - i);
      // v^T M^{-1} = lambda^T, so the s-integrals need one adjoint solve
      const VectorXc lambda = S.lu.transpose().solve(v);
      (op == 0 ? tk.s1 : tk.s2)(k) = lambda(k);
      Complex tail = 0.0;  // sum_{i > m} v_i
      for (Index m = k; m >= 0; --m) {
        const VectorXc rhs = S.step_rhs(m, sigma);
        Complex val = (lambda.transpose() * rhs)(0);
        if (m < k) val += sigma * (tail + (m == 0 ? 1.0 : 0.5) * v(m));
        (op == 0 ? tk.K1 : tk.K2)(k, m) = val;
        tail += v(m);
      }
      cond[k] = std::max(cond[k], S.condition);
    }
  });
  for (double c : cond) tk.max_condition = std::max(tk.max_condition, c);
  return tk;
}

DephasingCoefficients dephasing_coefficients(const CorrelationTable& correlations, double kappa) {
  const TimeGrid& grid = correlations.grid();
  const Index n = grid.n_steps();
  const double dt = grid.dt();
  const VectorXc alpha = correlations.total();
  VectorXc weighted(n + 1);
  for (Index d = 0; d <= n; ++d) weighted(d) = alpha(d) * grid.time(d);
  DephasingCoefficients out{grid, lag_trapezoid(alpha, dt), kappa * lag_trapezoid(weighted, dt),
                            kappa};
  return out;
}

void write_coefficients_csv(const CoefficientTable& coeffs, std::ostream& out) {
  out << kCoefficientHeader << '\n';
  for (Index k = 0; k < coeffs.grid.size(); ++k) {
    write_row(out, {coeffs.grid.time(k), coeffs.a(k).real(), coeffs.a(k).imag(),
                    coeffs.b(k).real(), coeffs.b(k).imag(), coeffs.c(k).real(), coeffs.c(k).imag(),
                    coeffs.d(k).real(), coeffs.d(k).imag()});
  }
}

}  // namespace nmqsd
