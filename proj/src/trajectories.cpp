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

#include "nmqsd/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmqsd/error.hpp"
#include "nmqsd/parallel.hpp"

namespace nmqsd {

namespace {

void check_staging(const TrajectoryKernels& kernels, const NoisePath& noise) {
  const Index n = kernels.grid.size();
  if (kernels.s1.size() != n || kernels.s2.size() != n || kernels.K1.rows() != n ||
      kernels.K2.rows() != n) {
    throw Error(ErrorCode::staging, "trajectory kernels are incomplete for the grid");
  }
  if (!(noise.grid == kernels.grid) || noise.z_star.size() != n || noise.w_star.size() != n) {
    throw Error(ErrorCode::shape, "noise path grid differs from the kernel grid");
  }
}

Complex lerp(const VectorXc& v, Index k, double h) {
  return h == 0.0 ? v(k) : (1.0 - h) * v(k) + h * v(k + 1);
}

double top_weight(const StateVector& psi) {
  const Index d = psi.size();
  const double norm2 = psi.squaredNorm();
  if (norm2 == 0.0) return 0.0;
  double top = 0.0;
  for (Index i = std::max<Index>(0, d - 2); i < d; ++i) top += std::norm(psi(i));
  return top / norm2;
}

EnsembleResult finish(const TimeGrid& grid, std::vector<DensityMatrix> rho, const VectorXr& s1,
                      const VectorXr& s2, Index M, Index leaking) {
  const double m = static_cast<double>(M);
  for (auto& r : rho) r /= m;
  const VectorXr mean = s1 / m;
  const VectorXr var = (s2 / m - mean.cwiseAbs2()).cwiseMax(0.0);
  DensitySeries series = make_series(grid, std::move(rho));
  const double drift = series.max_trace_defect();
  return EnsembleResult{std::move(series), M, mean, var, drift, leaking};
}

}  // namespace

NoiseFunctionals noise_functionals(const TrajectoryKernels& kernels, const NoisePath& noise) {
  check_staging(kernels, noise);
  const Index n = kernels.grid.n_steps();
  const double dt = kernels.grid.dt();
  NoiseFunctionals nf{VectorXc::Zero(n + 1), VectorXc::Zero(n + 1)};
  for (Index k = 1; k <= n; ++k) {
    Complex a = 0.0, b = 0.0;
    for (Index m = 0; m <= k; ++m) {
      const double w = trapezoid_weight(m, 0, k, dt);
      a += w * kernels.K1(k, m) * noise.w_star(m);
      b += w * kernels.K2(k, m) * noise.z_star(m);
    }
    nf.n1(k) = a;
    nf.n2(k) = b;
  }
  return nf;
}

OperatorAssembly assemble_O(const TrajectoryKernels& kernels, Index k, const NoisePath& noise,
                            const FockSpace& fock) {
  check_staging(kernels, noise);
  if (k < 0 || k > kernels.grid.n_steps()) {
    throw Error(ErrorCode::staging, "no kernel slice for t index " + std::to_string(k));
  }
  const double dt = kernels.grid.dt();
  OperatorAssembly op;
  op.k = k;
  op.s1 = kernels.s1(k);
  op.s2 = kernels.s2(k);
  op.n1 = op.n2 = 0.0;
  for (Index m = 0; m <= k; ++m) {
    const double w = trapezoid_weight(m, 0, k, dt);
    op.n1 += w * kernels.K1(k, m) * noise.w_star(m);
    op.n2 += w * kernels.K2(k, m) * noise.z_star(m);
  }
  const MatrixXc id = MatrixXc::Identity(fock.dim, fock.dim);
  op.Obar1 = op.s1 * fock.annihilator + op.n1 * id;
  op.Obar2 = op.s2 * fock.creator + op.n2 * id;
  return op;
}

Trajectory propagate_trajectory(const StateVector& psi0, const NoisePath& noise,
                                const TrajectoryKernels& kernels, const FockSpace& fock) {
  check_staging(kernels, noise);
  if (psi0.size() != fock.dim) throw Error(ErrorCode::shape, "initial state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    throw Error(ErrorCode::invalid_state, "initial state must be normalized");
  }
  const Index n = kernels.grid.n_steps();
  const double dt = kernels.grid.dt();
  const double Omega = kernels.Omega;
  const NoiseFunctionals nf = noise_functionals(kernels, noise);
  const MatrixXc& A = fock.annihilator;
  const MatrixXc& Ad = fock.creator;
  const MatrixXc& N = fock.number_op;
  const MatrixXc AAd = A * Ad;
  VectorXr levels(fock.dim);
  for (Index m = 0; m < fock.dim; ++m) levels(m) = static_cast<double>(m);

  // Interaction picture phi = exp(i Omega N t) psi removes the free rotation,
  // which is then applied exactly; a and a^+ pick up exp(-+i Omega t).
  // d psi/dt = -i Omega N psi + z* a psi - a^+ Obar1 psi + w* a^+ psi - a Obar2 psi
  auto apply = [&](Index k, double h, const StateVector& phi) {
    const Complex z = lerp(noise.z_star, k, h);
    const Complex w = lerp(noise.w_star, k, h);
    const Complex s1 = lerp(kernels.s1, k, h);
    const Complex s2 = lerp(kernels.s2, k, h);
    const Complex n1 = lerp(nf.n1, k, h);
    const Complex n2 = lerp(nf.n2, k, h);
    const Complex rot = std::exp(-kI * Omega * (static_cast<double>(k) + h) * dt);
    StateVector out = -s1 * (N * phi);
    out.noalias() += ((z - n2) * rot) * (A * phi);
    out.noalias() += ((w - n1) * std::conj(rot)) * (Ad * phi);
    out.noalias() -= s2 * (AAd * phi);
    return out;
  };
  auto lab = [&](Index k, const StateVector& phi) {
    const VectorXc phase = (-kI * Omega * kernels.grid.time(k) * levels).array().exp();
    return StateVector(phase.cwiseProduct(phi));
  };

  Trajectory tr;
  tr.states.reserve(static_cast<std::size_t>(n + 1));
  tr.states.push_back(psi0);
  tr.max_top_population = top_weight(psi0);
  StateVector phi = psi0;
  for (Index k = 0; k < n; ++k) {
    const StateVector half = phi + 0.5 * dt * apply(k, 0.0, phi);
    phi += dt * apply(k, 0.5, half);
    if (!phi.allFinite()) {
      throw Error(ErrorCode::propagation_diverged,
                  "trajectory diverged at step " + std::to_string(k + 1));
    }
    tr.max_top_population = std::max(tr.max_top_population, top_weight(phi));
    tr.states.push_back(lab(k + 1, phi));
  }
  return tr;
}

EnsembleResult ensemble_average(const std::vector<Trajectory>& trajectories,
                                const TimeGrid& grid) {
  if (trajectories.empty()) throw Error(ErrorCode::insufficient_sample, "empty ensemble");
  const Index n = grid.size();
  const Index dim = trajectories.front().states.front().size();
  std::vector<DensityMatrix> rho(static_cast<std::size_t>(n), MatrixXc::Zero(dim, dim));
  VectorXr s1 = VectorXr::Zero(n), s2 = VectorXr::Zero(n);
  Index leaking = 0;
  for (const auto& tr : trajectories) {
    if (static_cast<Index>(tr.states.size()) != n) {
      throw Error(ErrorCode::shape, "trajectory length differs from the grid");
    }
    for (Index k = 0; k < n; ++k) {
      const StateVector& psi = tr.states[static_cast<std::size_t>(k)];
      if (psi.size() != dim) throw Error(ErrorCode::shape, "trajectory dimension mismatch");
      rho[static_cast<std::size_t>(k)].noalias() += psi * psi.adjoint();
      const double nn = psi.squaredNorm();
      s1(k) += nn;
      s2(k) += nn * nn;
    }
    if (tr.leakage()) ++leaking;
  }
  return finish(grid, std::move(rho), s1, s2, static_cast<Index>(trajectories.size()), leaking);
}

namespace {

template <typename Propagate>
EnsembleRun ensemble_blocks(const TimeGrid& grid, Index dim, const NoiseSampler& sampler,
                            const EnsembleOptions& options, Propagate&& propagate) {
  const Index n = grid.size();
  const Index M = options.trajectories;
  const Index block = std::max<Index>(1, options.block);
  const Index blocks = (M + block - 1) / block;

  struct Partial {
    std::vector<DensityMatrix> rho;
    VectorXr s1, s2;
    Index leaking = 0;
  };
  std::vector<Partial> partial(static_cast<std::size_t>(blocks));
  std::vector<StateVector> final_states;
  std::vector<NoisePath> noises;
  if (options.keep_final) {
    final_states.resize(static_cast<std::size_t>(M));
    noises.resize(static_cast<std::size_t>(M), NoisePath{grid, {}, {}, 0, 0});
  }

  parallel_for(blocks, options.workers, [&](Index b) {
    Partial p{std::vector<DensityMatrix>(static_cast<std::size_t>(n), MatrixXc::Zero(dim, dim)),
              VectorXr::Zero(n), VectorXr::Zero(n), 0};
    const Index lo = b * block;
    const Index hi = std::min(M, lo + block);
    for (Index t = lo; t < hi; ++t) {
      const std::uint64_t stream = options.first_stream + static_cast<std::uint64_t>(t);
      NoisePath noise = sampler.sample(options.seed, stream);
      Trajectory tr = propagate(noise);
      for (Index k = 0; k < n; ++k) {
        const StateVector& psi = tr.states[static_cast<std::size_t>(k)];
        p.rho[static_cast<std::size_t>(k)].noalias() += psi * psi.adjoint();
        const double nn = psi.squaredNorm();
        p.s1(k) += nn;
        p.s2(k) += nn * nn;
      }
      if (tr.leakage()) ++p.leaking;
      if (options.keep_final) {
        final_states[static_cast<std::size_t>(t)] = tr.states.back();
        noises[static_cast<std::size_t>(t)] = std::move(noise);
      }
    }
    partial[static_cast<std::size_t>(b)] = std::move(p);
  });

  std::vector<DensityMatrix> rho(static_cast<std::size_t>(n), MatrixXc::Zero(dim, dim));
  VectorXr s1 = VectorXr::Zero(n), s2 = VectorXr::Zero(n);
  Index leaking = 0;
  for (const auto& p : partial) {
    for (Index k = 0; k < n; ++k) rho[static_cast<std::size_t>(k)] += p.rho[static_cast<std::size_t>(k)];
    s1 += p.s1;
    s2 += p.s2;
    leaking += p.leaking;
  }
  return EnsembleRun{finish(grid, std::move(rho), s1, s2, M, leaking), std::move(final_states),
                     std::move(noises)};
}

void check_dephasing(const DephasingSystem& sys) {
  const MatrixXc& H = sys.H;
  const MatrixXc& L = sys.L;
  if (H.rows() != H.cols() || L.rows() != H.rows() || L.cols() != H.cols()) {
    throw Error(ErrorCode::shape, "H and L must be square and of equal dimension");
  }
  if (hermiticity_defect(L) > 1e-12 * (1.0 + L.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::model_mismatch, "dephasing operator L must be Hermitian");
  }
  const double scale = 1.0 + H.cwiseAbs().maxCoeff() * L.cwiseAbs().maxCoeff();
  const MatrixXc comm = commutator(H, L) - kI * sys.kappa * MatrixXc::Identity(H.rows(), H.cols());
  if (comm.cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::model_mismatch, "[H, L] is not i kappa times the identity");
  }
}

}  // namespace

EnsembleRun run_ensemble(const StateVector& psi0, const CorrelationTable& correlations,
                         const TrajectoryKernels& kernels, const FockSpace& fock,
                         const EnsembleOptions& options) {
  if (options.trajectories < 1) throw Error(ErrorCode::insufficient_sample, "no trajectories");
  if (!(correlations.grid() == kernels.grid)) {
    throw Error(ErrorCode::shape, "correlation and kernel grids differ");
  }
  const NoiseSampler sampler(correlations, options.method, options.bath);
  return ensemble_blocks(kernels.grid, fock.dim, sampler, options, [&](const NoisePath& noise) {
    return propagate_trajectory(psi0, noise, kernels, fock);
  });
}

Trajectory propagate_dephasing_trajectory(const StateVector& psi0, const NoisePath& noise,
                                          const CorrelationTable& correlations,
                                          const DephasingSystem& sys) {
  check_dephasing(sys);
  const TimeGrid& grid = correlations.grid();
  const Index n = grid.n_steps();
  if (psi0.size() != sys.H.rows()) throw Error(ErrorCode::shape, "initial state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    throw Error(ErrorCode::invalid_state, "initial state must be normalized");
  }
  if (!(noise.grid == grid) || noise.z_star.size() != grid.size()) {
    throw Error(ErrorCode::shape, "noise path grid differs from the correlation grid");
  }
  const double dt = grid.dt();
  // Obar_i(t) = F_i(t) L - kappa G_i(t)
  VectorXc F1 = VectorXc::Zero(n + 1), F2 = VectorXc::Zero(n + 1);
  VectorXc G1 = VectorXc::Zero(n + 1), G2 = VectorXc::Zero(n + 1);
  for (Index k = 1; k <= n; ++k) {
    for (Index m = 0; m <= k; ++m) {
      const double w = trapezoid_weight(m, 0, k, dt);
      const double tau = grid.time(k - m);
      F1(k) += w * correlations.alpha1(k - m);
      F2(k) += w * correlations.alpha2(k - m);
      G1(k) += w * tau * correlations.alpha1(k - m);
      G2(k) += w * tau * correlations.alpha2(k - m);
    }
  }
  const MatrixXc& H = sys.H;
  const MatrixXc& L = sys.L;
  const MatrixXc L2 = L * L;
  auto apply = [&](Index k, double h, const StateVector& psi) {
    const Complex noise_sum = lerp(noise.z_star, k, h) + lerp(noise.w_star, k, h);
    const Complex f = lerp(F1, k, h) + lerp(F2, k, h);
    const Complex g = sys.kappa * (lerp(G1, k, h) + lerp(G2, k, h));
    StateVector out = -kI * (H * psi);
    out.noalias() += (noise_sum + g) * (L * psi);
    out.noalias() -= f * (L2 * psi);
    return out;
  };
  Trajectory tr;
  tr.states.reserve(static_cast<std::size_t>(n + 1));
  tr.states.push_back(psi0);
  StateVector psi = psi0;
  for (Index k = 0; k < n; ++k) {
    const StateVector half = psi + 0.5 * dt * apply(k, 0.0, psi);
    psi += dt * apply(k, 0.5, half);
    if (!psi.allFinite()) {
      throw Error(ErrorCode::propagation_diverged,
                  "trajectory diverged at step " + std::to_string(k + 1));
    }
    tr.states.push_back(psi);
  }
  return tr;
}

EnsembleRun run_dephasing_ensemble(const StateVector& psi0, const CorrelationTable& correlations,
                                   const DephasingSystem& sys, const EnsembleOptions& options) {
  if (options.trajectories < 1) throw Error(ErrorCode::insufficient_sample, "no trajectories");
  check_dephasing(sys);
  const NoiseSampler sampler(correlations, options.method, options.bath);
  return ensemble_blocks(correlations.grid(), sys.H.rows(), sampler, options,
                         [&](const NoisePath& noise) {
                           return propagate_dephasing_trajectory(psi0, noise, correlations, sys);
                         });
}

NovikovReport novikov_check(const std::vector<StateVector>& final_states,
                            const std::vector<NoisePath>& noises, const FJSlice& slice,
                            const CorrelationTable& correlations, const FockSpace& fock,
                            Index s_points) {
  if (final_states.size() < 1000 || noises.size() != final_states.size()) {
    throw Error(ErrorCode::insufficient_sample,
                "Novikov check needs at least 1000 trajectories with their noise paths");
  }
  const Index k = slice.t_index;
  const double dt = correlations.grid().dt();
  const Index dim = fock.dim;
  NovikovReport rep;
  rep.samples = static_cast<Index>(final_states.size());
  s_points = std::max<Index>(1, std::min(s_points, k + 1));
  for (Index q = 0; q < s_points; ++q) {
    rep.s_indices.push_back(s_points == 1 ? k : (q * k) / (s_points - 1));
  }
  const Index ns = static_cast<Index>(rep.s_indices.size());

  // c_f(s) = int conj(alpha_2(s - s')) conj(f_2(s')) ds'
  VectorXc cf = VectorXc::Zero(ns);
  MatrixXc kern(ns, k + 1);  // w_{s'} conj(alpha_2(s - s'))
  for (Index q = 0; q < ns; ++q) {
    for (Index sp = 0; sp <= k; ++sp) {
      kern(q, sp) = trapezoid_weight(sp, 0, k, dt) *
                    std::conj(correlations.alpha2(rep.s_indices[q] - sp));
      cf(q) += kern(q, sp) * std::conj(slice.f2(sp));
    }
  }
  VectorXc wts(k + 1);
  for (Index i = 0; i <= k; ++i) wts(i) = trapezoid_weight(i, 0, k, dt);

  std::vector<MatrixXc> sum_q(ns, MatrixXc::Zero(dim, dim)), sum_q2(ns, MatrixXc::Zero(dim, dim));
  std::vector<MatrixXc> sum_l(ns, MatrixXc::Zero(dim, dim)), sum_r(ns, MatrixXc::Zero(dim, dim));
  for (std::size_t m = 0; m < final_states.size(); ++m) {
    const StateVector& psi = final_states[m];
    const NoisePath& noise = noises[m];
    if (psi.size() != dim || noise.z_star.size() < k + 1) {
      throw Error(ErrorCode::shape, "trajectory sample does not match the slice");
    }
    const MatrixXc P = psi * psi.adjoint();
    const MatrixXc Pa = P * fock.annihilator;
    // zeta(s') = int j_2(t, s', s'') z*(s'') ds''
    const VectorXc zeta = slice.j2 * wts.cwiseProduct(noise.z_star.head(k + 1));
    const VectorXc czeta = kern * zeta.conjugate();
    for (Index q = 0; q < ns; ++q) {
      const MatrixXc lhs = noise.w_star(rep.s_indices[q]) * P;
      const MatrixXc rhs = cf(q) * Pa + czeta(q) * P;
      const MatrixXc Q = lhs - rhs;
      sum_l[q] += lhs;
      sum_r[q] += rhs;
      sum_q[q] += Q;
      sum_q2[q] += Q.cwiseAbs2().cast<Complex>();
    }
  }
  const double M = static_cast<double>(final_states.size());
  for (Index q = 0; q < ns; ++q) {
    rep.max_lhs = std::max(rep.max_lhs, (sum_l[q] / M).cwiseAbs().maxCoeff());
    rep.max_rhs = std::max(rep.max_rhs, (sum_r[q] / M).cwiseAbs().maxCoeff());
    for (Index i = 0; i < dim; ++i) {
      for (Index j = 0; j < dim; ++j) {
        const Complex mean = sum_q[q](i, j) / M;
        const double var = std::max(0.0, sum_q2[q](i, j).real() / M - std::norm(mean));
        const double se = std::sqrt(var / M);
        rep.max_deviation = std::max(rep.max_deviation, std::abs(mean));
        if (se > 0.0) {
          rep.max_ratio = std::max(rep.max_ratio, std::abs(mean) / (5.0 * se));
        } else if (std::abs(mean) > 0.0) {
          rep.max_ratio = HUGE_VAL;
        }
      }
    }
  }
  rep.passed = rep.max_ratio <= 1.0;
  return rep;
}

}  // namespace nmqsd
