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


#include "nmqsd/oracle.hpp"

#include <cmath>
#include <string>

#include "nmqsd/error.hpp"

namespace nmqsd {

namespace {

double boltzmann_q(double omega, double temperature) {
  return temperature > 0.0 ? std::exp(-omega / temperature) : 0.0;
}

/// Excitation-number blocks of H_tot with their spectra.
struct Sector {
  std::vector<Index> states;  // global basis indices
  MatrixXc H;
  VectorXr E;
  MatrixXc V;
};

struct Spectrum {
  Index dim = 0;
  std::vector<Sector> sectors;
  std::vector<Index> sector_of;    // global index -> sector
  std::vector<Index> position_of;  // global index -> row within the sector
};

/// Digits (n_s, n_1, ..., n_L) of a global index.
std::vector<Index> digits(Index idx, const OracleConfig& c) {
  std::vector<Index> d;
  d.reserve(c.modes.size() + 1);
  d.push_back(idx % c.system_dim);
  idx /= c.system_dim;
  for (const auto& m : c.modes) {
    d.push_back(idx % m.mode_dim);
    idx /= m.mode_dim;
  }
  return d;
}

Index compose(const std::vector<Index>& d, const OracleConfig& c) {
  Index idx = 0;
  for (std::size_t l = c.modes.size(); l-- > 0;) idx = idx * c.modes[l].mode_dim + d[l + 1];
  return idx * c.system_dim + d[0];
}

Spectrum build_spectrum(const OracleConfig& c) {
  Spectrum sp;
  sp.dim = total_dimension(c);
  sp.sector_of.resize(static_cast<std::size_t>(sp.dim));
  sp.position_of.resize(static_cast<std::size_t>(sp.dim));
  Index max_n = c.system_dim - 1;
  for (const auto& m : c.modes) max_n += m.mode_dim - 1;
  sp.sectors.resize(static_cast<std::size_t>(max_n + 1));
  for (Index i = 0; i < sp.dim; ++i) {
    Index n = 0;
    for (Index x : digits(i, c)) n += x;
    auto& sec = sp.sectors[static_cast<std::size_t>(n)];
    sp.sector_of[static_cast<std::size_t>(i)] = n;
    sp.position_of[static_cast<std::size_t>(i)] = static_cast<Index>(sec.states.size());
    sec.states.push_back(i);
  }
  for (auto& sec : sp.sectors) {
    const Index bs = static_cast<Index>(sec.states.size());
    sec.H = MatrixXc::Zero(bs, bs);
    for (Index r = 0; r < bs; ++r) {
      const auto d = digits(sec.states[static_cast<std::size_t>(r)], c);
      double diag = c.Omega * static_cast<double>(d[0]);
      for (std::size_t l = 0; l < c.modes.size(); ++l) {
        diag += c.modes[l].omega * static_cast<double>(d[l + 1]);
      }
      sec.H(r, r) = diag;
      // g* a^+ b_l and its conjugate
      if (d[0] + 1 >= c.system_dim) continue;
      for (std::size_t l = 0; l < c.modes.size(); ++l) {
        if (d[l + 1] == 0) continue;
        auto e = d;
        ++e[0];
        --e[l + 1];
        const Index q = sp.position_of[static_cast<std::size_t>(compose(e, c))];
        const Complex amp = std::conj(c.modes[l].g) *
                            std::sqrt(static_cast<double>(d[0] + 1) * static_cast<double>(d[l + 1]));
        sec.H(q, r) += amp;
        sec.H(r, q) += std::conj(amp);
      }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(sec.H);
    sec.E = es.eigenvalues();
    sec.V = es.eigenvectors();
  }
  return sp;
}

void check_system_state(const DensityMatrix& rho, Index dim) {
  if (rho.rows() != dim || rho.cols() != dim) {
    throw Error(ErrorCode::shape, "system state does not match system_dim");
  }
  if (hermiticity_defect(rho) > 1e-12 || std::abs(rho.trace() - 1.0) > 1e-10) {
    throw Error(ErrorCode::invalid_state, "system state must be Hermitian with unit trace");
  }
}

}  // namespace

double thermal_leakage(double omega, double temperature, Index mode_dim) {
  return std::pow(boltzmann_q(omega, temperature), static_cast<double>(mode_dim));
}

Index suggested_mode_dim(double omega, double temperature) {
  const double q = boltzmann_q(omega, temperature);
  if (q == 0.0) return 1;
  return std::max<Index>(1, static_cast<Index>(std::ceil(std::log(kMaxThermalLeakage) / std::log(q))));
}

Index bath_dimension(const OracleConfig& config) {
  Index b = 1;
  for (const auto& m : config.modes) b *= m.mode_dim;
  return b;
}

Index total_dimension(const OracleConfig& config) {
  return config.system_dim * bath_dimension(config);
}

void validate_oracle(const OracleConfig& config) {
  if (config.system_dim < 2) throw Error(ErrorCode::config, "oracle system_dim must be >= 2");
  if (config.modes.empty()) throw Error(ErrorCode::config, "oracle needs at least one bath mode");
  if (config.temperature < 0.0) throw Error(ErrorCode::config, "negative temperature");
  double dim = static_cast<double>(config.system_dim);
  for (std::size_t l = 0; l < config.modes.size(); ++l) {
    const auto& m = config.modes[l];
    if (!(m.omega > 0.0)) {
      throw Error(ErrorCode::config, "mode " + std::to_string(l) + " needs omega > 0");
    }
    if (m.mode_dim < 1) {
      throw Error(ErrorCode::config, "mode " + std::to_string(l) + " needs mode_dim >= 1");
    }
    dim *= static_cast<double>(m.mode_dim);
  }
  if (dim > static_cast<double>(kMaxOracleDimension)) {
    throw Error(ErrorCode::config, "oracle Hilbert dimension " + std::to_string(static_cast<long long>(dim)) +
                                       " exceeds " + std::to_string(kMaxOracleDimension));
  }
  for (std::size_t l = 0; l < config.modes.size(); ++l) {
    const auto& m = config.modes[l];
    const double leak = thermal_leakage(m.omega, config.temperature, m.mode_dim);
    if (leak > kMaxThermalLeakage) {
      throw Error(ErrorCode::truncation,
                  "mode " + std::to_string(l) + " thermal leakage " + std::to_string(leak) +
                      " too large; use mode_dim >= " +
                      std::to_string(suggested_mode_dim(m.omega, config.temperature)));
    }
  }
}

DiscreteModes oracle_bath(const OracleConfig& config) {
  DiscreteModes b;
  b.temperature = config.temperature;
  for (const auto& m : config.modes) b.modes.push_back({m.g, m.omega});
  return b;
}

MatrixXc total_hamiltonian(const OracleConfig& config) {
  validate_oracle(config);
  const Spectrum sp = build_spectrum(config);
  MatrixXc H = MatrixXc::Zero(sp.dim, sp.dim);
  for (const auto& sec : sp.sectors) {
    const Index bs = static_cast<Index>(sec.states.size());
    for (Index r = 0; r < bs; ++r) {
      for (Index q = 0; q < bs; ++q) {
        H(sec.states[static_cast<std::size_t>(r)], sec.states[static_cast<std::size_t>(q)]) =
            sec.H(r, q);
      }
    }
  }
  return H;
}

DensityMatrix thermal_bath_state(const OracleConfig& config) {
  validate_oracle(config);
  const Index B = bath_dimension(config);
  VectorXr p = VectorXr::Ones(B);
  Index stride = 1;
  for (const auto& m : config.modes) {
    const double q = boltzmann_q(m.omega, config.temperature);
    VectorXr w(m.mode_dim);
    for (Index n = 0; n < m.mode_dim; ++n) w(n) = std::pow(q, static_cast<double>(n));
    w /= w.sum();
    for (Index b = 0; b < B; ++b) p(b) *= w((b / stride) % m.mode_dim);
    stride *= m.mode_dim;
  }
  return p.cast<Complex>().asDiagonal();
}

DensityMatrix product_state(const DensityMatrix& rho_sys, const DensityMatrix& rho_bath) {
  const Index S = rho_sys.rows(), B = rho_bath.rows();
  if (rho_sys.cols() != S || rho_bath.cols() != B) throw Error(ErrorCode::shape, "non-square factor");
  DensityMatrix out(S * B, S * B);
  for (Index b2 = 0; b2 < B; ++b2) {
    for (Index b1 = 0; b1 < B; ++b1) out.block(b1 * S, b2 * S, S, S) = rho_bath(b1, b2) * rho_sys;
  }
  return out;
}

DensityMatrix reduced_state(const DensityMatrix& rho_tot, const OracleConfig& config) {
  const Index S = config.system_dim;
  const Index B = bath_dimension(config);
  if (rho_tot.rows() != S * B || rho_tot.cols() != S * B) {
    throw Error(ErrorCode::shape, "total state does not match the oracle dimensions");
  }
  DensityMatrix out = MatrixXc::Zero(S, S);
  for (Index b = 0; b < B; ++b) out += rho_tot.block(b * S, b * S, S, S);
  return out;
}

double total_energy(const DensityMatrix& rho_tot, const OracleConfig& config) {
  const MatrixXc H = total_hamiltonian(config);
  if (rho_tot.rows() != H.rows() || rho_tot.cols() != H.cols()) {
    throw Error(ErrorCode::shape, "total state does not match the oracle dimensions");
  }
  return (H * rho_tot).trace().real();
}

std::vector<DensityMatrix> evolve_total(const DensityMatrix& rho_tot, const OracleConfig& config,
                                        const TimeGrid& grid) {
  validate_oracle(config);
  const Spectrum sp = build_spectrum(config);
  if (rho_tot.rows() != sp.dim || rho_tot.cols() != sp.dim) {
    throw Error(ErrorCode::shape, "total state does not match the oracle dimensions");
  }
  const double dt = grid.dt();
  MatrixXc U = MatrixXc::Zero(sp.dim, sp.dim);
  for (const auto& sec : sp.sectors) {
    const VectorXc ph = (-kI * dt * sec.E.cast<Complex>()).array().exp();
    const MatrixXc u = sec.V * ph.asDiagonal() * sec.V.adjoint();
    const Index bs = static_cast<Index>(sec.states.size());
    for (Index r = 0; r < bs; ++r) {
      for (Index q = 0; q < bs; ++q) {
        U(sec.states[static_cast<std::size_t>(r)], sec.states[static_cast<std::size_t>(q)]) = u(r, q);
      }
    }
  }
  std::vector<DensityMatrix> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  out.push_back(rho_tot);
  MatrixXc rho = rho_tot;
  for (Index k = 0; k < grid.n_steps(); ++k) {
    rho = U * rho * U.adjoint();
    out.push_back(rho);
  }
  return out;
}

OracleRun oracle_reduced_series(const DensityMatrix& rho_sys0, const OracleConfig& config,
                                const TimeGrid& grid, double cutoff) {
  validate_oracle(config);
  const Index S = config.system_dim;
  check_system_state(rho_sys0, S);
  const Index B = bath_dimension(config);
  const Spectrum sp = build_spectrum(config);

  Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (rho_sys0 + rho_sys0.adjoint()));
  const VectorXr pb = thermal_bath_state(config).diagonal().real();

  // pure product states phi_i (x) |b>
  struct Pure {
    double weight;
    Index eig;
    Index b;
  };
  std::vector<Pure> pure;
  double dropped = 0.0;
  for (Index i = 0; i < S; ++i) {
    const double pi = std::max(0.0, es.eigenvalues()(i));
    for (Index b = 0; b < B; ++b) {
      const double w = pi * pb(b);
      if (w > cutoff) {
        pure.push_back({w, i, b});
      } else {
        dropped += w;
      }
    }
  }
  const Index P = static_cast<Index>(pure.size());

  // per-sector eigenbasis coefficients of the pure states touching the sector
  struct Block {
    std::vector<Index> members;
    MatrixXc C;
  };
  std::vector<Block> blocks(sp.sectors.size());
  for (std::size_t n = 0; n < sp.sectors.size(); ++n) {
    const Sector& sec = sp.sectors[n];
    const Index bs = static_cast<Index>(sec.states.size());
    std::vector<VectorXc> cols;
    for (Index p = 0; p < P; ++p) {
      VectorXc x = VectorXc::Zero(bs);
      bool any = false;
      for (Index s = 0; s < S; ++s) {
        const Index g = s + S * pure[static_cast<std::size_t>(p)].b;
        if (sp.sector_of[static_cast<std::size_t>(g)] != static_cast<Index>(n)) continue;
        const Complex a = es.eigenvectors()(s, pure[static_cast<std::size_t>(p)].eig);
        if (a == Complex(0.0)) continue;
        x(sp.position_of[static_cast<std::size_t>(g)]) = a * std::sqrt(pure[static_cast<std::size_t>(p)].weight);
        any = true;
      }
      if (any) {
        blocks[n].members.push_back(p);
        cols.push_back(std::move(x));
      }
    }
    MatrixXc X(bs, static_cast<Index>(cols.size()));
    for (Index j = 0; j < X.cols(); ++j) X.col(j) = cols[static_cast<std::size_t>(j)];
    blocks[n].C = sec.V.adjoint() * X;
  }

  std::vector<DensityMatrix> states;
  states.reserve(static_cast<std::size_t>(grid.size()));
  // <H_tot> on at most kEnergySamples + 1 evenly spaced times
  const Index stride = std::max<Index>(1, grid.n_steps() / kEnergySamples);
  std::vector<double> energy;
  std::vector<double> energy_t;
  MatrixXc Psi(sp.dim, P);
  for (Index k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    const bool sample = k % stride == 0 || k == grid.n_steps();
    Psi.setZero();
    double e = 0.0;
    for (std::size_t n = 0; n < sp.sectors.size(); ++n) {
      const Block& blk = blocks[n];
      if (blk.members.empty()) continue;
      const Sector& sec = sp.sectors[n];
      const VectorXc ph = (-kI * t * sec.E.cast<Complex>()).array().exp();
      const MatrixXc Y = sec.V * (ph.asDiagonal() * blk.C);
      if (sample) e += Y.conjugate().cwiseProduct(sec.H * Y).sum().real();
      for (Index j = 0; j < Y.cols(); ++j) {
        const Index p = blk.members[static_cast<std::size_t>(j)];
        for (Index r = 0; r < Y.rows(); ++r) Psi(sec.states[static_cast<std::size_t>(r)], p) = Y(r, j);
      }
    }
    const Eigen::Map<const MatrixXc> X(Psi.data(), S, B * P);
    MatrixXc rho = MatrixXc::Zero(S, S);
    rho.selfadjointView<Eigen::Lower>().rankUpdate(X);
    rho = rho.selfadjointView<Eigen::Lower>();
    states.push_back(std::move(rho));
    if (sample) {
      energy.push_back(e);
      energy_t.push_back(t);
    }
  }
  OracleRun run{make_series(grid, std::move(states)), {}, {}, 0.0, P, dropped};
  run.energy = Eigen::Map<const VectorXr>(energy.data(), static_cast<Index>(energy.size()));
  run.energy_times = Eigen::Map<const VectorXr>(energy_t.data(), static_cast<Index>(energy_t.size()));
  run.energy_drift = (run.energy.array() - run.energy(0)).abs().maxCoeff();
  return run;
}

}  // namespace nmqsd
