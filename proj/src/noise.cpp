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

#include "nmqsd/noise.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "nmqsd/csv.hpp"
#include "nmqsd/error.hpp"

namespace nmqsd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream_id) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

Complex complex_normal(std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double x = normal(engine);
  const double y = normal(engine);
  return Complex(x, y) * M_SQRT1_2;
}

MatrixXc noise_factor(const CorrelationTable& correlations, bool second) {
  const Index n = correlations.grid().size();
  MatrixXc c(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      c(j, k) = second ? correlations.alpha2(k - j) : correlations.alpha1(k - j);
    }
  }
  const double scale = second ? std::abs(correlations.alpha2()(0)) : std::abs(correlations.alpha1()(0));
  c.diagonal().array() += 1e-12 * scale;
  Eigen::LLT<MatrixXc> llt(c);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kernel_not_admissible,
                "noise covariance is not positive semidefinite within jitter");
  }
  return llt.matrixL();
}

NoiseSampler::NoiseSampler(const CorrelationTable& correlations, NoiseMethod method,
                           const std::optional<BathModel>& bath)
    : grid_(correlations.grid()), method_(method) {
  if (method == NoiseMethod::cholesky) {
    has1_ = correlations.alpha1().cwiseAbs().maxCoeff() > 0.0;
    has2_ = correlations.alpha2().cwiseAbs().maxCoeff() > 0.0;
    if (has1_) chol1_ = noise_factor(correlations, false);
    if (has2_) chol2_ = noise_factor(correlations, true);
    return;
  }
  const auto* modes = bath ? std::get_if<DiscreteModes>(&*bath) : nullptr;
  if (modes == nullptr) {
    throw Error(ErrorCode::config, "discrete-mode noise requires a DiscreteModes bath");
  }
  modes_ = modes->modes;
  for (const auto& m : modes_) nbar_.push_back(mean_occupation(m.omega, modes->temperature));
}

NoisePath NoiseSampler::sample(std::uint64_t seed, std::uint64_t stream_id) const {
  const Index n = grid_.size();
  NoisePath path{grid_, VectorXc::Zero(n), VectorXc::Zero(n), seed, stream_id};
  std::mt19937_64 engine = stream_engine(seed, stream_id);
  if (method_ == NoiseMethod::cholesky) {
    VectorXc xi(n);
    for (Index i = 0; i < n; ++i) xi(i) = complex_normal(engine);
    if (has1_) path.z_star.noalias() = chol1_.triangularView<Eigen::Lower>() * xi;
    for (Index i = 0; i < n; ++i) xi(i) = complex_normal(engine);
    if (has2_) path.w_star.noalias() = chol2_.triangularView<Eigen::Lower>() * xi;
    return path;
  }
  for (std::size_t l = 0; l < modes_.size(); ++l) {
    const Complex zl = std::conj(complex_normal(engine));
    const Complex wl = std::conj(complex_normal(engine));
    const Complex cz = -kI * std::sqrt(nbar_[l] + 1.0) * std::conj(modes_[l].g) * zl;
    const Complex cw = -kI * std::sqrt(nbar_[l]) * std::conj(modes_[l].g) * wl;
    for (Index k = 0; k < n; ++k) {
      const Complex phase = std::exp(kI * modes_[l].omega * grid_.time(k));
      path.z_star(k) += cz * phase;
      path.w_star(k) += cw * std::conj(phase);
    }
  }
  return path;
}

NoisePath sample_noise(const CorrelationTable& correlations, std::uint64_t seed,
                       std::uint64_t stream_id, NoiseMethod method,
                       const std::optional<BathModel>& bath) {
  return NoiseSampler(correlations, method, bath).sample(seed, stream_id);
}

StatReport verify_noise_statistics(const std::vector<NoisePath>& paths,
                                   const CorrelationTable& correlations, Index stride) {
  if (paths.size() < 100) {
    throw Error(ErrorCode::insufficient_sample, "at least 100 noise paths are required");
  }
  const Index n = correlations.grid().size();
  for (const auto& p : paths) {
    if (p.z_star.size() != n || p.w_star.size() != n) {
      throw Error(ErrorCode::shape, "noise path does not match the correlation grid");
    }
  }
  if (stride <= 0) stride = std::max<Index>(1, (n - 1) / 16);
  std::vector<Index> idx;
  for (Index k = 0; k < n; k += stride) idx.push_back(k);
  const Index q = static_cast<Index>(idx.size());
  const double m = static_cast<double>(paths.size());

  MatrixXc zsz = MatrixXc::Zero(q, q), zz = zsz, wsw = zsz, ww = zsz, zsw = zsz;
  for (const auto& p : paths) {
    for (Index a = 0; a < q; ++a) {
      const Complex zt = p.z_star(idx[a]);
      const Complex wt = p.w_star(idx[a]);
      for (Index b = 0; b < q; ++b) {
        const Complex zs = p.z_star(idx[b]);
        const Complex ws = p.w_star(idx[b]);
        zsz(a, b) += zt * std::conj(zs);
        zz(a, b) += std::conj(zt) * std::conj(zs);
        wsw(a, b) += wt * std::conj(ws);
        ww(a, b) += std::conj(wt) * std::conj(ws);
        zsw(a, b) += zt * std::conj(ws);
      }
    }
  }
  StatReport r;
  r.samples = static_cast<Index>(paths.size());
  for (Index a = 0; a < q; ++a) {
    for (Index b = 0; b < q; ++b) {
      const Index lag = idx[b] - idx[a];
      r.dev_zstar_z = std::max(r.dev_zstar_z, std::abs(zsz(a, b) / m - correlations.alpha1(lag)));
      r.dev_z_z = std::max(r.dev_z_z, std::abs(zz(a, b) / m));
      r.dev_wstar_w = std::max(r.dev_wstar_w, std::abs(wsw(a, b) / m - correlations.alpha2(lag)));
      r.dev_w_w = std::max(r.dev_w_w, std::abs(ww(a, b) / m));
      r.dev_zstar_w = std::max(r.dev_zstar_w, std::abs(zsw(a, b) / m));
    }
  }
  const double a1 = std::abs(correlations.alpha1()(0));
  const double a2 = std::abs(correlations.alpha2()(0));
  r.bound_z = 5.0 * a1 / std::sqrt(m);
  r.bound_w = 5.0 * a2 / std::sqrt(m);
  r.bound_zw = 5.0 * std::sqrt(a1 * a2) / std::sqrt(m);
  auto ratio = [](double dev, double bound) {
    if (bound > 0.0) return dev / bound;
    return dev > 0.0 ? HUGE_VAL : 0.0;
  };
  r.max_ratio = std::max({ratio(r.dev_zstar_z, r.bound_z), ratio(r.dev_z_z, r.bound_z),
                          ratio(r.dev_wstar_w, r.bound_w), ratio(r.dev_w_w, r.bound_w),
                          ratio(r.dev_zstar_w, r.bound_zw)});
  r.passed = r.max_ratio <= 1.0;
  return r;
}

void write_noise_csv(const NoisePath& path, std::ostream& out) {
  out << "t,re_z_star,im_z_star,re_w_star,im_w_star\n";
  for (Index k = 0; k < path.grid.size(); ++k) {
    write_row(out, {path.grid.time(k), path.z_star(k).real(), path.z_star(k).imag(),
                    path.w_star(k).real(), path.w_star(k).imag()});
  }
}

}  // namespace nmqsd
