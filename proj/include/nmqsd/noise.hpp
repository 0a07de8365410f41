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
#include <ostream>
#include <random>
#include <vector>

#include "nmqsd/bath.hpp"
#include "nmqsd/grid.hpp"

namespace nmqsd {

enum class NoiseMethod { cholesky, discrete_modes };

/// One realization of z*_t and w*_t on the grid. The correlation convention
/// is M[z*_t z_s] = alpha_1(s - t) = conj(alpha_1(t - s)), which is what the
/// mode sums z*_t = -i sum sqrt(n+1) g* z*_l exp(i w t) produce.
struct NoisePath {
  TimeGrid grid;
  VectorXc z_star;
  VectorXc w_star;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Generator seeded from (seed, stream_id) only.
std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream_id);

/// Circular standard complex normal (x + iy)/sqrt(2).
Complex complex_normal(std::mt19937_64& engine);

/// Factorizes the covariances once; sample() is then cheap and thread-safe.
class NoiseSampler {
 public:
  NoiseSampler(const CorrelationTable& correlations, NoiseMethod method,
               const std::optional<BathModel>& bath = std::nullopt);

  NoisePath sample(std::uint64_t seed, std::uint64_t stream_id) const;

  const TimeGrid& grid() const noexcept { return grid_; }
  NoiseMethod method() const noexcept { return method_; }

 private:
  TimeGrid grid_;
  NoiseMethod method_;
  MatrixXc chol1_;
  MatrixXc chol2_;
  bool has1_ = false;
  bool has2_ = false;
  std::vector<BathMode> modes_;
  std::vector<double> nbar_;
};

NoisePath sample_noise(const CorrelationTable& correlations, std::uint64_t seed,
                       std::uint64_t stream_id, NoiseMethod method,
                       const std::optional<BathModel>& bath = std::nullopt);

/// Lower factor L with L L^H = C + eps I; C[j,k] = alpha(t_k - t_j).
MatrixXc noise_factor(const CorrelationTable& correlations, bool second);

struct StatReport {
  Index samples = 0;
  double dev_zstar_z = 0.0;  // max |M[z*_t z_s] - alpha_1(s - t)|
  double dev_z_z = 0.0;      // max |M[z_t z_s]|
  double dev_wstar_w = 0.0;
  double dev_w_w = 0.0;
  double dev_zstar_w = 0.0;  // max |M[z*_t w_s]|
  double bound_z = 0.0;      // 5 alpha_1(0)/sqrt(M)
  double bound_w = 0.0;
  double bound_zw = 0.0;
  double max_ratio = 0.0;    // largest deviation/bound
  bool passed = false;
};

/// Sample covariances on every `stride`-th grid point (default picks about
/// 16 points along the grid).
StatReport verify_noise_statistics(const std::vector<NoisePath>& paths,
                                   const CorrelationTable& correlations, Index stride = 0);

void write_noise_csv(const NoisePath& path, std::ostream& out);

}  // namespace nmqsd
