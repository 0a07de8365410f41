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

#include "nmqsd/grid.hpp"
#include "nmqsd/quantum_core.hpp"

namespace nmqsd {

/// rho(t_k) for every grid point plus per-step diagnostics.
struct DensitySeries {
  TimeGrid grid;
  std::vector<DensityMatrix> states;
  std::vector<Diagnostics> diagnostics;
  double max_top_population = 0.0;  // largest population of the two top levels
  double max_hermitization_residual = 0.0;

  Index size() const noexcept { return static_cast<Index>(states.size()); }
  const DensityMatrix& operator[](Index k) const { return states[static_cast<std::size_t>(k)]; }

  double max_trace_defect() const;
  double max_herm_defect() const;
  double min_eigenvalue() const;
  bool leakage() const noexcept { return max_top_population > kLeakageThreshold; }
};

/// Fills diagnostics and the truncation monitor from `states`.
DensitySeries make_series(const TimeGrid& grid, std::vector<DensityMatrix> states);

/// max_k trace_distance(a[k], b[k]); grids must agree.
double max_trace_distance(const DensitySeries& a, const DensitySeries& b);
std::vector<double> trace_distances(const DensitySeries& a, const DensitySeries& b);

/// Series CSV: t, re_exp_a, im_exp_a, exp_n, trace, herm_defect, min_eig.
/// `lowering` and `number` define the reported expectations.
void write_series_csv(const DensitySeries& series, const MatrixXc& lowering,
                      const MatrixXc& number, std::ostream& out);

}  // namespace nmqsd
