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

#include "nmqsd/series.hpp"

#include <algorithm>

#include "nmqsd/csv.hpp"

namespace nmqsd {

double DensitySeries::max_trace_defect() const {
  double m = 0.0;
  for (const auto& d : diagnostics) m = std::max(m, d.trace_defect);
  return m;
}

double DensitySeries::max_herm_defect() const {
  double m = 0.0;
  for (const auto& d : diagnostics) m = std::max(m, d.herm_defect);
  return m;
}

double DensitySeries::min_eigenvalue() const {
  double m = HUGE_VAL;
  for (const auto& d : diagnostics) m = std::min(m, d.min_eigenvalue);
  return m;
}

DensitySeries make_series(const TimeGrid& grid, std::vector<DensityMatrix> states) {
  if (static_cast<Index>(states.size()) != grid.size()) {
    throw Error(ErrorCode::shape, "series length does not match the grid");
  }
  DensitySeries s{grid, std::move(states), {}};
  s.diagnostics.reserve(s.states.size());
  for (const auto& rho : s.states) {
    s.diagnostics.push_back(density_diagnostics(rho));
    s.max_top_population = std::max(s.max_top_population, top_population(rho, 2));
  }
  return s;
}

std::vector<double> trace_distances(const DensitySeries& a, const DensitySeries& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::shape, "series lengths differ");
  std::vector<double> out;
  out.reserve(a.states.size());
  for (Index k = 0; k < a.size(); ++k) out.push_back(trace_distance(a[k], b[k]));
  return out;
}

double max_trace_distance(const DensitySeries& a, const DensitySeries& b) {
  const auto d = trace_distances(a, b);
  return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

void write_series_csv(const DensitySeries& series, const MatrixXc& lowering,
                      const MatrixXc& number, std::ostream& out) {
  out << kSeriesHeader << '\n';
  for (Index k = 0; k < series.size(); ++k) {
    const DensityMatrix& rho = series[k];
    const Complex ea = (lowering * rho).trace();
    const double en = (number * rho).trace().real();
    const Diagnostics& d = series.diagnostics[static_cast<std::size_t>(k)];
    write_row(out, {series.grid.time(k), ea.real(), ea.imag(), en, rho.trace().real(),
                    d.herm_defect, d.min_eigenvalue});
  }
}

}  // namespace nmqsd
