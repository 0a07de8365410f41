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

#include "nmqsd/types.hpp"

namespace nmqsd {

/// Uniform grid t_k = k * dt, k = 0..n_steps, shared by every kernel, noise
/// path and integrator in the library.
class TimeGrid {
 public:
  TimeGrid(double t_max, Index n_steps);

  double t_max() const noexcept { return t_max_; }
  Index n_steps() const noexcept { return n_steps_; }
  Index size() const noexcept { return n_steps_ + 1; }
  double dt() const noexcept { return t_max_ / static_cast<double>(n_steps_); }
  double time(Index k) const noexcept { return static_cast<double>(k) * dt(); }

  bool operator==(const TimeGrid& other) const noexcept {
    return n_steps_ == other.n_steps_ && t_max_ == other.t_max_;
  }

 private:
  double t_max_;
  Index n_steps_;
};

/// Composite trapezoid weight of node `i` for an integral over nodes [lo, hi].
inline double trapezoid_weight(Index i, Index lo, Index hi, double dt) noexcept {
  if (hi <= lo || i < lo || i > hi) return 0.0;
  return (i == lo || i == hi) ? 0.5 * dt : dt;
}

/// Weights for nodes lo..hi, indexed from zero.
inline VectorXr trapezoid_weights(Index lo, Index hi, double dt) {
  VectorXr w = VectorXr::Zero(hi - lo + 1);
  if (hi > lo) {
    w.setConstant(dt);
    w(0) = w(hi - lo) = 0.5 * dt;
  }
  return w;
}

}  // namespace nmqsd
