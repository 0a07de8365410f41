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

#include <cstdio>
#include <initializer_list>
#include <ostream>

namespace nmqsd {

inline constexpr const char* kSeriesHeader = "t,re_exp_a,im_exp_a,exp_n,trace,herm_defect,min_eig";
inline constexpr const char* kCoefficientHeader = "t,re_a,im_a,re_b,im_b,re_c,im_c,re_d,im_d";

/// Round-trip precision, comma separated.
inline void write_row(std::ostream& out, std::initializer_list<double> values) {
  char buf[32];
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    first = false;
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  }
  out << '\n';
}

}  // namespace nmqsd
