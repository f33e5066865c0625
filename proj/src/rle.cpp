// Copyright 2026 The madfold Authors. All Rights Reserved.
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

#include "madfold/rle.hpp"

#include <algorithm>
#include <cmath>

#include "madfold/error.hpp"

namespace madfold {

SparseVectorRLE SparseVectorRLE::from_dense(std::span<const double> values) {
  SparseVectorRLE out;
  for (double v : values) out.append(v, 1);
  return out;
}

void SparseVectorRLE::append(double value, std::size_t length) {
  if (length == 0) return;
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::kNumeric, "RLE vector values must be finite");
  }
  if (!runs_.empty() && runs_.back().value == value) {
    runs_.back().length += length;
  } else {
    runs_.push_back({value, length});
  }
  logical_length_ += length;
}

std::vector<double> SparseVectorRLE::to_dense() const {
  std::vector<double> out;
  out.reserve(logical_length_);
  for (const Run& run : runs_) out.insert(out.end(), run.length, run.value);
  return out;
}

double rle_dot(const SparseVectorRLE& a, const SparseVectorRLE& b,
               RleDotStats* stats) {
  if (a.logical_length() != b.logical_length()) {
    throw_dimension("rle_dot", a.logical_length(), b.logical_length());
  }
  const auto& ra = a.runs();
  const auto& rb = b.runs();
  std::size_t ia = 0, ib = 0;
  std::size_t left_a = ra.empty() ? 0 : ra[0].length;
  std::size_t left_b = rb.empty() ? 0 : rb[0].length;
  std::size_t segments = 0;
  double sum = 0.0;
  while (ia < ra.size() && ib < rb.size()) {
    const std::size_t overlap = std::min(left_a, left_b);
    sum += static_cast<double>(overlap) * ra[ia].value * rb[ib].value;
    ++segments;
    left_a -= overlap;
    left_b -= overlap;
    if (left_a == 0 && ++ia < ra.size()) left_a = ra[ia].length;
    if (left_b == 0 && ++ib < rb.size()) left_b = rb[ib].length;
  }
  if (stats != nullptr) stats->segments = segments;
  return sum;
}

}  // namespace madfold
