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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace madfold {

/// Run-length encoded vector: consecutive equal values collapse into one
/// (value, length) run. Zero is not special; any repeated value compresses.
class SparseVectorRLE {
 public:
  struct Run {
    double value = 0.0;
    std::size_t length = 0;
    friend bool operator==(const Run&, const Run&) = default;
  };

  SparseVectorRLE() = default;

  static SparseVectorRLE from_dense(std::span<const double> values);

  /// Appends `length` copies of `value`, coalescing with the last run.
  void append(double value, std::size_t length);

  std::size_t logical_length() const noexcept { return logical_length_; }
  const std::vector<Run>& runs() const noexcept { return runs_; }
  std::vector<double> to_dense() const;

  friend bool operator==(const SparseVectorRLE&, const SparseVectorRLE&) = default;

 private:
  std::vector<Run> runs_;
  std::size_t logical_length_ = 0;
};

struct RleDotStats {
  std::size_t segments = 0;
};

/// Dot product by walking both run lists in lockstep; each visited segment
/// is the overlap of one run from each side.
double rle_dot(const SparseVectorRLE& a, const SparseVectorRLE& b,
               RleDotStats* stats = nullptr);

}  // namespace madfold
