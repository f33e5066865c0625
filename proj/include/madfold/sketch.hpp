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

// Mergeable streaming summaries.
//
// Count-Min answers point-frequency queries with one-sided error; its state
// is a depth x width counter array and merging adds counters. Flajolet-Martin
// (PCSA variant, stochastic averaging over m bitmaps) estimates the number of
// distinct items; merging ORs bitmaps. Both are FoldSpecs over an ItemColumn.
//
// Binary state files: 4-byte magic ("MFCM" or "MFFM"), u16 version, then the
// parameters, master seed and raw counters/bitmaps, all little-endian.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "madfold/dataset.hpp"

namespace madfold {

inline constexpr double kCountMinDefaultEps = 0.01;
inline constexpr double kCountMinDefaultDelta = 0.01;
inline constexpr std::size_t kFmDefaultBitmaps = 64;
inline constexpr double kFmPhi = 0.77351;

struct CountMinParams {
  std::size_t depth = 0;
  std::size_t width = 0;
  std::uint64_t seed = 0;

  /// width = ceil(e / eps), depth = ceil(ln(1 / delta)).
  static CountMinParams from_error(double eps, double delta, std::uint64_t seed);
  friend bool operator==(const CountMinParams&, const CountMinParams&) = default;
};

class CountMinSketch {
 public:
  CountMinSketch() = default;
  explicit CountMinSketch(CountMinParams params);

  const CountMinParams& params() const noexcept { return params_; }
  std::uint64_t total() const noexcept { return total_; }
  const std::vector<std::uint64_t>& counters() const noexcept { return counters_; }
  std::uint64_t counter(std::size_t row, std::size_t col) const {
    return counters_[row * params_.width + col];
  }
  std::size_t bucket(std::size_t row, std::string_view item) const;

  void update(std::string_view item, std::uint64_t count = 1);
  std::uint64_t estimate(std::string_view item) const;
  void merge(const CountMinSketch& other);

  void save(std::ostream& out) const;
  static CountMinSketch load(std::istream& in);

  friend bool operator==(const CountMinSketch&, const CountMinSketch&) = default;

 private:
  CountMinParams params_;
  std::vector<std::uint64_t> row_seeds_;
  std::vector<std::uint64_t> counters_;
  std::uint64_t total_ = 0;
};

CountMinSketch cm_merge(CountMinSketch a, const CountMinSketch& b);

class FlajoletMartinSketch {
 public:
  FlajoletMartinSketch() = default;
  FlajoletMartinSketch(std::size_t num_bitmaps, std::uint64_t seed);

  std::size_t num_bitmaps() const noexcept { return bitmaps_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  bool items_seen() const noexcept { return items_seen_; }
  const std::vector<std::uint64_t>& bitmaps() const noexcept { return bitmaps_; }

  void update(std::string_view item);
  void merge(const FlajoletMartinSketch& other);

  /// 0 for an empty sketch. Otherwise (m / phi) * 2^(mean R) where R is each
  /// bitmap's lowest unset bit, except that while some bitmaps are still
  /// empty the linear-counting estimate m * ln(m / empty) is used.
  double estimate() const;
  double raw_estimate() const;

  void save(std::ostream& out) const;
  static FlajoletMartinSketch load(std::istream& in);

  friend bool operator==(const FlajoletMartinSketch&, const FlajoletMartinSketch&) = default;

 private:
  std::uint64_t seed_ = 0;
  bool items_seen_ = false;
  std::vector<std::uint64_t> bitmaps_;
};

FlajoletMartinSketch fm_merge(FlajoletMartinSketch a, const FlajoletMartinSketch& b);

struct CountMinFold {
  using state_type = CountMinSketch;
  using row_type = std::string_view;
  using result_type = CountMinSketch;

  CountMinParams params;

  CountMinSketch identity() const { return CountMinSketch(params); }
  void transition(CountMinSketch& s, std::string_view item) const { s.update(item); }
  void merge(CountMinSketch& into, const CountMinSketch& other) const { into.merge(other); }
  CountMinSketch finalize(const CountMinSketch& s) const { return s; }
};

struct FlajoletMartinFold {
  using state_type = FlajoletMartinSketch;
  using row_type = std::string_view;
  using result_type = FlajoletMartinSketch;

  std::size_t num_bitmaps = kFmDefaultBitmaps;
  std::uint64_t seed = 0;

  FlajoletMartinSketch identity() const { return {num_bitmaps, seed}; }
  void transition(FlajoletMartinSketch& s, std::string_view item) const { s.update(item); }
  void merge(FlajoletMartinSketch& into, const FlajoletMartinSketch& other) const {
    into.merge(other);
  }
  FlajoletMartinSketch finalize(const FlajoletMartinSketch& s) const { return s; }
};

}  // namespace madfold
