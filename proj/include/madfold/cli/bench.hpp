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

// Scaling benchmark for the regression aggregate: times the parallel fold
// (the per-row O(k^2) term) and the final solve (the O(k^3) term) over a grid
// of variable counts and worker counts on synthetic in-memory data.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "madfold/dataset.hpp"

namespace madfold::cli {

struct BenchConfig {
  std::string algo = "linregr";
  std::vector<std::size_t> vars{10, 20, 40, 80};
  std::size_t rows = 1'000'000;
  std::vector<std::size_t> threads{1, 4};
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
};

struct BenchCell {
  std::size_t workers = 0;
  std::size_t variables = 0;
  std::size_t rows = 0;
  double median_seconds = 0.0;        // fold + final
  double median_fold_seconds = 0.0;
  double median_final_seconds = 0.0;
  std::vector<double> seconds;        // every repeat
  bool payloads_identical = true;
  nlohmann::json payload;             // result of the first repeat
};

struct BenchFit {
  std::size_t workers = 0;
  // Slope of log(fold seconds per row) against log(variables).
  double per_row_exponent = 0.0;
};

struct BenchSpeedup {
  std::size_t variables = 0;
  std::size_t workers = 0;
  double speedup = 0.0;  // t(baseline workers) / t(workers)
};

struct BenchResult {
  BenchConfig config;
  std::size_t baseline_workers = 1;
  std::vector<BenchCell> cells;
  std::vector<BenchFit> fits;
  std::vector<BenchSpeedup> speedups;
};

/// Features iid uniform[-1, 1], y = X b* + N(0, 0.1^2) with seeded b*.
Dataset make_regression_data(std::size_t rows, std::size_t vars, std::uint64_t seed);

/// Throws kSizing when the largest dataset would not fit in available memory.
void check_bench_memory(const BenchConfig& config);

BenchResult run_bench(const BenchConfig& config);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json to_json(const BenchResult& result);
std::string render_table(const BenchResult& result);

}  // namespace madfold::cli
