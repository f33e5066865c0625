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

#include "madfold/cli/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "madfold/cli/report.hpp"
#include "madfold/error.hpp"
#include "madfold/fold.hpp"
#include "madfold/hash.hpp"
#include "madfold/regress.hpp"

namespace madfold::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::size_t available_bytes() {
  const long pages = sysconf(_SC_AVPHYS_PAGES);
  const long page_size = sysconf(_SC_PAGESIZE);
  if (pages <= 0 || page_size <= 0) return SIZE_MAX;
  return static_cast<std::size_t>(pages) * static_cast<std::size_t>(page_size);
}

}  // namespace

Dataset make_regression_data(std::size_t rows, std::size_t vars, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed) ^ vars);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  Vector truth(vars);
  for (double& b : truth) b = uniform(rng) * 2.0;
  std::vector<double> features(rows * vars);
  std::vector<double> labels(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    double* x = features.data() + i * vars;
    double y = 0.0;
    for (std::size_t j = 0; j < vars; ++j) {
      x[j] = uniform(rng);
      y += x[j] * truth[j];
    }
    labels[i] = y + noise(rng);
  }
  return Dataset(vars, std::move(features), std::move(labels));
}

void check_bench_memory(const BenchConfig& config) {
  if (config.vars.empty() || config.threads.empty()) {
    throw Error(ErrorKind::kArgument, "bench needs at least one variable count and one thread count");
  }
  if (config.rows < 1 || config.repeats < 1) {
    throw Error(ErrorKind::kArgument, "bench needs rows >= 1 and repeats >= 1");
  }
  for (auto p : config.threads) {
    if (p < 1) throw Error(ErrorKind::kArgument, "thread counts must be >= 1");
  }
  for (auto k : config.vars) {
    if (k < 1) throw Error(ErrorKind::kArgument, "variable counts must be >= 1");
  }
  const std::size_t k_max = *std::max_element(config.vars.begin(), config.vars.end());
  const long double needed = static_cast<long double>(config.rows) *
                             static_cast<long double>(k_max + 1) * sizeof(double);
  const std::size_t have = available_bytes();
  if (needed > static_cast<long double>(have)) {
    std::ostringstream msg;
    msg << "benchmark needs about " << static_cast<double>(needed) / (1 << 20)
        << " MiB for " << config.rows << " rows x " << k_max
        << " variables but only " << have / (1 << 20) << " MiB are available";
    throw Error(ErrorKind::kSizing, msg.str());
  }
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

BenchResult run_bench(const BenchConfig& config) {
  if (config.algo != "linregr") {
    throw Error(ErrorKind::kArgument, "bench supports --algo linregr only");
  }
  check_bench_memory(config);

  BenchResult result;
  result.config = config;
  result.baseline_workers = *std::min_element(config.threads.begin(), config.threads.end());

  for (std::size_t k : config.vars) {
    const Dataset data = make_regression_data(config.rows, k, config.seed);
    for (std::size_t p : config.threads) {
      BenchCell cell;
      cell.workers = p;
      cell.variables = k;
      cell.rows = config.rows;
      std::vector<double> fold_times, final_times;
      for (std::size_t r = 0; r < config.repeats; ++r) {
        const auto start = Clock::now();
        const LinRegrState state = fold_parallel(LinRegrFold{}, data, p);
        const double fold_time = seconds_since(start);
        const auto final_start = Clock::now();
        const LinRegrResult fit = linregr_final(state);
        const double final_time = seconds_since(final_start);
        fold_times.push_back(fold_time);
        final_times.push_back(final_time);
        cell.seconds.push_back(fold_time + final_time);
        json payload = to_json(fit);
        if (r == 0) {
          cell.payload = std::move(payload);
        } else if (payload.dump() != cell.payload.dump()) {
          cell.payloads_identical = false;
        }
      }
      cell.median_seconds = median(cell.seconds);
      cell.median_fold_seconds = median(fold_times);
      cell.median_final_seconds = median(final_times);
      result.cells.push_back(std::move(cell));
    }
  }

  for (std::size_t p : config.threads) {
    std::vector<double> log_k, log_t;
    for (const auto& cell : result.cells) {
      if (cell.workers != p) continue;
      log_k.push_back(std::log(static_cast<double>(cell.variables)));
      log_t.push_back(std::log(cell.median_fold_seconds / static_cast<double>(cell.rows)));
    }
    result.fits.push_back({p, log_k.size() >= 2 ? fit_slope(log_k, log_t) : 0.0});
  }

  for (std::size_t k : config.vars) {
    double baseline = 0.0;
    for (const auto& cell : result.cells) {
      if (cell.variables == k && cell.workers == result.baseline_workers) {
        baseline = cell.median_seconds;
      }
    }
    for (const auto& cell : result.cells) {
      if (cell.variables != k) continue;
      result.speedups.push_back({k, cell.workers, baseline / cell.median_seconds});
    }
  }
  return result;
}

json to_json(const BenchResult& result) {
  json cells = json::array();
  for (const auto& cell : result.cells) {
    cells.push_back({{"workers", cell.workers},
                     {"variables", cell.variables},
                     {"rows", cell.rows},
                     {"median_seconds", cell.median_seconds},
                     {"median_fold_seconds", cell.median_fold_seconds},
                     {"median_final_seconds", cell.median_final_seconds},
                     {"seconds", cell.seconds},
                     {"payloads_identical", cell.payloads_identical}});
  }
  json fits = json::array();
  for (const auto& fit : result.fits) {
    fits.push_back({{"workers", fit.workers}, {"per_row_exponent", fit.per_row_exponent}});
  }
  json speedups = json::array();
  for (const auto& s : result.speedups) {
    speedups.push_back({{"variables", s.variables}, {"workers", s.workers}, {"speedup", s.speedup}});
  }
  return {{"algo", result.config.algo},
          {"rows", result.config.rows},
          {"repeats", result.config.repeats},
          {"baseline_workers", result.baseline_workers},
          {"hardware_threads", std::thread::hardware_concurrency()},
          {"cells", std::move(cells)},
          {"fits", std::move(fits)},
          {"speedups", std::move(speedups)}};
}

std::string render_table(const BenchResult& result) {
  std::ostringstream out;
  out << std::setw(10) << "# workers" << std::setw(13) << "# variables"
      << std::setw(18) << "# rows (million)" << std::setw(12) << "seconds"
      << std::setw(12) << "fold (s)" << std::setw(12) << "final (s)" << "\n";
  for (const auto& cell : result.cells) {
    out << std::setw(10) << cell.workers << std::setw(13) << cell.variables
        << std::setw(18) << sig6(static_cast<double>(cell.rows) / 1e6)
        << std::setw(12) << sig6(cell.median_seconds) << std::setw(12)
        << sig6(cell.median_fold_seconds) << std::setw(12)
        << sig6(cell.median_final_seconds) << "\n";
  }
  out << "\nper-row cost exponent vs variables:\n";
  for (const auto& fit : result.fits) {
    out << "  workers " << fit.workers << ": " << sig6(fit.per_row_exponent) << "\n";
  }
  out << "speedup vs " << result.baseline_workers << " worker(s):\n";
  for (const auto& s : result.speedups) {
    out << "  variables " << s.variables << ", workers " << s.workers << ": "
        << sig6(s.speedup) << "\n";
  }
  return out.str();
}

}  // namespace madfold::cli
