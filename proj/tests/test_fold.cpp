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

#include "doctest.h"

#include <numeric>
#include <set>
#include <stdexcept>

#include "madfold/error.hpp"
#include "madfold/fold.hpp"
#include "madfold/kmeans.hpp"
#include "madfold/regress.hpp"
#include "madfold/sgd.hpp"
#include "madfold/sketch.hpp"
#include "oracles.hpp"

using namespace madfold;

namespace {

struct IndexSource {
  std::size_t n;
  std::size_t size() const { return n; }
  std::size_t row(std::size_t i) const { return i; }
};

// Records the order rows are seen in; merge concatenates.
auto order_fold() {
  return make_fold<std::size_t>(
      std::vector<std::size_t>{},
      [](std::vector<std::size_t>& s, std::size_t r) { s.push_back(r); },
      [](std::vector<std::size_t>& into, const std::vector<std::size_t>& other) {
        into.insert(into.end(), other.begin(), other.end());
      },
      [](const std::vector<std::size_t>& s) { return s; });
}

Dataset three_rows() {
  return Dataset(2, {1, 0, 1, 1, 1, 2}, std::vector<double>{1, 2, 4});
}

void check_linregr_state_close(const LinRegrState& a, const LinRegrState& b, double tol) {
  CHECK(a.num_rows == b.num_rows);
  CHECK(a.width_of_x == b.width_of_x);
  CHECK(oracle::rel_diff(a.y_sum, b.y_sum) <= tol);
  CHECK(oracle::rel_diff(a.y_square_sum, b.y_square_sum) <= tol);
  CHECK(oracle::rel_diff(a.X_transp_Y, b.X_transp_Y) <= tol);
  CHECK(oracle::rel_diff(a.X_transp_X.packed(), b.X_transp_X.packed()) <= tol);
}

}  // namespace

TEST_CASE("count fold over a five row partition") {
  CountFold<std::size_t> count;
  CHECK(fold_partition(count, IndexSource{5}, RowRange{0, 5}) == 5);
}

TEST_CASE("empty partition yields the identity state") {
  CHECK(fold_partition(CountFold<std::size_t>{}, IndexSource{5}, RowRange{2, 2}) == 0);
  const auto s = fold_partition(LinRegrFold{}, three_rows(), RowRange{1, 1});
  CHECK(s.num_rows == 0);
  CHECK(s.width_of_x == 0);
}

TEST_CASE("linregr partition state equals hand-summed gram matrix") {
  const Dataset data = three_rows();
  const auto s = fold_partition(LinRegrFold{}, data, RowRange{0, 3});
  // brute force sum of x x^T and x y
  double xtx[2][2] = {{0, 0}, {0, 0}};
  double xty[2] = {0, 0};
  for (std::size_t i = 0; i < 3; ++i) {
    auto x = data.features(i);
    for (int r = 0; r < 2; ++r) {
      xty[r] += x[r] * data.label(i);
      for (int c = 0; c < 2; ++c) xtx[r][c] += x[r] * x[c];
    }
  }
  CHECK(s.num_rows == 3);
  CHECK(s.X_transp_X(0, 0) == xtx[0][0]);
  CHECK(s.X_transp_X(1, 0) == xtx[1][0]);
  CHECK(s.X_transp_X(1, 1) == xtx[1][1]);
  CHECK(s.X_transp_Y[0] == xty[0]);
  CHECK(s.X_transp_Y[1] == xty[1]);
  CHECK(s.X_transp_X(0, 0) == 3.0);
  CHECK(s.X_transp_X(1, 0) == 3.0);
  CHECK(s.X_transp_X(1, 1) == 5.0);
}

TEST_CASE("merge with identity leaves a state unchanged") {
  const Dataset data = oracle::random_dataset(50, 4, 7);
  const LinRegrFold spec;
  const auto s = fold_partition(spec, data, RowRange{0, 50});
  const auto left = merge_states(spec, spec.identity(), s);
  const auto right = merge_states(spec, s, spec.identity());
  check_linregr_state_close(left, s, 0.0);
  check_linregr_state_close(right, s, 0.0);
  CHECK(merge_states(CountFold<int>{}, 3, 4) == 7);
}

TEST_CASE("merging disjoint halves matches a single pass") {
  const Dataset data = oracle::random_dataset(10, 3, 11);
  const LinRegrFold spec;
  const auto whole = fold_partition(spec, data, RowRange{0, 10});
  const auto halves = merge_states(spec, fold_partition(spec, data, RowRange{0, 5}),
                                   fold_partition(spec, data, RowRange{5, 10}));
  check_linregr_state_close(halves, whole, 1e-12);
}

TEST_CASE("merge of states with different widths is a dimension error") {
  LinRegrState a, b;
  const double x2[] = {1.0, 2.0};
  const double x3[] = {1.0, 2.0, 3.0};
  linregr_transition(a, 1.0, x2);
  linregr_transition(b, 1.0, x3);
  try {
    linregr_merge(a, b);
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimension);
  }
}

TEST_CASE("row width mismatch names expected and actual dimension") {
  LinRegrState s;
  const double x2[] = {1.0, 2.0};
  const double x3[] = {1.0, 2.0, 3.0};
  linregr_transition(s, 1.0, x2);
  try {
    linregr_transition(s, 1.0, x3);
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimension);
    const std::string msg = e.what();
    CHECK(msg.find('2') != std::string::npos);
    CHECK(msg.find('3') != std::string::npos);
  }
}

TEST_CASE("partitions are contiguous, disjoint and cover every row") {
  for (std::size_t n : {0u, 1u, 5u, 7u, 100u, 103u}) {
    for (std::size_t p : {1u, 2u, 3u, 4u, 8u, 13u}) {
      const auto parts = partition_rows(n, p);
      REQUIRE(parts.size() == p);
      std::size_t next = 0;
      for (const auto& r : parts) {
        CHECK(r.begin == next);
        CHECK(r.end >= r.begin);
        next = r.end;
      }
      CHECK(next == n);
      if (n >= p) {
        for (const auto& r : parts) CHECK(!r.empty());
        // equal ranges, remainder on the last one
        for (std::size_t i = 0; i + 1 < p; ++i) CHECK(parts[i].size() == n / p);
        CHECK(parts.back().size() == n / p + n % p);
      }
    }
  }
}

TEST_CASE("rows are visited in ascending order within and across partitions") {
  for (std::size_t p : {1u, 2u, 3u, 8u}) {
    const auto seen = run_parallel(order_fold(), IndexSource{37}, p);
    std::vector<std::size_t> expected(37);
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(seen == expected);
  }
}

TEST_CASE("count fold with four workers") {
  FoldStats stats;
  CHECK(run_parallel(CountFold<std::size_t>{}, IndexSource{103}, 4, &stats) == 103);
  CHECK(stats.partitions == 4);
  CHECK(stats.merges == 3);
  CHECK(run_parallel(CountFold<std::size_t>{}, IndexSource{3}, 8) == 3);
}

TEST_CASE("zero workers is an argument error") {
  try {
    run_parallel(CountFold<std::size_t>{}, IndexSource{3}, 0);
    FAIL("expected an argument error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kArgument);
  }
}

TEST_CASE("a worker failure is rethrown on the caller") {
  auto failing = make_fold<std::size_t>(
      std::size_t{0},
      [](std::size_t& s, std::size_t r) {
        if (r == 90) throw Error(ErrorKind::kNumeric, "row 90");
        ++s;
      },
      [](std::size_t& a, const std::size_t& b) { a += b; },
      [](const std::size_t& s) { return s; });
  for (std::size_t p : {1u, 4u}) {
    try {
      run_parallel(failing, IndexSource{100}, p);
      FAIL("expected the transition error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kNumeric);
    }
  }
}

TEST_CASE("single worker equals a whole-dataset partition fold") {
  const Dataset data = oracle::random_dataset(200, 5, 3);
  const auto a = run_parallel(LinRegrFold{}, data, 1);
  const auto b = LinRegrFold{}.finalize(fold_partition(LinRegrFold{}, data, {0, 200}));
  CHECK(a.coef == b.coef);
  CHECK(a.r2 == b.r2);
}

TEST_CASE("repeated runs at fixed p are bit-identical") {
  const Dataset data = oracle::random_dataset(5000, 6, 5);
  for (std::size_t p : {2u, 3u, 8u}) {
    const auto first = linregr(data, p);
    for (int rep = 0; rep < 5; ++rep) {
      const auto again = linregr(data, p);
      CHECK(again.coef == first.coef);
      CHECK(again.std_err == first.std_err);
      CHECK(again.r2 == first.r2);
    }
  }
}

TEST_CASE("linregr with eight workers matches one worker on 10k rows") {
  const Dataset data = oracle::linear_dataset(10000, 8, 21);
  const auto one = linregr(data, 1);
  const auto eight = linregr(data, 8);
  CHECK(oracle::rel_diff(eight.coef, one.coef) <= 1e-10);
}

TEST_CASE("every shipped fold is partition invariant") {
  const std::size_t ps[] = {1, 2, 3, 8};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset lin = oracle::linear_dataset(2000, 5, seed);
    const Dataset logi = oracle::logistic_dataset(2000, 4, seed);
    const Vector coef{0.1, -0.2, 0.3, 0.05};
    DenseMatrix centroids(5, 3);
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t t = 0; t < 5; ++t) centroids(t, j) = lin.features(j * 17)[t];
    }
    Objective ls;
    SgdModel model;
    model.x = {0.5, -0.5, 0.25, 0.0, 1.0};
    std::vector<std::string> items;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 3000; ++i) items.push_back("k" + std::to_string(rng() % 500));
    const ItemColumn column(items);

    const auto lin1 = linregr(lin, 1);
    const auto log1 = logregr_irls_step(logi, coef, 1);
    std::vector<std::size_t> assign1(lin.n_rows(), kUnassigned);
    const auto km1 = run_parallel(KMeansPassFold(centroids, assign1), lin, 1);
    const double obj1 = objective_value(ls, model, lin, 1);
    const auto cm1 = run_parallel(CountMinFold{CountMinParams::from_error(0.01, 0.01, seed)},
                                  column, 1);
    const auto fm1 = run_parallel(FlajoletMartinFold{64, seed}, column, 1);

    for (std::size_t p : ps) {
      const auto lin_p = linregr(lin, p);
      CHECK(oracle::rel_diff(lin_p.coef, lin1.coef) <= 1e-10);
      CHECK(oracle::rel_diff(lin_p.r2, lin1.r2) <= 1e-10);
      CHECK(oracle::rel_diff(lin_p.std_err, lin1.std_err) <= 1e-10);

      const auto log_p = logregr_irls_step(logi, coef, p);
      CHECK(oracle::rel_diff(log_p.coef_next, log1.coef_next) <= 1e-10);
      CHECK(oracle::rel_diff(log_p.log_likelihood, log1.log_likelihood) <= 1e-10);

      std::vector<std::size_t> assign_p(lin.n_rows(), kUnassigned);
      const auto km_p = run_parallel(KMeansPassFold(centroids, assign_p), lin, p);
      CHECK(km_p.counts == km1.counts);
      CHECK(km_p.reassigned == km1.reassigned);
      CHECK(oracle::rel_diff(km_p.sums.data(), km1.sums.data()) <= 1e-10);
      CHECK(oracle::rel_diff(km_p.objective_accum, km1.objective_accum) <= 1e-10);
      CHECK(assign_p == assign1);

      CHECK(oracle::rel_diff(objective_value(ls, model, lin, p), obj1) <= 1e-10);
      CHECK(run_parallel(CountMinFold{cm1.params()}, column, p) == cm1);
      CHECK(run_parallel(FlajoletMartinFold{64, seed}, column, p) == fm1);
    }
  }
}

TEST_CASE("linregr merge is associative") {
  const Dataset data = oracle::random_dataset(300, 4, 17);
  const LinRegrFold spec;
  const auto a = fold_partition(spec, data, {0, 100});
  const auto b = fold_partition(spec, data, {100, 180});
  const auto c = fold_partition(spec, data, {180, 300});
  const auto left = merge_states(spec, merge_states(spec, a, b), c);
  const auto right = merge_states(spec, a, merge_states(spec, b, c));
  check_linregr_state_close(left, right, 1e-12);
}

TEST_CASE("kmeans and sketch merges are associative") {
  const Dataset data = oracle::random_dataset(300, 3, 19);
  DenseMatrix c(3, 2);
  c(0, 1) = 1.0;
  std::vector<std::size_t> assign(300, kUnassigned);
  const KMeansPassFold spec(c, assign);
  const auto a = fold_partition(spec, data, {0, 100});
  const auto b = fold_partition(spec, data, {100, 200});
  const auto cc = fold_partition(spec, data, {200, 300});
  const auto left = merge_states(spec, merge_states(spec, a, b), cc);
  const auto right = merge_states(spec, a, merge_states(spec, b, cc));
  CHECK(left.counts == right.counts);
  CHECK(oracle::rel_diff(left.sums.data(), right.sums.data()) <= 1e-12);

  std::vector<std::string> items;
  for (int i = 0; i < 600; ++i) items.push_back(std::to_string(i * 7 % 211));
  const ItemColumn col(items);
  const CountMinFold cm{CountMinParams::from_error(0.05, 0.05, 1)};
  const auto x = fold_partition(cm, col, {0, 200});
  const auto y = fold_partition(cm, col, {200, 400});
  const auto z = fold_partition(cm, col, {400, 600});
  CHECK(merge_states(cm, merge_states(cm, x, y), z) == merge_states(cm, x, merge_states(cm, y, z)));
  const FlajoletMartinFold fm{16, 1};
  const auto fx = fold_partition(fm, col, {0, 200});
  const auto fy = fold_partition(fm, col, {200, 400});
  const auto fz = fold_partition(fm, col, {400, 600});
  CHECK(merge_states(fm, merge_states(fm, fx, fy), fz) == merge_states(fm, fx, merge_states(fm, fy, fz)));
}
