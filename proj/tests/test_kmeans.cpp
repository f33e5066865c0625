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

#include <algorithm>
#include <numeric>
#include <set>

#include "madfold/error.hpp"
#include "madfold/fold.hpp"
#include "madfold/kmeans.hpp"
#include "oracles.hpp"

using namespace madfold;

namespace {

std::vector<std::vector<double>> columns(const DenseMatrix& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t j = 0; j < m.cols(); ++j) out.emplace_back(m.col(j).begin(), m.col(j).end());
  return out;
}

std::multiset<std::vector<double>> as_multiset(const DenseMatrix& m) {
  auto c = columns(m);
  return {c.begin(), c.end()};
}

Dataset random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n * d);
  for (auto& v : x) v = g(rng);
  return Dataset(d, std::move(x));
}

// Each blob's centroid is the one nearest the true mean.
bool one_centroid_per_blob(const DenseMatrix& c, const oracle::Blobs& blobs) {
  std::set<std::size_t> owners;
  for (const auto& mean : blobs.true_means) owners.insert(closest_column(c, mean).index);
  return owners.size() == 2;
}

}  // namespace

TEST_CASE("seeding with k equal to n picks every point once") {
  const Dataset data = random_points(9, 3, 1);
  for (auto method : {Seeding::kKMeansPlusPlus, Seeding::kRandom}) {
    const auto s = seed_centroids(data, 9, method, 5);
    std::multiset<std::vector<double>> points;
    for (std::size_t i = 0; i < 9; ++i) points.emplace(data.features(i).begin(), data.features(i).end());
    CHECK(as_multiset(s.centroids) == points);
    CHECK_FALSE(s.duplicated);
  }
}

TEST_CASE("seeding is deterministic in the seed") {
  const Dataset data = random_points(500, 4, 2);
  for (auto method : {Seeding::kKMeansPlusPlus, Seeding::kRandom}) {
    const auto a = seed_centroids(data, 6, method, 77, 1);
    const auto b = seed_centroids(data, 6, method, 77, 3);
    CHECK(a.centroids == b.centroids);
    CHECK(a.rows == b.rows);
    const auto c = seed_centroids(data, 6, method, 78);
    CHECK_FALSE(c.centroids == a.centroids);
  }
}

TEST_CASE("seeding picks the same points under row permutation") {
  const Dataset data = random_points(300, 2, 3);
  std::vector<std::size_t> order(300);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(4));
  const Dataset shuffled = data.permuted(order);
  for (auto method : {Seeding::kKMeansPlusPlus, Seeding::kRandom}) {
    const auto a = seed_centroids(data, 5, method, 9);
    const auto b = seed_centroids(shuffled, 5, method, 9);
    CHECK(a.centroids == b.centroids);
  }
}

TEST_CASE("k larger than n is an argument error") {
  const Dataset data = random_points(3, 2, 1);
  try {
    seed_centroids(data, 4, Seeding::kKMeansPlusPlus, 0);
    FAIL("expected argument error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kArgument);
  }
  KMeansOptions o;
  o.k = 0;
  CHECK_THROWS_AS(kmeans_fit(data, o), Error);
}

TEST_CASE("too few distinct points fall back to duplicates") {
  const Dataset data(1, {1, 1, 1, 2, 2});
  for (auto method : {Seeding::kKMeansPlusPlus, Seeding::kRandom}) {
    const auto s = seed_centroids(data, 4, method, 0);
    CHECK(s.duplicated);
    CHECK(s.centroids.cols() == 4);
    const auto set = as_multiset(s.centroids);
    CHECK(set.count({1.0}) >= 1);
    CHECK(set.count({2.0}) >= 1);
  }
  const auto ok = seed_centroids(data, 2, Seeding::kKMeansPlusPlus, 0);
  CHECK_FALSE(ok.duplicated);
}

TEST_CASE("kmeans++ puts one seed in each of two separated blobs") {
  const auto blobs = oracle::two_blobs(200, 10.0, 17);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto s = seed_centroids(blobs.data, 2, Seeding::kKMeansPlusPlus, seed);
    if (one_centroid_per_blob(s.centroids, blobs)) ++good;
  }
  CHECK(good >= 950);
}

TEST_CASE("transition on a stable point") {
  DenseMatrix c(2, 2);
  c(0, 1) = 10;
  auto intra = KMeansIntraState::empty(2, 2);
  const double p[] = {0, 0};
  CHECK(kmeans_transition(intra, c, p, 0) == 0);
  CHECK(intra.counts == std::vector<std::size_t>{1, 0});
  CHECK(intra.reassigned == 0);
  CHECK(intra.objective_accum == 0.0);
}

TEST_CASE("transition counts a reassignment") {
  DenseMatrix c(2, 2);
  c(0, 1) = 10;
  auto intra = KMeansIntraState::empty(2, 2);
  const double p[] = {9, 0};
  CHECK(kmeans_transition(intra, c, p, 0) == 1);
  CHECK(intra.reassigned == 1);
  CHECK(intra.counts[1] == 1);
  CHECK(intra.sums(0, 1) == 9.0);
  CHECK(intra.objective_accum == 1.0);
  const double wrong[] = {1, 2, 3};
  CHECK_THROWS_AS(kmeans_transition(intra, c, wrong, 0), Error);
}

TEST_CASE("fold over six points matches a hand partition") {
  const Dataset data(2, {0, 0, 1, 0, 0, 1, 10, 10, 11, 10, 10, 12});
  DenseMatrix c(2, 2);
  c(0, 1) = 10;
  c(1, 1) = 10;
  std::vector<std::size_t> assign(6, kUnassigned);
  const auto intra = run_parallel(KMeansPassFold(c, assign), data, 2);
  CHECK(intra.counts == std::vector<std::size_t>{3, 3});
  CHECK(intra.sums(0, 0) == 1.0);
  CHECK(intra.sums(1, 0) == 1.0);
  CHECK(intra.sums(0, 1) == 31.0);
  CHECK(intra.sums(1, 1) == 32.0);
  CHECK(intra.reassigned == 6);
  CHECK(intra.objective_accum == 1 + 1 + 1 + 4);
  CHECK(assign == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("final step at a fixed point") {
  const Dataset data(1, {0, 0, 5, 5});
  DenseMatrix c(1, 2);
  c(0, 1) = 5;
  std::vector<std::size_t> assign{0, 0, 1, 1};
  const auto intra = run_parallel(KMeansPassFold(c, assign), data, 1);
  const auto up = kmeans_final(intra, c);
  CHECK(up.centroids == c);
  CHECK(up.frac_reassigned == 0.0);
  CHECK(up.objective == 0.0);
}

TEST_CASE("k = 1 gives the dataset mean") {
  const Dataset data = random_points(101, 3, 6);
  KMeansOptions o;
  o.k = 1;
  const auto r = kmeans_fit(data, o);
  for (std::size_t t = 0; t < 3; ++t) {
    double s = 0;
    for (std::size_t i = 0; i < 101; ++i) s += data.features(i)[t];
    CHECK(r.centroids(t, 0) == doctest::Approx(s / 101).epsilon(1e-12));
  }
  CHECK(r.converged);
}

TEST_CASE("two blobs converge to the per-blob means") {
  const auto blobs = oracle::two_blobs(300, 12.0, 5);
  KMeansOptions o;
  o.k = 2;
  o.seed = 1;
  const auto r = kmeans_fit(blobs.data, o);
  CHECK(r.converged);
  for (const auto& mean : blobs.sample_means) {
    const auto hit = closest_column(r.centroids, mean);
    CHECK(hit.squared_distance <= 1e-18);
  }
}

TEST_CASE("k distinct points converge at once with zero objective") {
  const Dataset data(2, {0, 0, 3, 1, -2, 5});
  KMeansOptions o;
  o.k = 3;
  const auto r = kmeans_fit(data, o);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.objective == 0.0);
}

TEST_CASE("objective never increases across iterations") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset data = random_points(400, 2 + seed % 3, seed);
    KMeansOptions o;
    o.k = 2 + seed % 6;
    o.seed = seed;
    o.seeding = seed % 2 ? Seeding::kRandom : Seeding::kKMeansPlusPlus;
    const auto r = kmeans_fit(data, o);
    // recompute independently from the ledger's centroids
    std::vector<double> trace{oracle::lloyd_objective(data, columns(r.initial_centroids))};
    for (std::size_t i = 0; i < r.ledger.size(); ++i) {
      trace.push_back(oracle::lloyd_objective(data, columns(r.ledger.state_at(i))));
    }
    for (std::size_t i = 1; i < trace.size(); ++i) {
      CHECK(trace[i] <= trace[i - 1] * (1 + 1e-9));
    }
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
      CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] * (1 + 1e-9));
    }
  }
}

TEST_CASE("matches a straightforward Lloyd run from the same seeds") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto blobs = oracle::two_blobs(250, 3.0, 100 + seed);
    KMeansOptions o;
    o.k = 2;
    o.seed = seed;
    const auto r = kmeans_fit(blobs.data, o);
    const auto ref = oracle::lloyd(blobs.data, columns(r.initial_centroids));
    CHECK(r.assignments == ref.assignments);
    CHECK(r.objective == doctest::Approx(oracle::lloyd_objective(blobs.data, ref.centroids)).epsilon(1e-12));
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(oracle::max_abs_diff(r.centroids.col(j), ref.centroids[j]) <= 1e-12);
    }
  }
}

TEST_CASE("final assignments are the argmin under the final centroids") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset data = random_points(300, 2, 50 + seed);
    KMeansOptions o;
    o.k = 4;
    o.seed = seed;
    o.max_iter = 3;  // stop early on purpose
    const auto r = kmeans_fit(data, o);
    double objective = 0;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
      const auto hit = closest_column(r.centroids, data.features(i));
      CHECK(r.assignments[i] == hit.index);
      objective += hit.squared_distance;
    }
    CHECK(r.objective == doctest::Approx(objective).epsilon(1e-9));
    CHECK(r.objective == doctest::Approx(kmeans_objective(data, r.centroids, 3)).epsilon(1e-12));
  }
}

TEST_CASE("row permutation only permutes assignments") {
  const Dataset data = random_points(200, 3, 8);
  std::vector<std::size_t> order(200);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(1));
  KMeansOptions o;
  o.k = 3;
  o.seed = 4;
  const auto a = kmeans_fit(data, o);
  const auto b = kmeans_fit(data.permuted(order), o);
  CHECK(a.initial_centroids == b.initial_centroids);
  for (std::size_t i = 0; i < 200; ++i) CHECK(b.assignments[i] == a.assignments[order[i]]);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(oracle::max_abs_diff(a.centroids.col(j), b.centroids.col(j)) <= 1e-12);
  }
}

TEST_CASE("an empty cluster is reseeded at the farthest point") {
  // centroid 1 sits far away and captures nothing
  const Dataset data(1, {0, 1, 2, 100});
  DenseMatrix c(1, 2);
  c(0, 0) = 1;
  c(0, 1) = -1000;
  std::vector<std::size_t> assign(4, kUnassigned);
  const auto intra = run_parallel(KMeansPassFold(c, assign), data, 2);
  CHECK(intra.counts[1] == 0);
  const auto up = kmeans_final(intra, c);
  CHECK(up.reseeded == 1);
  CHECK(up.centroids(0, 1) == 100.0);
  CHECK(up.centroids(0, 0) == doctest::Approx(103.0 / 4));
}

TEST_CASE("farthest point ties go to the lowest row id") {
  const Dataset data(1, {-3, 3, 0});
  DenseMatrix c(1, 2);
  c(0, 1) = 1000;
  std::vector<std::size_t> assign(3, kUnassigned);
  const auto intra = run_parallel(KMeansPassFold(c, assign), data, 3);
  const auto up = kmeans_final(intra, c);
  CHECK(up.centroids(0, 1) == -3.0);
}

TEST_CASE("kmeans is partition invariant end to end") {
  const Dataset data = random_points(1000, 3, 11);
  KMeansOptions o;
  o.k = 5;
  o.seed = 2;
  const auto base = kmeans_fit(data, o);
  for (std::size_t p : {2u, 3u, 8u}) {
    o.p = p;
    const auto r = kmeans_fit(data, o);
    CHECK(r.assignments == base.assignments);
    CHECK(r.iterations == base.iterations);
    CHECK(oracle::rel_diff(r.centroids.data(), base.centroids.data()) <= 1e-10);
  }
}

TEST_CASE("reassignment tolerance stops early") {
  const Dataset data = random_points(2000, 2, 12);
  KMeansOptions o;
  o.k = 8;
  const auto exact = kmeans_fit(data, o);
  o.reassign_tol = 0.2;
  const auto loose = kmeans_fit(data, o);
  CHECK(loose.converged);
  CHECK(loose.iterations <= exact.iterations);
  CHECK(loose.frac_reassigned_final <= 0.2);
}
