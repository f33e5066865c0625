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

#include "madfold/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "madfold/error.hpp"
#include "madfold/fold.hpp"
#include "madfold/hash.hpp"

namespace madfold {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform (0,1) draw attached to a row's contents for sampling round `round`.
double row_uniform(std::span<const double> x, std::uint64_t seed,
                   std::uint64_t round) {
  return unit_interval(hash_reals(x, mix64(seed) ^ mix64(round + 1)));
}

struct KeyedRow {
  double key = kInf;
  std::size_t row = kUnassigned;

  bool better_than(const KeyedRow& other) const {
    return std::tie(key, row) < std::tie(other.key, other.row);
  }
};

// One k-means++ round: folds the newest centroid into the per-row minimum
// distance column and draws the next row by an exponential race, which picks
// row i with probability proportional to its weight regardless of row order.
class PlusPlusRoundFold {
 public:
  using state_type = KeyedRow;
  using row_type = RowView;
  using result_type = KeyedRow;

  PlusPlusRoundFold(std::span<const double> newest, std::span<double> min_dist,
                    std::span<const char> chosen, std::uint64_t seed,
                    std::uint64_t round, bool ignore_weights)
      : newest_(newest),
        min_dist_(min_dist),
        chosen_(chosen),
        seed_(seed),
        round_(round),
        ignore_weights_(ignore_weights) {}

  KeyedRow identity() const { return {}; }
  void transition(KeyedRow& best, const RowView& row) const {
    double& dist = min_dist_[row.row_id];
    if (!newest_.empty()) dist = std::min(dist, squared_distance(row.x, newest_));
    if (chosen_[row.row_id]) return;
    const double weight = ignore_weights_ ? 1.0 : dist;
    if (!(weight > 0.0)) return;
    const KeyedRow candidate{-std::log(row_uniform(row.x, seed_, round_)) / weight,
                             row.row_id};
    if (candidate.better_than(best)) best = candidate;
  }
  void merge(KeyedRow& into, const KeyedRow& other) const {
    if (other.better_than(into)) into = other;
  }
  KeyedRow finalize(const KeyedRow& best) const { return best; }

 private:
  std::span<const double> newest_;
  std::span<double> min_dist_;
  std::span<const char> chosen_;
  std::uint64_t seed_;
  std::uint64_t round_;
  bool ignore_weights_;
};

// k rows with the smallest uniform keys.
class SmallestKeysFold {
 public:
  using state_type = std::vector<KeyedRow>;
  using row_type = RowView;
  using result_type = std::vector<KeyedRow>;

  SmallestKeysFold(std::size_t k, std::uint64_t seed) : k_(k), seed_(seed) {}

  state_type identity() const { return {}; }
  void transition(state_type& best, const RowView& row) const {
    offer(best, {row_uniform(row.x, seed_, 0), row.row_id});
  }
  void merge(state_type& into, const state_type& other) const {
    for (const auto& candidate : other) offer(into, candidate);
  }
  state_type finalize(const state_type& best) const { return best; }

 private:
  void offer(state_type& best, const KeyedRow& candidate) const {
    if (best.size() == k_ && !candidate.better_than(best.back())) return;
    auto pos = std::upper_bound(best.begin(), best.end(), candidate,
                                [](const KeyedRow& a, const KeyedRow& b) {
                                  return a.better_than(b);
                                });
    best.insert(pos, candidate);
    if (best.size() > k_) best.pop_back();
  }

  std::size_t k_;
  std::uint64_t seed_;
};

bool has_duplicate_columns(const Centroids& c) {
  for (std::size_t a = 0; a < c.cols(); ++a) {
    for (std::size_t b = a + 1; b < c.cols(); ++b) {
      if (std::equal(c.col(a).begin(), c.col(a).end(), c.col(b).begin())) return true;
    }
  }
  return false;
}

bool farther(const FarthestPoint& a, const FarthestPoint& b) {
  if (a.squared_distance != b.squared_distance) {
    return a.squared_distance > b.squared_distance;
  }
  return a.row_id < b.row_id;
}

void offer_farthest(std::vector<FarthestPoint>& list, std::size_t cap,
                    double dist, std::size_t row_id,
                    std::span<const double> point) {
  if (!(dist > 0.0) || cap == 0) return;
  FarthestPoint candidate{dist, row_id, {}};
  if (list.size() == cap && !farther(candidate, list.back())) return;
  candidate.point.assign(point.begin(), point.end());
  auto pos = std::upper_bound(list.begin(), list.end(), candidate, farther);
  list.insert(pos, std::move(candidate));
  if (list.size() > cap) list.pop_back();
}

}  // namespace

SeedResult seed_centroids(const Dataset& data, std::size_t k, Seeding method,
                          std::uint64_t rng_seed, std::size_t p) {
  const std::size_t n = data.n_rows();
  if (k < 1) throw Error(ErrorKind::kArgument, "k must be >= 1");
  if (k > n) {
    throw Error(ErrorKind::kArgument, "k=" + std::to_string(k) +
                                          " exceeds the number of rows (" +
                                          std::to_string(n) + ")");
  }
  const std::size_t d = data.n_features();
  SeedResult out;
  out.centroids = Centroids(d, k);

  auto place = [&](std::size_t j, std::size_t row) {
    auto x = data.features(row);
    std::copy(x.begin(), x.end(), out.centroids.col(j).begin());
    out.rows.push_back(row);
  };

  if (method == Seeding::kRandom) {
    const auto picked = run_parallel(SmallestKeysFold(k, rng_seed), data, p);
    for (std::size_t j = 0; j < k; ++j) place(j, picked[j].row);
    out.duplicated = has_duplicate_columns(out.centroids);
    return out;
  }

  std::vector<double> min_dist(n, kInf);
  std::vector<char> chosen(n, 0);
  std::span<const double> newest;
  for (std::size_t j = 0; j < k; ++j) {
    // Round 0 has all weights infinite; treat it as uniform.
    const bool uniform = j == 0;
    KeyedRow pick = run_parallel(
        PlusPlusRoundFold(newest, min_dist, chosen, rng_seed, j, uniform), data, p);
    if (pick.row == kUnassigned) {
      // Every remaining point coincides with a chosen centroid.
      out.duplicated = true;
      pick = run_parallel(
          PlusPlusRoundFold({}, min_dist, chosen, rng_seed, j, true), data, p);
    }
    chosen[pick.row] = 1;
    place(j, pick.row);
    newest = out.centroids.col(j);
  }
  return out;
}

KMeansIntraState KMeansIntraState::empty(std::size_t d, std::size_t k) {
  KMeansIntraState state;
  state.sums = DenseMatrix(d, k);
  state.counts.assign(k, 0);
  return state;
}

std::size_t kmeans_transition(KMeansIntraState& intra, const Centroids& inter,
                              std::span<const double> point,
                              std::size_t prev_assignment, std::size_t row_id) {
  if (intra.sums.rows() != inter.rows() || intra.sums.cols() != inter.cols()) {
    throw_dimension("k-means intra state", inter.rows() * inter.cols(),
                    intra.sums.rows() * intra.sums.cols());
  }
  const ClosestColumn closest = closest_column(inter, point);
  auto sum = intra.sums.col(closest.index);
  for (std::size_t i = 0; i < point.size(); ++i) sum[i] += point[i];
  intra.counts[closest.index]++;
  intra.objective_accum += closest.squared_distance;
  intra.num_rows++;
  if (closest.index != prev_assignment) intra.reassigned++;
  offer_farthest(intra.farthest, inter.cols(), closest.squared_distance, row_id,
                 point);
  return closest.index;
}

void kmeans_merge(KMeansIntraState& into, const KMeansIntraState& other) {
  if (into.sums.rows() != other.sums.rows() || into.sums.cols() != other.sums.cols()) {
    throw_dimension("k-means merge", into.sums.data().size(), other.sums.data().size());
  }
  auto dst = into.sums.data();
  auto src = other.sums.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  for (std::size_t j = 0; j < into.counts.size(); ++j) into.counts[j] += other.counts[j];
  into.reassigned += other.reassigned;
  into.objective_accum += other.objective_accum;
  into.num_rows += other.num_rows;
  for (const auto& candidate : other.farthest) {
    offer_farthest(into.farthest, into.counts.size(), candidate.squared_distance,
                   candidate.row_id, candidate.point);
  }
}

KMeansUpdate kmeans_final(const KMeansIntraState& intra, const Centroids& inter) {
  KMeansUpdate out;
  out.centroids = inter;
  out.objective = intra.objective_accum;
  out.frac_reassigned =
      intra.num_rows == 0 ? 0.0
                          : static_cast<double>(intra.reassigned) /
                                static_cast<double>(intra.num_rows);
  std::size_t next_candidate = 0;
  for (std::size_t j = 0; j < inter.cols(); ++j) {
    auto target = out.centroids.col(j);
    if (intra.counts[j] > 0) {
      const double count = static_cast<double>(intra.counts[j]);
      auto sum = intra.sums.col(j);
      for (std::size_t i = 0; i < target.size(); ++i) target[i] = sum[i] / count;
    } else if (next_candidate < intra.farthest.size()) {
      const auto& point = intra.farthest[next_candidate++].point;
      std::copy(point.begin(), point.end(), target.begin());
      out.reseeded++;
    }
  }
  return out;
}

void KMeansPassFold::transition(KMeansIntraState& intra, const RowView& row) const {
  std::size_t& slot = assignments_[row.row_id];
  slot = kmeans_transition(intra, *inter_, row.x, slot, row.row_id);
}

double kmeans_objective(const Dataset& data, const Centroids& centroids,
                        std::size_t p) {
  auto fold = make_fold<RowView>(
      0.0,
      [&centroids](double& sum, const RowView& row) {
        sum += closest_column(centroids, row.x).squared_distance;
      },
      [](double& into, const double& other) { into += other; },
      [](const double& sum) { return sum; });
  return run_parallel(fold, data, p);
}

KMeansResult kmeans_fit(const Dataset& data, const KMeansOptions& options) {
  if (!(options.reassign_tol >= 0.0 && options.reassign_tol < 1.0)) {
    throw Error(ErrorKind::kArgument, "reassign_tol must lie in [0, 1)");
  }
  SeedResult seeds =
      seed_centroids(data, options.k, options.seeding, options.seed, options.p);

  KMeansResult out;
  out.seeding_duplicated = seeds.duplicated;
  out.initial_centroids = seeds.centroids;
  out.assignments.assign(data.n_rows(), kUnassigned);

  Centroids pass_centroids;
  double last_frac = 1.0;
  bool unchanged = false;

  auto step = [&](const Centroids& inter, const Dataset& rows,
                  std::size_t p) -> StepOutcome<Centroids> {
    const KMeansIntraState intra =
        fold_parallel(KMeansPassFold(inter, out.assignments), rows, p);
    KMeansUpdate update = kmeans_final(intra, inter);
    out.objective_trace.push_back(update.objective);
    pass_centroids = inter;
    last_frac = update.frac_reassigned;
    unchanged = update.centroids == inter;
    return {std::move(update.centroids), update.frac_reassigned};
  };
  // Unchanged centroids mean the next pass would reassign nothing.
  auto converged = [&](const IterationLedger<Centroids>&) {
    return last_frac <= options.reassign_tol || unchanged;
  };

  auto run = iterate(step, data, options.p, std::move(seeds.centroids), converged,
                     options.max_iter, options.ledger);
  run.rethrow_if_failed();

  out.centroids = std::move(run.state);
  out.iterations = run.ledger.size();
  out.converged = run.converged;
  out.frac_reassigned_final = last_frac;
  if (out.centroids == pass_centroids) {
    out.objective = out.objective_trace.back();
  } else {
    // Score against the repositioned centroids so the reported assignments
    // and objective describe the returned centroids.
    const KMeansIntraState scored =
        fold_parallel(KMeansPassFold(out.centroids, out.assignments), data, options.p);
    out.objective = scored.objective_accum;
  }
  out.ledger = std::move(run.ledger);
  return out;
}

}  // namespace madfold
