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

// Lloyd's k-means on top of the fold executor.
//
// Inter-iteration state is the centroid matrix only. One assignment pass per
// iteration reads it and writes the intra-iteration accumulators (per-centroid
// sums and counts, the reassignment counter and the objective). Each point's
// current centroid lives in a per-row assignment column next to the data, so
// a pass computes one closest-centroid search per point and compares it
// against the stored previous assignment.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "madfold/dataset.hpp"
#include "madfold/iterate.hpp"
#include "madfold/linalg.hpp"

namespace madfold {

/// d x k matrix, column j is centroid j.
using Centroids = DenseMatrix;

inline constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

enum class Seeding { kKMeansPlusPlus, kRandom };

struct SeedResult {
  Centroids centroids;
  std::vector<std::size_t> rows;  // source row of each centroid
  // Set when fewer than k distinct points were available.
  bool duplicated = false;
};

/// Picks k initial centroids. Rows are sampled by a hash of their contents
/// and the seed, so the chosen points do not depend on row order.
SeedResult seed_centroids(const Dataset& data, std::size_t k, Seeding method,
                          std::uint64_t rng_seed, std::size_t p = 1);

struct FarthestPoint {
  double squared_distance = 0.0;
  std::size_t row_id = 0;
  Vector point;
};

struct KMeansIntraState {
  DenseMatrix sums;                 // d x k
  std::vector<std::size_t> counts;  // k
  std::size_t reassigned = 0;
  double objective_accum = 0.0;
  std::size_t num_rows = 0;
  // Points farthest from their assigned centroid, best first; used to
  // reseed empty clusters. Holds at most k entries.
  std::vector<FarthestPoint> farthest;

  static KMeansIntraState empty(std::size_t d, std::size_t k);
};

/// Assigns `point` to its closest centroid in `inter` and accumulates it.
/// Returns the new assignment.
std::size_t kmeans_transition(KMeansIntraState& intra, const Centroids& inter,
                              std::span<const double> point,
                              std::size_t prev_assignment,
                              std::size_t row_id = 0);

void kmeans_merge(KMeansIntraState& into, const KMeansIntraState& other);

struct KMeansUpdate {
  Centroids centroids;
  double frac_reassigned = 0.0;
  double objective = 0.0;  // under `inter`, the centroids of the pass
  std::size_t reseeded = 0;
};

/// Moves each centroid to the mean of its points. An empty cluster takes
/// the farthest not-yet-used point; with none left it stays put.
KMeansUpdate kmeans_final(const KMeansIntraState& intra, const Centroids& inter);

/// One assignment pass. Reads and rewrites the assignment column for the
/// rows it visits; partitions touch disjoint rows.
class KMeansPassFold {
 public:
  using state_type = KMeansIntraState;
  using row_type = RowView;
  using result_type = KMeansIntraState;

  KMeansPassFold(const Centroids& inter, std::span<std::size_t> assignments)
      : inter_(&inter), assignments_(assignments) {}

  KMeansIntraState identity() const {
    return KMeansIntraState::empty(inter_->rows(), inter_->cols());
  }
  void transition(KMeansIntraState& intra, const RowView& row) const;
  void merge(KMeansIntraState& into, const KMeansIntraState& other) const {
    kmeans_merge(into, other);
  }
  KMeansIntraState finalize(const KMeansIntraState& intra) const { return intra; }

 private:
  const Centroids* inter_;
  std::span<std::size_t> assignments_;
};

struct KMeansOptions {
  std::size_t k = 2;
  Seeding seeding = Seeding::kKMeansPlusPlus;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  double reassign_tol = 0.0;
  std::size_t p = 1;
  LedgerOptions ledger;
};

struct KMeansResult {
  Centroids centroids;
  std::vector<std::size_t> assignments;
  double objective = 0.0;
  std::size_t iterations = 0;
  double frac_reassigned_final = 0.0;
  bool converged = false;
  bool seeding_duplicated = false;
  Centroids initial_centroids;
  // Objective of each iteration's assignment pass, under the centroids that
  // pass started from.
  std::vector<double> objective_trace;
  // Entry m: centroids after iteration m, diagnostic = fraction reassigned.
  IterationLedger<Centroids> ledger;
};

/// sum_i min_j |x_i - c_j|^2 as a parallel fold.
double kmeans_objective(const Dataset& data, const Centroids& centroids,
                        std::size_t p = 1);

KMeansResult kmeans_fit(const Dataset& data, const KMeansOptions& options);

}  // namespace madfold
