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

// Data-parallel aggregate executor.
//
// An aggregate is a transition/merge/final triple plus an identity state. The
// executor splits a row source into contiguous partitions, folds each one
// (possibly on its own thread), then merges the partial states left to right
// in ascending partition order before finalizing. The fixed merge order makes
// results bit-reproducible for a given worker count.

#include <concepts>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "madfold/error.hpp"

namespace madfold {

/// Anything with size() and row(i), e.g. Dataset or ItemColumn.
template <class Source>
concept RowSource = requires(const Source& source, std::size_t i) {
  { source.size() } -> std::convertible_to<std::size_t>;
  source.row(i);
};

template <class Source>
using row_of_t = decltype(std::declval<const Source&>().row(std::size_t{}));

/// Transition mutates a state in place, merge folds `other` into `into`.
template <class Spec>
concept FoldSpec = requires(const Spec& spec, typename Spec::state_type& state,
                            const typename Spec::state_type& other,
                            typename Spec::row_type row) {
  typename Spec::result_type;
  { spec.identity() } -> std::same_as<typename Spec::state_type>;
  spec.transition(state, row);
  spec.merge(state, other);
  { spec.finalize(other) } -> std::convertible_to<typename Spec::result_type>;
};

template <class Spec, class Source>
concept FoldsOver =
    FoldSpec<Spec> && RowSource<Source> &&
    std::convertible_to<row_of_t<Source>, typename Spec::row_type>;

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

/// Contiguous equal row ranges; the remainder goes to the last partition.
std::vector<RowRange> partition_rows(std::size_t n_rows, std::size_t p);

/// Counts how many partial states were handed to merge; used by tests that
/// check the driver moves O(1) states per iteration.
struct FoldStats {
  std::size_t partitions = 0;
  std::size_t merges = 0;
};

template <class Spec, class Source>
  requires FoldsOver<Spec, Source>
typename Spec::state_type fold_partition(const Spec& spec, const Source& source,
                                         RowRange range) {
  auto state = spec.identity();
  for (std::size_t i = range.begin; i < range.end; ++i) {
    spec.transition(state, source.row(i));
  }
  return state;
}

template <FoldSpec Spec>
typename Spec::state_type merge_states(const Spec& spec,
                                       typename Spec::state_type a,
                                       const typename Spec::state_type& b) {
  spec.merge(a, b);
  return a;
}

/// Folds every partition and merges the partials; returns the un-finalized
/// state. Partition i runs on its own thread for i >= 1 and on the caller's
/// thread for i == 0. An exception in any partition is rethrown after all
/// workers join, choosing the lowest partition index.
template <class Spec, class Source>
  requires FoldsOver<Spec, Source>
typename Spec::state_type fold_parallel(const Spec& spec, const Source& source,
                                        std::size_t p,
                                        FoldStats* stats = nullptr) {
  if (p < 1) {
    throw Error(ErrorKind::kArgument, "worker count p must be >= 1");
  }
  const auto ranges = partition_rows(source.size(), p);
  using State = typename Spec::state_type;
  std::vector<State> partials(ranges.size(), spec.identity());
  std::vector<std::exception_ptr> failures(ranges.size());

  auto work = [&](std::size_t part) {
    try {
      partials[part] = fold_partition(spec, source, ranges[part]);
    } catch (...) {
      failures[part] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> workers;
    workers.reserve(ranges.size() - 1);
    for (std::size_t part = 1; part < ranges.size(); ++part) {
      if (ranges[part].empty()) continue;
      workers.emplace_back(work, part);
    }
    if (!ranges[0].empty()) work(0);
  }
  for (auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  State merged = std::move(partials[0]);
  for (std::size_t part = 1; part < partials.size(); ++part) {
    spec.merge(merged, partials[part]);
  }
  if (stats != nullptr) {
    stats->partitions = ranges.size();
    stats->merges = ranges.size() - 1;
  }
  return merged;
}

template <class Spec, class Source>
  requires FoldsOver<Spec, Source>
typename Spec::result_type run_parallel(const Spec& spec, const Source& source,
                                        std::size_t p,
                                        FoldStats* stats = nullptr) {
  return spec.finalize(fold_parallel(spec, source, p, stats));
}

/// A FoldSpec assembled from four callables, for ad-hoc aggregates.
template <class State, class Row, class Transition, class Merge, class Final>
class LambdaFold {
 public:
  using state_type = State;
  using row_type = Row;
  using result_type = std::invoke_result_t<const Final&, const State&>;

  LambdaFold(State identity, Transition transition, Merge merge, Final final)
      : identity_(std::move(identity)),
        transition_(std::move(transition)),
        merge_(std::move(merge)),
        final_(std::move(final)) {}

  State identity() const { return identity_; }
  void transition(State& state, Row row) const { transition_(state, row); }
  void merge(State& into, const State& other) const { merge_(into, other); }
  result_type finalize(const State& state) const { return final_(state); }

 private:
  State identity_;
  Transition transition_;
  Merge merge_;
  Final final_;
};

template <class Row, class State, class Transition, class Merge, class Final>
auto make_fold(State identity, Transition transition, Merge merge,
               Final final) {
  return LambdaFold<State, Row, Transition, Merge, Final>(
      std::move(identity), std::move(transition), std::move(merge),
      std::move(final));
}

/// Row counter over any source.
template <class Row>
struct CountFold {
  using state_type = std::size_t;
  using row_type = Row;
  using result_type = std::size_t;

  std::size_t identity() const { return 0; }
  void transition(std::size_t& count, const Row&) const { ++count; }
  void merge(std::size_t& into, const std::size_t& other) const {
    into += other;
  }
  std::size_t finalize(const std::size_t& count) const { return count; }
};

}  // namespace madfold
