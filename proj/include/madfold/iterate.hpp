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

// Driver loop for multipass methods.
//
// The driver owns only the small inter-iteration state. Each step gets the
// dataset by reference and is expected to do its heavy lifting through the
// fold executor; the driver itself never touches rows. Every iteration is
// recorded in an IterationLedger, which keeps snapshots in memory until a
// byte budget is exceeded and then spills older snapshots to a
// newline-delimited temp file.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "madfold/error.hpp"

namespace madfold {

/// Specialize for every inter-iteration state type used with iterate():
///   static std::string encode(const State&);   // single line, no '\n'
///   static State decode(const std::string&);
///   static std::size_t bytes(const State&);    // payload size
template <class State>
struct SnapshotCodec;

struct LedgerOptions {
  std::size_t byte_budget = std::size_t{256} << 20;
  // Directory for the spill file; empty means the system temp directory.
  std::filesystem::path spill_dir;
};

template <class State>
class IterationLedger {
 public:
  struct Entry {
    std::size_t iteration = 0;
    double diagnostic = 0.0;
    std::size_t state_bytes = 0;
    std::optional<State> snapshot;          // resident copy, if any
    std::optional<std::streamoff> spilled;  // offset in the spill file
  };

  explicit IterationLedger(LedgerOptions options = {})
      : options_(std::move(options)) {}
  IterationLedger(IterationLedger&& other) noexcept { *this = std::move(other); }
  IterationLedger& operator=(IterationLedger&& other) noexcept {
    if (this != &other) {
      remove_spill();
      options_ = std::move(other.options_);
      entries_ = std::move(other.entries_);
      resident_bytes_ = other.resident_bytes_;
      spill_path_ = std::move(other.spill_path_);
      other.spill_path_.clear();
      other.resident_bytes_ = 0;
    }
    return *this;
  }
  IterationLedger(const IterationLedger&) = delete;
  IterationLedger& operator=(const IterationLedger&) = delete;
  ~IterationLedger() { remove_spill(); }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  const Entry& back() const { return entries_.back(); }
  const std::vector<Entry>& entries() const { return entries_; }
  bool spilled() const noexcept { return !spill_path_.empty(); }
  std::size_t resident_bytes() const noexcept { return resident_bytes_; }

  std::vector<double> diagnostics() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.diagnostic);
    return out;
  }

  /// Snapshot after iteration entries_[i], loading it from disk if spilled.
  State state_at(std::size_t i) const {
    const Entry& e = entries_.at(i);
    if (e.snapshot) return *e.snapshot;
    std::ifstream in(spill_path_, std::ios::binary);
    in.seekg(*e.spilled);
    std::string line;
    if (!in || !std::getline(in, line)) {
      throw Error(ErrorKind::kIo, "cannot read ledger spill file " +
                                      spill_path_.string());
    }
    return SnapshotCodec<State>::decode(line);
  }

  void append(std::size_t iteration, const State& state, double diagnostic) {
    if (!entries_.empty() && iteration <= entries_.back().iteration) {
      throw Error(ErrorKind::kArgument,
                  "ledger iteration indices must increase");
    }
    Entry e;
    e.iteration = iteration;
    e.diagnostic = diagnostic;
    e.state_bytes = SnapshotCodec<State>::bytes(state);
    e.snapshot = state;
    resident_bytes_ += e.state_bytes;
    entries_.push_back(std::move(e));
    enforce_budget();
  }

 private:
  // The two most recent snapshots always stay resident so convergence tests
  // can compare consecutive states without disk reads.
  void enforce_budget() {
    if (resident_bytes_ <= options_.byte_budget || entries_.size() <= 2) return;
    if (spill_path_.empty()) open_spill();
    std::ofstream out(spill_path_, std::ios::binary | std::ios::app);
    for (std::size_t i = 0; i + 2 < entries_.size(); ++i) {
      Entry& e = entries_[i];
      if (!e.snapshot) continue;
      out.seekp(0, std::ios::end);
      e.spilled = out.tellp();
      out << SnapshotCodec<State>::encode(*e.snapshot) << '\n';
      resident_bytes_ -= e.state_bytes;
      e.snapshot.reset();
      if (resident_bytes_ <= options_.byte_budget) break;
    }
    if (!out) {
      throw Error(ErrorKind::kIo, "cannot write ledger spill file " +
                                      spill_path_.string());
    }
  }

  void open_spill() {
    auto dir = options_.spill_dir.empty()
                   ? std::filesystem::temp_directory_path()
                   : options_.spill_dir;
    static std::uint64_t counter = 0;
    spill_path_ = dir / ("madfold-ledger-" +
                         std::to_string(reinterpret_cast<std::uintptr_t>(this)) +
                         "-" + std::to_string(++counter) + ".ndjson");
    std::ofstream touch(spill_path_, std::ios::binary | std::ios::trunc);
  }

  void remove_spill() noexcept {
    if (spill_path_.empty()) return;
    std::error_code ec;
    std::filesystem::remove(spill_path_, ec);
    spill_path_.clear();
  }

  LedgerOptions options_;
  std::vector<Entry> entries_;
  std::size_t resident_bytes_ = 0;
  std::filesystem::path spill_path_;
};

template <class State>
struct StepOutcome {
  State state;
  double diagnostic = 0.0;
};

template <class State>
struct IterateResult {
  State state;
  IterationLedger<State> ledger;
  bool converged = false;
  // Set when a step threw; the ledger holds every iteration before it.
  std::exception_ptr failure;

  void rethrow_if_failed() const {
    if (failure) std::rethrow_exception(failure);
  }
};

/// Runs step(state, data, p) until converged(ledger) or max_iter iterations.
/// `init` is not recorded in the ledger; entry m holds the state produced by
/// iteration m.
template <class State, class Source, class Step, class Converged>
IterateResult<State> iterate(Step&& step, const Source& data, std::size_t p,
                             State init, Converged&& converged,
                             std::size_t max_iter,
                             LedgerOptions options = {}) {
  if (max_iter < 1) {
    throw Error(ErrorKind::kArgument, "max_iter must be >= 1");
  }
  IterateResult<State> result{std::move(init),
                              IterationLedger<State>(std::move(options)),
                              false, nullptr};
  for (std::size_t iteration = 1; iteration <= max_iter; ++iteration) {
    try {
      StepOutcome<State> outcome = step(std::as_const(result.state), data, p);
      result.state = std::move(outcome.state);
      result.ledger.append(iteration, result.state, outcome.diagnostic);
    } catch (...) {
      result.failure = std::current_exception();
      return result;
    }
    if (converged(std::as_const(result.ledger))) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace madfold
