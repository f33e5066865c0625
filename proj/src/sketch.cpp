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

#include "madfold/sketch.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "madfold/error.hpp"
#include "madfold/hash.hpp"

namespace madfold {

namespace {

constexpr std::uint16_t kFormatVersion = 1;
constexpr std::array<char, 4> kCountMinMagic{'M', 'F', 'C', 'M'};
constexpr std::array<char, 4> kFmMagic{'M', 'F', 'F', 'M'};

void write_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

void write_u16(std::ostream& out, std::uint16_t v) {
  const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(bytes, 2);
}

std::uint64_t read_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw Error(ErrorKind::kParse, "truncated sketch file");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes[i]) << (8 * i);
  return v;
}

std::uint16_t read_u16(std::istream& in) {
  unsigned char bytes[2];
  if (!in.read(reinterpret_cast<char*>(bytes), 2)) {
    throw Error(ErrorKind::kParse, "truncated sketch file");
  }
  return static_cast<std::uint16_t>(bytes[0] | (bytes[1] << 8));
}

void write_header(std::ostream& out, const std::array<char, 4>& magic) {
  out.write(magic.data(), magic.size());
  write_u16(out, kFormatVersion);
}

void read_header(std::istream& in, const std::array<char, 4>& magic) {
  std::array<char, 4> got{};
  if (!in.read(got.data(), got.size()) || got != magic) {
    throw Error(ErrorKind::kParse, std::string("not a ") +
                                       std::string(magic.data(), magic.size()) +
                                       " sketch file");
  }
  const auto version = read_u16(in);
  if (version != kFormatVersion) {
    throw Error(ErrorKind::kParse,
                "unsupported sketch file version " + std::to_string(version));
  }
}

}  // namespace

CountMinParams CountMinParams::from_error(double eps, double delta, std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::kArgument, "Count-Min eps and delta must lie in (0, 1)");
  }
  CountMinParams params;
  params.width = static_cast<std::size_t>(std::ceil(std::numbers::e / eps));
  params.depth = static_cast<std::size_t>(std::ceil(std::log(1.0 / delta)));
  params.depth = std::max<std::size_t>(params.depth, 1);
  params.seed = seed;
  return params;
}

CountMinSketch::CountMinSketch(CountMinParams params) : params_(params) {
  if (params_.depth < 1 || params_.width < 1) {
    throw Error(ErrorKind::kArgument, "Count-Min depth and width must be >= 1");
  }
  row_seeds_.resize(params_.depth);
  std::uint64_t s = params_.seed;
  for (auto& row_seed : row_seeds_) {
    s = mix64(s);
    row_seed = s;
  }
  counters_.assign(params_.depth * params_.width, 0);
}

std::size_t CountMinSketch::bucket(std::size_t row, std::string_view item) const {
  return static_cast<std::size_t>(hash64(item, row_seeds_[row]) % params_.width);
}

void CountMinSketch::update(std::string_view item, std::uint64_t count) {
  if (count == 0) throw Error(ErrorKind::kArgument, "Count-Min update count must be >= 1");
  for (std::size_t r = 0; r < params_.depth; ++r) {
    counters_[r * params_.width + bucket(r, item)] += count;
  }
  total_ += count;
}

std::uint64_t CountMinSketch::estimate(std::string_view item) const {
  if (params_.depth == 0) return 0;
  std::uint64_t best = UINT64_MAX;
  for (std::size_t r = 0; r < params_.depth; ++r) {
    best = std::min(best, counters_[r * params_.width + bucket(r, item)]);
  }
  return best;
}

void CountMinSketch::merge(const CountMinSketch& other) {
  if (!(params_ == other.params_)) {
    throw Error(ErrorKind::kMerge,
                "Count-Min sketches differ in depth, width or seed");
  }
  for (std::size_t i = 0; i < counters_.size(); ++i) counters_[i] += other.counters_[i];
  total_ += other.total_;
}

void CountMinSketch::save(std::ostream& out) const {
  write_header(out, kCountMinMagic);
  write_u64(out, params_.depth);
  write_u64(out, params_.width);
  write_u64(out, params_.seed);
  write_u64(out, total_);
  for (auto c : counters_) write_u64(out, c);
  if (!out) throw Error(ErrorKind::kIo, "failed to write Count-Min sketch");
}

CountMinSketch CountMinSketch::load(std::istream& in) {
  read_header(in, kCountMinMagic);
  CountMinParams params;
  params.depth = read_u64(in);
  params.width = read_u64(in);
  params.seed = read_u64(in);
  if (params.depth == 0 || params.width == 0 || params.depth > (1u << 16) ||
      params.width > (std::size_t{1} << 32)) {
    throw Error(ErrorKind::kParse, "implausible Count-Min dimensions in sketch file");
  }
  CountMinSketch sketch(params);
  sketch.total_ = read_u64(in);
  for (auto& c : sketch.counters_) c = read_u64(in);
  return sketch;
}

CountMinSketch cm_merge(CountMinSketch a, const CountMinSketch& b) {
  a.merge(b);
  return a;
}

FlajoletMartinSketch::FlajoletMartinSketch(std::size_t num_bitmaps, std::uint64_t seed)
    : seed_(seed), bitmaps_(num_bitmaps, 0) {
  if (num_bitmaps < 1) throw Error(ErrorKind::kArgument, "FM needs at least one bitmap");
}

void FlajoletMartinSketch::update(std::string_view item) {
  const std::uint64_t h = hash64(item, seed_);
  const std::uint64_t m = bitmaps_.size();
  const std::uint64_t rest = h / m;
  const int rho = rest == 0 ? 63 : std::min(std::countr_zero(rest), 63);
  bitmaps_[h % m] |= std::uint64_t{1} << rho;
  items_seen_ = true;
}

void FlajoletMartinSketch::merge(const FlajoletMartinSketch& other) {
  if (bitmaps_.size() != other.bitmaps_.size() || seed_ != other.seed_) {
    throw Error(ErrorKind::kMerge, "FM sketches differ in bitmap count or seed");
  }
  for (std::size_t j = 0; j < bitmaps_.size(); ++j) bitmaps_[j] |= other.bitmaps_[j];
  items_seen_ = items_seen_ || other.items_seen_;
}

double FlajoletMartinSketch::raw_estimate() const {
  const double m = static_cast<double>(bitmaps_.size());
  double sum = 0.0;
  for (auto b : bitmaps_) sum += std::countr_one(b);
  return m / kFmPhi * std::exp2(sum / m);
}

double FlajoletMartinSketch::estimate() const {
  if (!items_seen_) return 0.0;
  const auto empty = std::count(bitmaps_.begin(), bitmaps_.end(), std::uint64_t{0});
  const double m = static_cast<double>(bitmaps_.size());
  if (empty > 0) return m * std::log(m / static_cast<double>(empty));
  return raw_estimate();
}

void FlajoletMartinSketch::save(std::ostream& out) const {
  write_header(out, kFmMagic);
  write_u64(out, bitmaps_.size());
  write_u64(out, seed_);
  write_u64(out, items_seen_ ? 1 : 0);
  for (auto b : bitmaps_) write_u64(out, b);
  if (!out) throw Error(ErrorKind::kIo, "failed to write FM sketch");
}

FlajoletMartinSketch FlajoletMartinSketch::load(std::istream& in) {
  read_header(in, kFmMagic);
  const auto m = read_u64(in);
  if (m == 0 || m > (1u << 20)) {
    throw Error(ErrorKind::kParse, "implausible FM bitmap count in sketch file");
  }
  FlajoletMartinSketch sketch(static_cast<std::size_t>(m), read_u64(in));
  sketch.items_seen_ = read_u64(in) != 0;
  for (auto& b : sketch.bitmaps_) b = read_u64(in);
  return sketch;
}

FlajoletMartinSketch fm_merge(FlajoletMartinSketch a, const FlajoletMartinSketch& b) {
  a.merge(b);
  return a;
}

}  // namespace madfold
