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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace madfold {

/// Seeded 64-bit hash of a byte string (MurmurHash64A mixing).
std::uint64_t hash64(std::string_view bytes, std::uint64_t seed);

/// Seeded hash of a row of reals by value; -0.0 and 0.0 hash alike.
std::uint64_t hash_reals(std::span<const double> values, std::uint64_t seed);

/// SplitMix64 finalizer, used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x);

/// Maps a hash to a uniform double in the open interval (0, 1).
double unit_interval(std::uint64_t h);

}  // namespace madfold
