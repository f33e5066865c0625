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

#include "madfold/fold.hpp"

namespace madfold {

std::vector<RowRange> partition_rows(std::size_t n_rows, std::size_t p) {
  if (p < 1) {
    throw Error(ErrorKind::kArgument, "worker count p must be >= 1");
  }
  const std::size_t base = n_rows / p;
  std::vector<RowRange> ranges(p);
  std::size_t start = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t len = (i + 1 == p) ? n_rows - start : base;
    ranges[i] = {start, start + len};
    start += len;
  }
  return ranges;
}

}  // namespace madfold
