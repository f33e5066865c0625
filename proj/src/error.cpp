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

#include "madfold/error.hpp"

namespace madfold {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument: return "argument_error";
    case ErrorKind::kDimension: return "dimension_error";
    case ErrorKind::kNumeric: return "numeric_error";
    case ErrorKind::kData: return "data_error";
    case ErrorKind::kEmptyInput: return "empty_input_error";
    case ErrorKind::kDegreesOfFreedom: return "degrees_of_freedom_error";
    case ErrorKind::kNotPsd: return "not_psd_error";
    case ErrorKind::kPerfectSeparation: return "perfect_separation_error";
    case ErrorKind::kDivergence: return "divergence_error";
    case ErrorKind::kMerge: return "merge_error";
    case ErrorKind::kParse: return "parse_error";
    case ErrorKind::kIo: return "io_error";
    case ErrorKind::kSizing: return "sizing_error";
  }
  return "error";
}

void throw_dimension(std::string_view what, std::size_t expected,
                     std::size_t actual) {
  throw Error(ErrorKind::kDimension,
              std::string(what) + ": expected dimension " +
                  std::to_string(expected) + ", got " + std::to_string(actual));
}

}  // namespace madfold
