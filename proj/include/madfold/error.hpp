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
#include <stdexcept>
#include <string>
#include <string_view>

namespace madfold {

enum class ErrorKind {
  kArgument,
  kDimension,
  kNumeric,
  kData,
  kEmptyInput,
  kDegreesOfFreedom,
  kNotPsd,
  kPerfectSeparation,
  kDivergence,
  kMerge,
  kParse,
  kIo,
  kSizing,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so that front ends can
// map it to exit codes and machine-readable error objects.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void throw_dimension(std::string_view what, std::size_t expected,
                                  std::size_t actual);

}  // namespace madfold
