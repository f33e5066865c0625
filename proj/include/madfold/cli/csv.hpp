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
#include <optional>
#include <string>
#include <vector>

#include "madfold/dataset.hpp"

namespace madfold::cli {

/// Raw cells of an RFC-4180-style CSV file ('"' quoting, "" escapes,
/// CRLF or LF line ends).
struct CsvTable {
  std::vector<std::string> header;  // c0, c1, ... when the file has none
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& text, bool has_header);
CsvTable read_csv(const std::string& path, bool has_header);

struct DatasetSpec {
  std::string path;
  bool has_header = true;
  std::optional<std::string> label_column;
  // Empty selects every column except the label whose first data cell
  // parses as a number.
  std::vector<std::string> feature_columns;
  bool add_intercept = false;
};

/// Builds a Dataset from the selected columns. Errors name the 1-based data
/// row and the column of the offending cell.
Dataset ingest_csv(const DatasetSpec& spec);
Dataset table_to_dataset(const CsvTable& table, const DatasetSpec& spec);

/// One text column as sketch items (cells are taken verbatim, trimmed).
ItemColumn ingest_items(const std::string& path, bool has_header,
                        const std::optional<std::string>& column);

}  // namespace madfold::cli
