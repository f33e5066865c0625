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

#include "madfold/cli/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "madfold/error.hpp"

namespace madfold::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_real(const std::string& cell) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
  return value;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
  auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) {
    throw Error(ErrorKind::kData, "column '" + name + "' not found in CSV header");
  }
  return static_cast<std::size_t>(it - table.header.begin());
}

const std::string& cell_at(const CsvTable& table, std::size_t row, std::size_t col) {
  const auto& cells = table.rows[row];
  if (col >= cells.size()) {
    throw Error(ErrorKind::kParse, "row " + std::to_string(row + 1) + " has " +
                                       std::to_string(cells.size()) +
                                       " cells, column '" + table.header[col] +
                                       "' is missing");
  }
  return cells[col];
}

double numeric_cell(const CsvTable& table, std::size_t row, std::size_t col) {
  const std::string& cell = cell_at(table, row, col);
  const auto value = parse_real(cell);
  if (!value) {
    throw Error(ErrorKind::kParse, "cannot parse \"" + cell + "\" as a number at row " +
                                       std::to_string(row + 1) + ", column '" +
                                       table.header[col] + "'");
  }
  if (!std::isfinite(*value)) {
    throw Error(ErrorKind::kNumeric, "non-finite value \"" + cell + "\" at row " +
                                         std::to_string(row + 1) + ", column '" +
                                         table.header[col] + "'");
  }
  return *value;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

CsvTable parse_csv(const std::string& text, bool has_header) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;       // inside a quoted field
  bool was_quoted = false;   // current field started with a quote
  bool any = false;          // current record has content

  auto end_field = [&] {
    record.push_back(was_quoted ? field : trim(field));
    field.clear();
    was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (any) records.push_back(std::move(record));
    record.clear();
    any = false;
  };

  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (trim(field).empty()) {
          field.clear();
          quoted = true;
          was_quoted = true;
          any = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        if (c != ' ' && c != '\t') any = true;
    }
  }
  if (quoted) {
    throw Error(ErrorKind::kParse, "unterminated quoted field near line " +
                                       std::to_string(line));
  }
  end_record();

  CsvTable table;
  if (has_header) {
    if (records.empty()) throw Error(ErrorKind::kParse, "CSV has no header row");
    table.header = std::move(records.front());
    records.erase(records.begin());
  } else {
    const std::size_t width = records.empty() ? 0 : records.front().size();
    for (std::size_t j = 0; j < width; ++j) table.header.push_back("c" + std::to_string(j));
  }
  table.rows = std::move(records);
  return table;
}

CsvTable read_csv(const std::string& path, bool has_header) {
  return parse_csv(slurp(path), has_header);
}

Dataset table_to_dataset(const CsvTable& table, const DatasetSpec& spec) {
  std::optional<std::size_t> label;
  if (spec.label_column) label = column_index(table, *spec.label_column);

  std::vector<std::size_t> columns;
  std::vector<std::string> names;
  if (!spec.feature_columns.empty()) {
    for (const auto& name : spec.feature_columns) {
      columns.push_back(column_index(table, name));
      names.push_back(name);
    }
  } else {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (label && j == *label) continue;
      // the first row decides, so a stray bad cell later is an error, not a
      // silently dropped column
      const bool numeric = table.rows.empty() ||
                           (j < table.rows[0].size() && parse_real(table.rows[0][j]).has_value());
      if (numeric) {
        columns.push_back(j);
        names.push_back(table.header[j]);
      }
    }
  }
  if (spec.add_intercept) names.insert(names.begin(), "intercept");
  if (names.empty()) {
    throw Error(ErrorKind::kData, "no numeric feature columns selected");
  }

  const std::size_t d = names.size();
  std::vector<double> features;
  features.reserve(table.rows.size() * d);
  std::optional<std::vector<double>> labels;
  if (label) labels.emplace().reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (spec.add_intercept) features.push_back(1.0);
    for (std::size_t col : columns) features.push_back(numeric_cell(table, r, col));
    if (label) labels->push_back(numeric_cell(table, r, *label));
  }
  return Dataset(d, std::move(features), std::move(labels), std::move(names));
}

Dataset ingest_csv(const DatasetSpec& spec) {
  return table_to_dataset(read_csv(spec.path, spec.has_header), spec);
}

ItemColumn ingest_items(const std::string& path, bool has_header,
                        const std::optional<std::string>& column) {
  const CsvTable table = read_csv(path, has_header);
  const std::size_t col = column ? column_index(table, *column) : 0;
  std::vector<std::string> items;
  items.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    items.push_back(cell_at(table, r, col));
  }
  return ItemColumn(std::move(items));
}

}  // namespace madfold::cli
