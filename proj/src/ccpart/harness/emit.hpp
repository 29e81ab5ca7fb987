// Copyright 2026 The ccpart Authors
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

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ccpart::harness {

using Value = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  // Column roles for the plot-data sidecar ("x", "y", "err", "group", "meta").
  // Empty means "meta" for every column.
  std::vector<std::string> roles;
  std::vector<std::vector<Value>> rows;

  void add_row(std::vector<Value> row);
  std::size_t column(const std::string& name) const;  // throws kInvalidArgument
};

enum class Format { kCsv, kPlotData };

// Doubles as %.17g (nan, inf, -inf spelled out), strings quoted when needed.
std::string format_value(const Value& v);
std::string to_csv(const Table& t);
std::string columns_json(const Table& t);

// Writes path; kPlotData also writes path + ".columns.json". Throws kIoError.
void emit(const Table& t, const std::string& path, Format format = Format::kCsv);
void write_text(const std::string& path, const std::string& text);

// RFC-4180 reader: rows of raw fields, header included.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::vector<std::vector<std::string>> read_csv_file(const std::string& path);
double parse_double(const std::string& field);  // throws kParseError

}  // namespace ccpart::harness
