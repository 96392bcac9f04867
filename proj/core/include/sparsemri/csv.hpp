// Copyright 2026 The sparsemri Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "sparsemri/types.hpp"

namespace sparsemri {

/// RFC 4180 field quoting: fields containing a comma, double quote, CR or LF
/// are wrapped in double quotes with embedded quotes doubled.
std::string csv_quote(std::string_view field);

/// Shortest representation that round-trips to the same double.
std::string format_double(double value);

/// Reads a purely numeric CSV into a matrix. A first row that does not parse
/// as numbers is treated as a header and skipped; rows must have equal width.
Matrix read_numeric_csv(const std::filesystem::path& path);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
};

}  // namespace sparsemri
