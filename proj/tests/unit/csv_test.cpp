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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sparsemri/csv.hpp"
#include "sparsemri/error.hpp"

namespace sparsemri {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CsvQuote, Rfc4180) {
  EXPECT_EQ(csv_quote("plain"), "plain");
  EXPECT_EQ(csv_quote("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_quote("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv_quote(""), "");
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.0, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(CsvWriter, CrlfRows) {
  const auto p = std::filesystem::temp_directory_path() / "sparsemri_csv_writer.csv";
  {
    CsvWriter w(p);
    w.row({"k", "label"});
    w.row({"1", "a,b"});
  }
  EXPECT_EQ(slurp(p), "k,label\r\n1,\"a,b\"\r\n");
  std::filesystem::remove(p);
}

TEST(ReadNumericCsv, HeaderSkipped) {
  const auto p = std::filesystem::temp_directory_path() / "sparsemri_csv_read.csv";
  std::ofstream(p) << "a,b\n1,2.5\n-3,4e-2\n";
  const Matrix m = read_numeric_csv(p);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_EQ(m(0, 1), 2.5);
  EXPECT_EQ(m(1, 0), -3.0);
  EXPECT_EQ(m(1, 1), 0.04);
  std::filesystem::remove(p);
}

TEST(ReadNumericCsv, Errors) {
  const auto p = std::filesystem::temp_directory_path() / "sparsemri_csv_bad.csv";
  std::ofstream(p) << "1,2\n3\n";
  EXPECT_THROW(read_numeric_csv(p), InputError);
  std::ofstream(p) << "1,2\n3,x\n";
  EXPECT_THROW(read_numeric_csv(p), InputError);
  std::filesystem::remove(p);
  EXPECT_THROW(read_numeric_csv(p), InputError);
}

}  // namespace
}  // namespace sparsemri
