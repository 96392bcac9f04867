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
#include <string>

#include "sparsemri/types.hpp"

namespace sparsemri {

/// Reads a binary (P5, 8 or 16 bit) or ASCII (P2) portable graymap. Values
/// are returned as raw gray levels.
Image read_pgm(const std::filesystem::path& path);

/// Writes an 8-bit binary PGM, linearly mapping [min, max] of the image to
/// [0, 255]. A constant image is written as all zeros.
void write_pgm(const std::filesystem::path& path, const Image& image);

/// Writes a 16-bit binary PGM of raw values clamped to [0, 65535].
void write_pgm16(const std::filesystem::path& path, const Image& image);

/// Lossless field file: the 8-byte magic "SPMRFLD1", rows and cols as
/// little-endian uint64, a little-endian uint32 byte length followed by the
/// UTF-8 units string, then rows*cols little-endian float64 values in
/// row-major order.
struct FieldFile {
  Image values;
  std::string units;
};

void write_field(const std::filesystem::path& path, const Image& values, const std::string& units);
FieldFile read_field(const std::filesystem::path& path);

}  // namespace sparsemri
