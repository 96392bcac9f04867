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

#include "sparsemri/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "sparsemri/error.hpp"

namespace sparsemri {
namespace {

constexpr char kFieldMagic[8] = {'S', 'P', 'M', 'R', 'F', 'L', 'D', '1'};

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in, const std::filesystem::path& path) {
  std::string token;
  char ch = 0;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
      if (!token.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(ch);
  }
  if (token.empty()) throw InputError(path.string() + ": truncated PGM header");
  return token;
}

long parse_positive(const std::string& token, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const long v = std::stol(token, &used);
    if (used != token.size() || v <= 0) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw InputError(path.string() + ": invalid PGM header value '" + token + "'");
  }
}

template <class T>
void write_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <class T>
T read_le(std::istream& in, const std::filesystem::path& path) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw InputError(path.string() + ": truncated field file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  const std::string magic = next_token(in, path);
  if (magic != "P5" && magic != "P2") {
    throw InputError(path.string() + ": not a PGM file (magic '" + magic + "')");
  }
  const long cols = parse_positive(next_token(in, path), path);
  const long rows = parse_positive(next_token(in, path), path);
  const long maxval = parse_positive(next_token(in, path), path);
  if (maxval > 65535) throw InputError(path.string() + ": PGM maxval exceeds 65535");

  Image image(rows, cols);
  if (magic == "P2") {
    for (Index k = 0; k < image.size(); ++k) {
      long v = 0;
      if (!(in >> v) || v < 0 || v > maxval) {
        throw InputError(path.string() + ": bad or missing ASCII PGM sample");
      }
      image.data()[k] = static_cast<double>(v);
    }
    return image;
  }
  const std::size_t bytes_per = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(static_cast<std::size_t>(rows * cols) * bytes_per);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw InputError(path.string() + ": truncated PGM raster");
  }
  for (Index k = 0; k < image.size(); ++k) {
    const std::size_t o = static_cast<std::size_t>(k) * bytes_per;
    // 16-bit PGM samples are big-endian.
    const unsigned v = bytes_per == 1 ? raw[o] : (unsigned{raw[o]} << 8) | raw[o + 1];
    image.data()[k] = static_cast<double>(v);
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const Image& image) {
  auto out = open_for_write(path);
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  const double lo = image.size() ? image.minCoeff() : 0.0;
  const double hi = image.size() ? image.maxCoeff() : 0.0;
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  std::vector<unsigned char> raw(static_cast<std::size_t>(image.size()));
  for (Index k = 0; k < image.size(); ++k) {
    raw[static_cast<std::size_t>(k)] =
        static_cast<unsigned char>(std::lround(std::clamp((image.data()[k] - lo) * scale, 0.0, 255.0)));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_pgm16(const std::filesystem::path& path, const Image& image) {
  auto out = open_for_write(path);
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n65535\n";
  for (Index k = 0; k < image.size(); ++k) {
    const auto v = static_cast<unsigned>(std::lround(std::clamp(image.data()[k], 0.0, 65535.0)));
    const char hi = static_cast<char>((v >> 8) & 0xFF);
    const char lo = static_cast<char>(v & 0xFF);
    out.put(hi);
    out.put(lo);
  }
}

void write_field(const std::filesystem::path& path, const Image& values, const std::string& units) {
  auto out = open_for_write(path);
  out.write(kFieldMagic, sizeof(kFieldMagic));
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(values.rows()));
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(values.cols()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(units.size()));
  out.write(units.data(), static_cast<std::streamsize>(units.size()));
  for (Index k = 0; k < values.size(); ++k) write_le<double>(out, values.data()[k]);
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

FieldFile read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  char magic[sizeof(kFieldMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kFieldMagic, sizeof(magic)) != 0) {
    throw InputError(path.string() + ": not a field file");
  }
  const auto rows = read_le<std::uint64_t>(in, path);
  const auto cols = read_le<std::uint64_t>(in, path);
  const auto units_len = read_le<std::uint32_t>(in, path);
  if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20) || units_len > 4096) {
    throw InputError(path.string() + ": implausible field header");
  }
  FieldFile field;
  field.units.resize(units_len);
  if (!in.read(field.units.data(), units_len)) throw InputError(path.string() + ": truncated units");
  field.values.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index k = 0; k < field.values.size(); ++k) field.values.data()[k] = read_le<double>(in, path);
  return field;
}

}  // namespace sparsemri
