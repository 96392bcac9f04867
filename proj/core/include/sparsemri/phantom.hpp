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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsemri/types.hpp"

namespace sparsemri {

/// Ground-truth proton density (normalized to [0, 1]) and T1 (ms) maps.
/// Background pixels (pd == 0) carry the T1 floor of 1 ms.
struct TissueMaps {
  Image pd;
  Image t1;

  GridShape shape() const { return {pd.rows(), pd.cols()}; }
  /// 1 where pd > 0.
  std::vector<std::uint8_t> foreground() const;
  /// Mean T1 over foreground pixels.
  double mean_t1() const;
  /// Maximum T1 over foreground pixels.
  double max_t1() const;
  /// Throws unless pd >= 0, t1 > 0 everywhere and the shapes agree.
  void validate() const;
};

inline constexpr double kBackgroundT1Ms = 1.0;

/// T1 values (ms) assigned by ascending rank of the distinct non-zero PD
/// levels of the synthetic phantoms. Levels beyond the table reuse its last
/// entry.
inline constexpr double kPhantomT1TableMs[] = {200.0, 400.0, 600.0, 900.0, 1200.0, 1600.0, 2000.0};

enum class PhantomKind { shepp_logan, piecewise, file };

std::string to_string(PhantomKind kind);
PhantomKind parse_phantom_kind(std::string_view name);

struct PhantomSpec {
  PhantomKind kind = PhantomKind::shepp_logan;
  Index size = 128;
  /// Accepted for interface symmetry; the synthetic phantoms are fixed.
  std::uint64_t seed = 0;
  std::filesystem::path pd_file;
  std::filesystem::path t1_file;
  /// Milliseconds per gray level of the T1 image (file kind).
  double t1_scale_ms = 1.0;
};

/// Ten-ellipse Shepp-Logan head phantom (original intensities) sampled at
/// pixel centres, normalized to [0, 1], with T1 from kPhantomT1TableMs.
TissueMaps make_shepp_logan(Index size);

/// Nested rectangles with four tissue classes; a small, well-conditioned
/// piecewise-constant test object.
TissueMaps make_piecewise_phantom(Index size);

/// Loads a PD/T1 pair of grayscale PGM images. PD is normalized by its
/// maximum; T1 is gray level times `t1_scale_ms` wherever PD > 0.
TissueMaps load_phantom(const std::filesystem::path& pd_file,
                        const std::filesystem::path& t1_file, double t1_scale_ms = 1.0);

/// Throws ParameterError for size < 16 (synthetic kinds).
TissueMaps make_phantom(const PhantomSpec& spec);

/// T1 assignment shared by the synthetic phantoms.
Image assign_t1_by_pd_rank(const Image& pd);

}  // namespace sparsemri
