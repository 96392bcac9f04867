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
#include <vector>

#include "sparsemri/types.hpp"

namespace sparsemri {

/// Boolean K-space selection R on an unshifted DFT grid: the zero frequency
/// sits at (0, 0) and is always selected.
class SamplingMask {
 public:
  SamplingMask(GridShape shape, std::vector<std::uint8_t> selected);

  static SamplingMask full(GridShape shape);

  GridShape shape() const { return shape_; }
  bool selected(Index row, Index col) const {
    return selected_[static_cast<std::size_t>(row * shape_.cols + col)] != 0;
  }
  const std::vector<std::uint8_t>& pattern() const { return selected_; }
  Index count() const { return static_cast<Index>(indices_.size()); }
  double fraction() const { return static_cast<double>(count()) / static_cast<double>(shape_.size()); }

  /// Row-major flat indices of the selected locations, ascending.
  const std::vector<Index>& indices() const { return indices_; }

  /// R: keep the selected entries of a full grid, in ascending index order.
  ComplexVector restrict(const ComplexVector& grid) const;
  /// R^T: scatter samples back onto a zero-filled full grid.
  ComplexVector embed(const ComplexVector& samples) const;

 private:
  GridShape shape_;
  std::vector<std::uint8_t> selected_;
  std::vector<Index> indices_;
};

/// Distance of a grid location from the zero frequency, using wrapped
/// (signed) frequency indices.
double frequency_radius(GridShape shape, Index row, Index col);

/// Variable-density random mask. Each location is weighted by
/// (1 - d/d_max)^density_power, d its distance from the zero frequency, and
/// exactly round(fraction * N) locations are drawn by weighted sampling without
/// replacement (exponential-key method). DC is always included. Deterministic
/// given `seed`.
SamplingMask generate_mask(GridShape shape, double fraction, double density_power,
                           std::uint64_t seed);

}  // namespace sparsemri
