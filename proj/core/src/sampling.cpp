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

#include "sparsemri/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "sparsemri/error.hpp"

namespace sparsemri {

SamplingMask::SamplingMask(GridShape shape, std::vector<std::uint8_t> selected)
    : shape_(shape), selected_(std::move(selected)) {
  if (shape_.rows <= 0 || shape_.cols <= 0) {
    throw ParameterError("SamplingMask: grid dimensions must be positive");
  }
  if (static_cast<Index>(selected_.size()) != shape_.size()) {
    throw_dimension("SamplingMask", static_cast<std::size_t>(shape_.size()), selected_.size());
  }
  if (selected_[0] == 0) {
    throw ParameterError("SamplingMask: the zero-frequency location must be selected");
  }
  for (Index k = 0; k < shape_.size(); ++k) {
    if (selected_[static_cast<std::size_t>(k)] != 0) indices_.push_back(k);
  }
}

SamplingMask SamplingMask::full(GridShape shape) {
  return SamplingMask(shape, std::vector<std::uint8_t>(static_cast<std::size_t>(shape.size()), 1));
}

ComplexVector SamplingMask::restrict(const ComplexVector& grid) const {
  if (grid.size() != shape_.size()) {
    throw_dimension("SamplingMask::restrict", static_cast<std::size_t>(shape_.size()),
                    static_cast<std::size_t>(grid.size()));
  }
  ComplexVector out(count());
  for (Index i = 0; i < count(); ++i) out[i] = grid[indices_[static_cast<std::size_t>(i)]];
  return out;
}

ComplexVector SamplingMask::embed(const ComplexVector& samples) const {
  if (samples.size() != count()) {
    throw_dimension("SamplingMask::embed", static_cast<std::size_t>(count()),
                    static_cast<std::size_t>(samples.size()));
  }
  ComplexVector grid = ComplexVector::Zero(shape_.size());
  for (Index i = 0; i < count(); ++i) grid[indices_[static_cast<std::size_t>(i)]] = samples[i];
  return grid;
}

double frequency_radius(GridShape shape, Index row, Index col) {
  const double fr = static_cast<double>(std::min(row, shape.rows - row));
  const double fc = static_cast<double>(std::min(col, shape.cols - col));
  return std::hypot(fr, fc);
}

SamplingMask generate_mask(GridShape shape, double fraction, double density_power,
                           std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ParameterError("generate_mask: fraction must lie in (0, 1]");
  }
  if (!(density_power >= 0.0)) {
    throw ParameterError("generate_mask: density_power must be non-negative");
  }
  if (shape.rows <= 0 || shape.cols <= 0) {
    throw ParameterError("generate_mask: grid dimensions must be positive");
  }
  const Index total = shape.size();
  const Index target =
      std::clamp<Index>(static_cast<Index>(std::llround(fraction * static_cast<double>(total))),
                        1, total);

  const double d_max = std::hypot(static_cast<double>(shape.rows) / 2.0,
                                  static_cast<double>(shape.cols) / 2.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  // Weighted sampling without replacement: the `target` largest keys
  // log(u)/w form the sample. Zero-weight locations get -inf and are drawn
  // last, in index order, only when the target count requires them.
  std::vector<double> key(static_cast<std::size_t>(total));
  for (Index i = 0; i < shape.rows; ++i) {
    for (Index j = 0; j < shape.cols; ++j) {
      const Index k = i * shape.cols + j;
      double u = uniform(rng);
      while (u <= 0.0) u = uniform(rng);
      const double ratio = std::max(0.0, 1.0 - frequency_radius(shape, i, j) / d_max);
      const double w = density_power == 0.0 ? 1.0 : std::pow(ratio, density_power);
      key[static_cast<std::size_t>(k)] =
          w > 0.0 ? std::log(u) / w : -std::numeric_limits<double>::infinity();
    }
  }
  key[0] = std::numeric_limits<double>::infinity();

  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return key[static_cast<std::size_t>(a)] > key[static_cast<std::size_t>(b)];
  });

  std::vector<std::uint8_t> selected(static_cast<std::size_t>(total), 0);
  for (Index i = 0; i < target; ++i) selected[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
  return SamplingMask(shape, std::move(selected));
}

}  // namespace sparsemri
