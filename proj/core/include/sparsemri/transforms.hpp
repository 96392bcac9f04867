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
#include <string>
#include <string_view>

#include "sparsemri/types.hpp"

namespace sparsemri {

enum class TransformKind { identity, finite_difference_2d, haar_wavelet_2d };

std::string to_string(TransformKind kind);
TransformKind parse_transform_kind(std::string_view name);

/// A sparsifying transform Psi applied matrix-free. `analyze` computes Psi x,
/// `synthesize` computes Psi^T z and is the exact adjoint of `analyze`.
///
/// Layouts:
///  - identity: coefficients equal the signal.
///  - finite_difference_2d: rows*cols horizontal first differences followed by
///    rows*cols vertical first differences, row-major. The difference leaving
///    the grid is zero (Neumann boundary), so coeff_length = 2*rows*cols.
///  - haar_wavelet_2d: orthonormal pyramid Haar decomposition stored in place
///    (approximation in the top-left corner). Odd-length blocks carry their
///    last sample into the approximation unchanged, so any grid size is
///    accepted and the transform stays orthonormal. A 1 x n grid gives the
///    1-D Haar transform.
///
/// Instances are immutable; all member functions are safe to call
/// concurrently.
class AnalysisOperator {
 public:
  static AnalysisOperator identity(Index length);
  static AnalysisOperator finite_difference_2d(GridShape shape);
  static AnalysisOperator haar_wavelet_2d(GridShape shape);
  static AnalysisOperator haar_wavelet_1d(Index length) { return haar_wavelet_2d({1, length}); }
  static AnalysisOperator make(TransformKind kind, GridShape shape);

  TransformKind kind() const { return kind_; }
  GridShape input_shape() const { return shape_; }
  Index input_size() const { return shape_.size(); }
  Index coeff_length() const;

  Vector analyze(const Vector& x) const;
  Vector synthesize(const Vector& z) const;

  /// Dense coeff_length x input_size matrix of Psi, built column by column
  /// from the matrix-free action. Limited to inputs of at most 4096 samples.
  Matrix dense() const;

  /// Largest eigenvalue of Psi Psi^T by power iteration from a seeded
  /// Gaussian start vector.
  double gram_max_eigenvalue(int iterations = 100, std::uint64_t seed = 0) const;

 private:
  AnalysisOperator(TransformKind kind, GridShape shape) : kind_(kind), shape_(shape) {}

  // In place on a row-major grid.
  void haar_forward(double* grid) const;
  void haar_inverse(double* grid) const;

  TransformKind kind_;
  GridShape shape_;
};

}  // namespace sparsemri
