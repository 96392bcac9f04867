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

#include "sparsemri/transforms.hpp"

#include <cmath>
#include <vector>

#include "sparsemri/error.hpp"
#include "sparsemri/linalg.hpp"

namespace sparsemri {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// One analysis level on the first `len` samples of a strided line.
void haar_step(double* line, Index stride, Index len, std::vector<double>& scratch) {
  const Index pairs = len / 2;
  const Index approx = (len + 1) / 2;
  scratch.resize(static_cast<std::size_t>(len));
  double* out = scratch.data();
  for (Index i = 0; i < pairs; ++i) {
    const double a = line[2 * i * stride];
    const double b = line[(2 * i + 1) * stride];
    out[i] = (a + b) * kInvSqrt2;
    out[approx + i] = (a - b) * kInvSqrt2;
  }
  if (len % 2 != 0) out[pairs] = line[(len - 1) * stride];
  for (Index i = 0; i < len; ++i) line[i * stride] = out[i];
}

void haar_unstep(double* line, Index stride, Index len, std::vector<double>& scratch) {
  const Index pairs = len / 2;
  const Index approx = (len + 1) / 2;
  scratch.resize(static_cast<std::size_t>(len));
  double* out = scratch.data();
  for (Index i = 0; i < pairs; ++i) {
    const double a = line[i * stride];
    const double d = line[(approx + i) * stride];
    out[2 * i] = (a + d) * kInvSqrt2;
    out[2 * i + 1] = (a - d) * kInvSqrt2;
  }
  if (len % 2 != 0) out[len - 1] = line[pairs * stride];
  for (Index i = 0; i < len; ++i) line[i * stride] = out[i];
}

struct Level {
  Index rows;
  Index cols;
};

std::vector<Level> haar_levels(GridShape shape) {
  std::vector<Level> levels;
  Index r = shape.rows;
  Index c = shape.cols;
  while (r > 1 || c > 1) {
    levels.push_back({r, c});
    if (r > 1) r = (r + 1) / 2;
    if (c > 1) c = (c + 1) / 2;
  }
  return levels;
}

void check_size(const char* context, Index expected, Index actual) {
  if (expected != actual) {
    throw_dimension(context, static_cast<std::size_t>(expected),
                    static_cast<std::size_t>(actual));
  }
}

}  // namespace

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::identity: return "identity";
    case TransformKind::finite_difference_2d: return "finite-difference-2d";
    case TransformKind::haar_wavelet_2d: return "haar-wavelet-2d";
  }
  return "unknown";
}

TransformKind parse_transform_kind(std::string_view name) {
  if (name == "identity") return TransformKind::identity;
  if (name == "finite-difference-2d" || name == "fd" || name == "tv") {
    return TransformKind::finite_difference_2d;
  }
  if (name == "haar-wavelet-2d" || name == "haar") return TransformKind::haar_wavelet_2d;
  throw ParameterError("unknown transform kind '" + std::string(name) + "'");
}

AnalysisOperator AnalysisOperator::identity(Index length) {
  if (length <= 0) throw ParameterError("identity operator: length must be positive");
  return AnalysisOperator(TransformKind::identity, {1, length});
}

AnalysisOperator AnalysisOperator::finite_difference_2d(GridShape shape) {
  if (shape.rows <= 0 || shape.cols <= 0) {
    throw ParameterError("finite-difference operator: grid dimensions must be positive");
  }
  return AnalysisOperator(TransformKind::finite_difference_2d, shape);
}

AnalysisOperator AnalysisOperator::haar_wavelet_2d(GridShape shape) {
  if (shape.rows <= 0 || shape.cols <= 0) {
    throw ParameterError("Haar operator: grid dimensions must be positive");
  }
  return AnalysisOperator(TransformKind::haar_wavelet_2d, shape);
}

AnalysisOperator AnalysisOperator::make(TransformKind kind, GridShape shape) {
  switch (kind) {
    case TransformKind::identity: return identity(shape.size());
    case TransformKind::finite_difference_2d: return finite_difference_2d(shape);
    case TransformKind::haar_wavelet_2d: return haar_wavelet_2d(shape);
  }
  throw ParameterError("unknown transform kind");
}

Index AnalysisOperator::coeff_length() const {
  return kind_ == TransformKind::finite_difference_2d ? 2 * shape_.size() : shape_.size();
}

void AnalysisOperator::haar_forward(double* grid) const {
  thread_local std::vector<double> scratch;
  const Index width = shape_.cols;
  for (const Level& lv : haar_levels(shape_)) {
    if (lv.cols > 1) {
      for (Index i = 0; i < lv.rows; ++i) haar_step(grid + i * width, 1, lv.cols, scratch);
    }
    if (lv.rows > 1) {
      for (Index j = 0; j < lv.cols; ++j) haar_step(grid + j, width, lv.rows, scratch);
    }
  }
}

void AnalysisOperator::haar_inverse(double* grid) const {
  thread_local std::vector<double> scratch;
  const Index width = shape_.cols;
  const auto levels = haar_levels(shape_);
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    if (it->rows > 1) {
      for (Index j = 0; j < it->cols; ++j) haar_unstep(grid + j, width, it->rows, scratch);
    }
    if (it->cols > 1) {
      for (Index i = 0; i < it->rows; ++i) haar_unstep(grid + i * width, 1, it->cols, scratch);
    }
  }
}

Vector AnalysisOperator::analyze(const Vector& x) const {
  check_size("analyze", input_size(), x.size());
  switch (kind_) {
    case TransformKind::identity:
      return x;
    case TransformKind::haar_wavelet_2d: {
      Vector z = x;
      haar_forward(z.data());
      return z;
    }
    case TransformKind::finite_difference_2d: {
      const Index r = shape_.rows;
      const Index c = shape_.cols;
      const Index n = shape_.size();
      Vector z = Vector::Zero(2 * n);
      for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < c; ++j) {
          const Index k = i * c + j;
          if (j + 1 < c) z[k] = x[k + 1] - x[k];
          if (i + 1 < r) z[n + k] = x[k + c] - x[k];
        }
      }
      return z;
    }
  }
  return {};
}

Vector AnalysisOperator::synthesize(const Vector& z) const {
  check_size("synthesize", coeff_length(), z.size());
  switch (kind_) {
    case TransformKind::identity:
      return z;
    case TransformKind::haar_wavelet_2d: {
      Vector x = z;
      haar_inverse(x.data());
      return x;
    }
    case TransformKind::finite_difference_2d: {
      const Index r = shape_.rows;
      const Index c = shape_.cols;
      const Index n = shape_.size();
      Vector x = Vector::Zero(n);
      for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < c; ++j) {
          const Index k = i * c + j;
          if (j + 1 < c) {
            x[k] -= z[k];
            x[k + 1] += z[k];
          }
          if (i + 1 < r) {
            x[k] -= z[n + k];
            x[k + c] += z[n + k];
          }
        }
      }
      return x;
    }
  }
  return {};
}

Matrix AnalysisOperator::dense() const {
  const Index n = input_size();
  if (n > 4096) throw ParameterError("dense(): operator too large to materialize");
  Matrix psi(coeff_length(), n);
  Vector e = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    psi.col(j) = analyze(e);
    e[j] = 0.0;
  }
  return psi;
}

double AnalysisOperator::gram_max_eigenvalue(int iterations, std::uint64_t seed) const {
  // Psi^T Psi and Psi Psi^T share their nonzero spectrum; iterate on the
  // signal side.
  return power_iteration(
      input_size(), [this](const Vector& v) { return synthesize(analyze(v)); }, iterations, seed);
}

}  // namespace sparsemri
