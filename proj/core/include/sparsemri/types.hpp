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

#include <complex>
#include <cstdint>
#include <variant>

#include <Eigen/Dense>

namespace sparsemri {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;

/// Row-major image. Fields are flattened in row-major order whenever they are
/// handed to a solver as a Signal.
using Image = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GridShape {
  Index rows = 0;
  Index cols = 0;

  Index size() const { return rows * cols; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Measurements are real for the matrix-based models and complex for K-space.
using Measurement = std::variant<Vector, ComplexVector>;

Index measurement_size(const Measurement& y);
bool is_complex(const Measurement& y);

/// a - b; both operands must hold the same alternative and length.
Measurement subtract(const Measurement& a, const Measurement& b);
double squared_norm(const Measurement& y);

Vector flatten(const Image& image);
Image unflatten(const Vector& values, GridShape shape);

/// Relative l2 error ||truth - estimate|| / ||truth||. Throws
/// DegenerateInputError when truth is identically zero.
double nmse(const Vector& truth, const Vector& estimate);
double nmse(const Image& truth, const Image& estimate);

}  // namespace sparsemri
