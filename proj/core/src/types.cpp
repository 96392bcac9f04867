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

#include "sparsemri/types.hpp"

#include <string>

#include "sparsemri/error.hpp"

namespace sparsemri {

Index measurement_size(const Measurement& y) {
  return std::visit([](const auto& v) { return v.size(); }, y);
}

bool is_complex(const Measurement& y) { return std::holds_alternative<ComplexVector>(y); }

Measurement subtract(const Measurement& a, const Measurement& b) {
  if (a.index() != b.index()) {
    throw DimensionError("subtract: cannot mix real and complex measurements");
  }
  if (measurement_size(a) != measurement_size(b)) {
    throw_dimension("subtract", static_cast<std::size_t>(measurement_size(a)),
                    static_cast<std::size_t>(measurement_size(b)));
  }
  if (const auto* ra = std::get_if<Vector>(&a)) {
    return Vector(*ra - std::get<Vector>(b));
  }
  return ComplexVector(std::get<ComplexVector>(a) - std::get<ComplexVector>(b));
}

double squared_norm(const Measurement& y) {
  return std::visit([](const auto& v) { return v.squaredNorm(); }, y);
}

Vector flatten(const Image& image) {
  return Eigen::Map<const Vector>(image.data(), image.size());
}

Image unflatten(const Vector& values, GridShape shape) {
  if (values.size() != shape.size()) {
    throw_dimension("unflatten", static_cast<std::size_t>(shape.size()),
                    static_cast<std::size_t>(values.size()));
  }
  return Eigen::Map<const Image>(values.data(), shape.rows, shape.cols);
}

double nmse(const Vector& truth, const Vector& estimate) {
  if (truth.size() != estimate.size()) {
    throw_dimension("nmse", static_cast<std::size_t>(truth.size()),
                    static_cast<std::size_t>(estimate.size()));
  }
  const double denom = truth.norm();
  if (denom == 0.0) {
    throw DegenerateInputError("nmse: reference field is identically zero");
  }
  return (truth - estimate).norm() / denom;
}

double nmse(const Image& truth, const Image& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw DimensionError("nmse: image shapes differ");
  }
  return nmse(flatten(truth), flatten(estimate));
}

}  // namespace sparsemri
