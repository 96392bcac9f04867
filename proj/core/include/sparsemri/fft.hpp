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

#include <memory>

#include "sparsemri/types.hpp"

namespace sparsemri {

/// Unitary 2-D DFT on row-major complex grids: both directions are scaled by
/// 1/sqrt(rows*cols), so ||F x|| = ||x||. Plans are built once per instance;
/// transforms may run concurrently from any number of threads.
class UnitaryFft2d {
 public:
  explicit UnitaryFft2d(GridShape shape);
  ~UnitaryFft2d();
  UnitaryFft2d(const UnitaryFft2d&) = delete;
  UnitaryFft2d& operator=(const UnitaryFft2d&) = delete;

  GridShape shape() const { return shape_; }

  ComplexVector forward(const ComplexVector& grid) const;
  ComplexVector inverse(const ComplexVector& spectrum) const;

 private:
  struct Plans;
  GridShape shape_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace sparsemri
