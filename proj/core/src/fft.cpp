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

#include "sparsemri/fft.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "sparsemri/error.hpp"

namespace sparsemri {
namespace {

// FFTW's planner is not re-entrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct UnitaryFft2d::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

UnitaryFft2d::UnitaryFft2d(GridShape shape) : shape_(shape), plans_(std::make_unique<Plans>()) {
  if (shape.rows <= 0 || shape.cols <= 0) {
    throw ParameterError("UnitaryFft2d: grid dimensions must be positive");
  }
  // Planning with FFTW_ESTIMATE | FFTW_UNALIGNED keeps the chosen codelets
  // independent of timing and buffer alignment, so results are reproducible.
  ComplexVector in(shape.size());
  ComplexVector out(shape.size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int r = static_cast<int>(shape.rows);
  const int c = static_cast<int>(shape.cols);
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_dft_2d(r, c, as_fftw(in.data()), as_fftw(out.data()),
                                     FFTW_FORWARD, flags);
  plans_->inverse = fftw_plan_dft_2d(r, c, as_fftw(in.data()), as_fftw(out.data()),
                                     FFTW_BACKWARD, flags);
}

UnitaryFft2d::~UnitaryFft2d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plans_->forward);
  fftw_destroy_plan(plans_->inverse);
}

ComplexVector UnitaryFft2d::forward(const ComplexVector& grid) const {
  if (grid.size() != shape_.size()) {
    throw_dimension("UnitaryFft2d::forward", static_cast<std::size_t>(shape_.size()),
                    static_cast<std::size_t>(grid.size()));
  }
  ComplexVector in = grid;
  ComplexVector out(shape_.size());
  fftw_execute_dft(plans_->forward, as_fftw(in.data()), as_fftw(out.data()));
  out *= 1.0 / std::sqrt(static_cast<double>(shape_.size()));
  return out;
}

ComplexVector UnitaryFft2d::inverse(const ComplexVector& spectrum) const {
  if (spectrum.size() != shape_.size()) {
    throw_dimension("UnitaryFft2d::inverse", static_cast<std::size_t>(shape_.size()),
                    static_cast<std::size_t>(spectrum.size()));
  }
  ComplexVector in = spectrum;
  ComplexVector out(shape_.size());
  fftw_execute_dft(plans_->inverse, as_fftw(in.data()), as_fftw(out.data()));
  out *= 1.0 / std::sqrt(static_cast<double>(shape_.size()));
  return out;
}

}  // namespace sparsemri
