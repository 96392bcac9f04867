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
#include <memory>
#include <string>
#include <string_view>

#include "sparsemri/fft.hpp"
#include "sparsemri/sampling.hpp"
#include "sparsemri/types.hpp"

namespace sparsemri {

/// Real-linear map from a real signal to a (real or complex) measurement
/// space. `apply_adjoint` is the adjoint with respect to the real inner
/// product Re<u, v>.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Index input_size() const = 0;
  virtual Index output_size() const = 0;
  virtual Measurement apply(const Vector& x) const = 0;
  virtual Vector apply_adjoint(const Measurement& r) const = 0;

  /// Largest eigenvalue of A^T A (the `a` of the Landweber step).
  double gram_max_eigenvalue(int iterations = 100, std::uint64_t seed = 0) const;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix a) : a_(std::move(a)) {}
  Index input_size() const override { return a_.cols(); }
  Index output_size() const override { return a_.rows(); }
  Measurement apply(const Vector& x) const override;
  Vector apply_adjoint(const Measurement& r) const override;
  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
};

/// A = R F restricted to real images: F the unitary 2-D DFT, R the mask.
class MaskedFourierOperator final : public LinearOperator {
 public:
  explicit MaskedFourierOperator(SamplingMask mask);
  Index input_size() const override { return mask_.shape().size(); }
  Index output_size() const override { return mask_.count(); }
  Measurement apply(const Vector& x) const override;
  Vector apply_adjoint(const Measurement& r) const override;
  const SamplingMask& mask() const { return mask_; }

 private:
  SamplingMask mask_;
  std::shared_ptr<const UnitaryFft2d> fft_;
};

enum class MeasurementKind { linear, exponential, logarithmic, fourier_mri };

std::string to_string(MeasurementKind kind);
MeasurementKind parse_measurement_kind(std::string_view name);

/// A forward map f together with the gradient of ||y - f(x)||^2.
///
///   linear       f(x) = A x
///   exponential  f(x) = exp(A x)
///   logarithmic  f(x) = log(A x), defined where A x > 0
///   fourier_mri  f(Z) = R F (rho .* (1 - exp(-Z))), defined where Z > 0
///
/// Models are immutable and every member is safe to call concurrently.
class MeasurementModel {
 public:
  static MeasurementModel linear(Matrix a);
  static MeasurementModel exponential(Matrix a);
  static MeasurementModel logarithmic(Matrix a);
  static MeasurementModel matrix_model(MeasurementKind kind, Matrix a);
  static MeasurementModel fourier_mri(SamplingMask mask, Vector rho);

  MeasurementKind kind() const { return kind_; }
  Index input_size() const;
  Index output_size() const;

  /// Only for the matrix-based kinds.
  const Matrix& matrix() const;
  /// Only for fourier_mri.
  const SamplingMask& mask() const;
  const Vector& rho() const { return rho_; }

  double noise_sigma() const { return noise_sigma_; }
  MeasurementModel with_noise_sigma(double sigma) const;

  bool in_domain(const Vector& x) const;

  /// Noiseless f(x). Throws DomainError outside the domain of f.
  Measurement forward(const Vector& x) const;

  /// f(x) plus Gaussian noise of the model's noise_sigma.
  Measurement simulate(const Vector& x, std::uint64_t seed) const;

  /// Gradient of ||y - f(x)||^2 with respect to x (no 1/2 factor).
  Vector residual_gradient(const Vector& x, const Measurement& y) const;

  /// Same gradient when the residual r = y - f(x) is already known; f(x) is
  /// recovered as y - r instead of being re-evaluated.
  Vector residual_gradient(const Vector& x, const Measurement& y, const Measurement& r) const;

  /// ||y - f(x)||^2.
  double data_misfit(const Vector& x, const Measurement& y) const;

  /// Jacobian-vector products J v and J^T r at x.
  Measurement jacobian_apply(const Vector& x, const Vector& v) const;
  Vector jacobian_adjoint_apply(const Vector& x, const Measurement& r) const;

  /// Largest eigenvalue of J^T J at x.
  double jacobian_gram_max_eigenvalue(const Vector& x, int iterations = 100,
                                      std::uint64_t seed = 0) const;

 private:
  MeasurementModel() = default;

  void check_input(const Vector& x, const char* context) const;
  /// Entries of A x, validated for the logarithmic kind.
  Vector linear_part(const Vector& x) const;

  MeasurementKind kind_ = MeasurementKind::linear;
  std::shared_ptr<const DenseOperator> dense_;
  std::shared_ptr<const MaskedFourierOperator> fourier_;
  Vector rho_;
  double noise_sigma_ = 0.0;
};

/// Adds i.i.d. zero-mean Gaussian noise of standard deviation `noise_sigma`.
/// Complex measurements receive independent noise on the real and imaginary
/// parts, each of standard deviation noise_sigma / sqrt(2).
Measurement add_noise(const Measurement& y, double noise_sigma, std::uint64_t seed);

}  // namespace sparsemri
