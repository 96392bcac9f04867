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

#include "sparsemri/measurements.hpp"

#include <cmath>
#include <random>

#include "sparsemri/error.hpp"
#include "sparsemri/linalg.hpp"

namespace sparsemri {

double LinearOperator::gram_max_eigenvalue(int iterations, std::uint64_t seed) const {
  return power_iteration(
      input_size(), [this](const Vector& v) { return apply_adjoint(apply(v)); }, iterations,
      seed);
}

Measurement DenseOperator::apply(const Vector& x) const {
  if (x.size() != a_.cols()) {
    throw_dimension("DenseOperator::apply", static_cast<std::size_t>(a_.cols()),
                    static_cast<std::size_t>(x.size()));
  }
  return Vector(a_ * x);
}

Vector DenseOperator::apply_adjoint(const Measurement& r) const {
  const auto* real = std::get_if<Vector>(&r);
  if (real == nullptr) throw DimensionError("DenseOperator: expected a real measurement");
  if (real->size() != a_.rows()) {
    throw_dimension("DenseOperator::apply_adjoint", static_cast<std::size_t>(a_.rows()),
                    static_cast<std::size_t>(real->size()));
  }
  return a_.transpose() * *real;
}

MaskedFourierOperator::MaskedFourierOperator(SamplingMask mask)
    : mask_(std::move(mask)), fft_(std::make_shared<UnitaryFft2d>(mask_.shape())) {}

Measurement MaskedFourierOperator::apply(const Vector& x) const {
  if (x.size() != input_size()) {
    throw_dimension("MaskedFourierOperator::apply", static_cast<std::size_t>(input_size()),
                    static_cast<std::size_t>(x.size()));
  }
  return mask_.restrict(fft_->forward(x.cast<std::complex<double>>()));
}

Vector MaskedFourierOperator::apply_adjoint(const Measurement& r) const {
  const auto* samples = std::get_if<ComplexVector>(&r);
  if (samples == nullptr) throw DimensionError("MaskedFourierOperator: expected K-space samples");
  return fft_->inverse(mask_.embed(*samples)).real();
}

std::string to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::linear: return "linear";
    case MeasurementKind::exponential: return "exponential";
    case MeasurementKind::logarithmic: return "logarithmic";
    case MeasurementKind::fourier_mri: return "fourier-mri";
  }
  return "unknown";
}

MeasurementKind parse_measurement_kind(std::string_view name) {
  if (name == "linear") return MeasurementKind::linear;
  if (name == "exponential" || name == "exp") return MeasurementKind::exponential;
  if (name == "logarithmic" || name == "log") return MeasurementKind::logarithmic;
  if (name == "fourier-mri") return MeasurementKind::fourier_mri;
  throw ParameterError("unknown measurement kind '" + std::string(name) + "'");
}

MeasurementModel MeasurementModel::matrix_model(MeasurementKind kind, Matrix a) {
  if (kind == MeasurementKind::fourier_mri) {
    throw ParameterError("matrix_model: fourier-mri models are built with fourier_mri()");
  }
  if (a.size() == 0) throw DimensionError("matrix_model: empty measurement matrix");
  MeasurementModel m;
  m.kind_ = kind;
  m.dense_ = std::make_shared<const DenseOperator>(std::move(a));
  return m;
}

MeasurementModel MeasurementModel::linear(Matrix a) {
  return matrix_model(MeasurementKind::linear, std::move(a));
}
MeasurementModel MeasurementModel::exponential(Matrix a) {
  return matrix_model(MeasurementKind::exponential, std::move(a));
}
MeasurementModel MeasurementModel::logarithmic(Matrix a) {
  return matrix_model(MeasurementKind::logarithmic, std::move(a));
}

MeasurementModel MeasurementModel::fourier_mri(SamplingMask mask, Vector rho) {
  if (rho.size() != mask.shape().size()) {
    throw_dimension("fourier_mri: rho", static_cast<std::size_t>(mask.shape().size()),
                    static_cast<std::size_t>(rho.size()));
  }
  if ((rho.array() < 0.0).any()) throw ParameterError("fourier_mri: rho must be non-negative");
  MeasurementModel m;
  m.kind_ = MeasurementKind::fourier_mri;
  m.fourier_ = std::make_shared<const MaskedFourierOperator>(std::move(mask));
  m.rho_ = std::move(rho);
  return m;
}

Index MeasurementModel::input_size() const {
  return dense_ ? dense_->input_size() : fourier_->input_size();
}

Index MeasurementModel::output_size() const {
  return dense_ ? dense_->output_size() : fourier_->output_size();
}

const Matrix& MeasurementModel::matrix() const {
  if (!dense_) throw ParameterError("fourier-mri models have no dense matrix");
  return dense_->matrix();
}

const SamplingMask& MeasurementModel::mask() const {
  if (!fourier_) throw ParameterError("only fourier-mri models carry a sampling mask");
  return fourier_->mask();
}

MeasurementModel MeasurementModel::with_noise_sigma(double sigma) const {
  if (!(sigma >= 0.0)) throw ParameterError("noise_sigma must be non-negative");
  MeasurementModel m = *this;
  m.noise_sigma_ = sigma;
  return m;
}

void MeasurementModel::check_input(const Vector& x, const char* context) const {
  if (x.size() != input_size()) {
    throw_dimension(context, static_cast<std::size_t>(input_size()),
                    static_cast<std::size_t>(x.size()));
  }
}

bool MeasurementModel::in_domain(const Vector& x) const {
  if (x.size() != input_size()) return false;
  switch (kind_) {
    case MeasurementKind::logarithmic:
      return ((dense_->matrix() * x).array() > 0.0).all();
    case MeasurementKind::fourier_mri:
      return (x.array() > 0.0).all();
    default:
      return x.allFinite();
  }
}

Vector MeasurementModel::linear_part(const Vector& x) const {
  Vector ax = dense_->matrix() * x;
  if (kind_ == MeasurementKind::logarithmic) {
    for (Index i = 0; i < ax.size(); ++i) {
      if (!(ax[i] > 0.0)) {
        throw DomainError("logarithmic model: (A x)[" + std::to_string(i) + "] = " +
                              std::to_string(ax[i]) + " is not positive",
                          static_cast<std::size_t>(i));
      }
    }
  }
  return ax;
}

namespace {

void check_positive_z(const Vector& z) {
  for (Index i = 0; i < z.size(); ++i) {
    if (!(z[i] > 0.0)) {
      throw DomainError("fourier-mri model: Z[" + std::to_string(i) + "] = " +
                            std::to_string(z[i]) + " is not positive",
                        static_cast<std::size_t>(i));
    }
  }
}

}  // namespace

Measurement MeasurementModel::forward(const Vector& x) const {
  check_input(x, "forward");
  switch (kind_) {
    case MeasurementKind::linear:
      return Vector(dense_->matrix() * x);
    case MeasurementKind::exponential:
      return Vector((dense_->matrix() * x).array().exp());
    case MeasurementKind::logarithmic:
      return Vector(linear_part(x).array().log());
    case MeasurementKind::fourier_mri: {
      check_positive_z(x);
      const Vector signal = rho_.array() * (1.0 - (-x.array()).exp());
      return fourier_->apply(signal);
    }
  }
  return Vector();
}

Measurement MeasurementModel::simulate(const Vector& x, std::uint64_t seed) const {
  return add_noise(forward(x), noise_sigma_, seed);
}

Measurement MeasurementModel::jacobian_apply(const Vector& x, const Vector& v) const {
  check_input(x, "jacobian_apply");
  check_input(v, "jacobian_apply");
  switch (kind_) {
    case MeasurementKind::linear:
      return Vector(dense_->matrix() * v);
    case MeasurementKind::exponential: {
      const Matrix& a = dense_->matrix();
      return Vector((a * x).array().exp() * (a * v).array());
    }
    case MeasurementKind::logarithmic:
      return Vector((dense_->matrix() * v).array() / linear_part(x).array());
    case MeasurementKind::fourier_mri: {
      check_positive_z(x);
      const Vector scaled = rho_.array() * (-x.array()).exp() * v.array();
      return fourier_->apply(scaled);
    }
  }
  return Vector();
}

Vector MeasurementModel::jacobian_adjoint_apply(const Vector& x, const Measurement& r) const {
  check_input(x, "jacobian_adjoint_apply");
  switch (kind_) {
    case MeasurementKind::linear:
      return dense_->apply_adjoint(r);
    case MeasurementKind::exponential: {
      const auto& real = std::get<Vector>(r);
      const Vector w = (dense_->matrix() * x).array().exp() * real.array();
      return dense_->apply_adjoint(w);
    }
    case MeasurementKind::logarithmic: {
      const auto& real = std::get<Vector>(r);
      const Vector w = real.array() / linear_part(x).array();
      return dense_->apply_adjoint(w);
    }
    case MeasurementKind::fourier_mri: {
      check_positive_z(x);
      return (rho_.array() * (-x.array()).exp() * fourier_->apply_adjoint(r).array()).matrix();
    }
  }
  return Vector();
}

Vector MeasurementModel::residual_gradient(const Vector& x, const Measurement& y) const {
  check_input(x, "residual_gradient");
  if (measurement_size(y) != output_size()) {
    throw_dimension("residual_gradient: measurement", static_cast<std::size_t>(output_size()),
                    static_cast<std::size_t>(measurement_size(y)));
  }
  // grad ||y - f(x)||^2 = -2 J(x)^T (y - f(x)); for fourier-mri the real
  // gradient of the complex residual is -2 (rho .* e^{-Z}) .* Re{F^H R^T r}.
  return -2.0 * jacobian_adjoint_apply(x, subtract(y, forward(x)));
}

Vector MeasurementModel::residual_gradient(const Vector& x, const Measurement& y,
                                           const Measurement& r) const {
  check_input(x, "residual_gradient");
  if (measurement_size(r) != output_size() || measurement_size(y) != output_size()) {
    throw_dimension("residual_gradient: residual", static_cast<std::size_t>(output_size()),
                    static_cast<std::size_t>(measurement_size(r)));
  }
  switch (kind_) {
    case MeasurementKind::exponential: {
      const auto& res = std::get<Vector>(r);
      const Vector fx = std::get<Vector>(y) - res;
      return -2.0 * dense_->apply_adjoint(Vector(fx.array() * res.array()));
    }
    case MeasurementKind::logarithmic: {
      const auto& res = std::get<Vector>(r);
      const Vector ax = (std::get<Vector>(y) - res).array().exp();
      return -2.0 * dense_->apply_adjoint(Vector(res.array() / ax.array()));
    }
    default:
      return -2.0 * jacobian_adjoint_apply(x, r);
  }
}

double MeasurementModel::data_misfit(const Vector& x, const Measurement& y) const {
  return squared_norm(subtract(y, forward(x)));
}

double MeasurementModel::jacobian_gram_max_eigenvalue(const Vector& x, int iterations,
                                                      std::uint64_t seed) const {
  check_input(x, "jacobian_gram_max_eigenvalue");
  return power_iteration(
      input_size(),
      [&](const Vector& v) { return jacobian_adjoint_apply(x, jacobian_apply(x, v)); },
      iterations, seed);
}

Measurement add_noise(const Measurement& y, double noise_sigma, std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw ParameterError("add_noise: noise_sigma must be non-negative");
  if (noise_sigma == 0.0) return y;
  std::mt19937_64 rng(seed);
  if (const auto* real = std::get_if<Vector>(&y)) {
    std::normal_distribution<double> normal(0.0, noise_sigma);
    Vector out = *real;
    for (Index i = 0; i < out.size(); ++i) out[i] += normal(rng);
    return out;
  }
  std::normal_distribution<double> normal(0.0, noise_sigma / std::sqrt(2.0));
  ComplexVector out = std::get<ComplexVector>(y);
  for (Index i = 0; i < out.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    out[i] += std::complex<double>(re, im);
  }
  return out;
}

}  // namespace sparsemri
