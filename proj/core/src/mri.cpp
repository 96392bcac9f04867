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

#include "sparsemri/mri.hpp"

#include <cmath>

#include "sparsemri/error.hpp"
#include "sparsemri/rng.hpp"

namespace sparsemri {

ScanProtocol ScanProtocol::for_maps(const TissueMaps& maps, double pd_fraction,
                                    double t1_fraction, std::uint64_t seed, double noise_sigma,
                                    double density_power) {
  ScanProtocol p;
  p.tr_t1 = maps.mean_t1();
  p.tr_pd = 5.0 * maps.max_t1();
  p.pd_fraction = pd_fraction;
  p.t1_fraction = t1_fraction;
  p.noise_sigma = noise_sigma;
  p.density_power = density_power;
  p.pd_mask_seed = derive_seed(seed, 1, 0);
  p.t1_mask_seed = derive_seed(seed, 2, 0);
  p.pd_noise_seed = derive_seed(seed, 3, 0);
  p.t1_noise_seed = derive_seed(seed, 4, 0);
  p.validate(maps);
  return p;
}

void ScanProtocol::validate(const TissueMaps& maps) const {
  auto in_unit = [](double f) { return f > 0.0 && f <= 1.0; };
  if (!in_unit(pd_fraction) || !in_unit(t1_fraction)) {
    throw ParameterError("sampling fractions must lie in (0, 1]");
  }
  if (pd_fraction + t1_fraction > 1.0 + 1e-12) {
    throw ParameterError("sampling budget exceeded: pd_fraction + t1_fraction = " +
                         std::to_string(pd_fraction + t1_fraction) + " > 1");
  }
  if (!(tr_pd > 0.0) || !(tr_t1 > 0.0)) throw ParameterError("repetition times must be positive");
  if (tr_pd < 5.0 * maps.max_t1() * (1.0 - 1e-12)) {
    throw ParameterError("tr_pd must be at least 5 x max(T1) to null T1 weighting");
  }
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise_sigma must be non-negative");
  if (!(density_power >= 0.0)) throw ParameterError("density_power must be non-negative");
}

Image simulate_signal(const TissueMaps& maps, double tr) {
  if (!(tr > 0.0)) throw ParameterError("simulate_signal: TR must be positive");
  maps.validate();
  return (maps.pd.array() * (1.0 - (-tr / maps.t1.array()).exp())).matrix();
}

ComplexVector acquire(const TissueMaps& maps, double tr, const SamplingMask& mask,
                      double noise_sigma, std::uint64_t seed) {
  if (mask.shape() != maps.shape()) {
    throw DimensionError("acquire: mask and tissue maps have different shapes");
  }
  const MaskedFourierOperator rf(mask);
  const Measurement clean = rf.apply(flatten(simulate_signal(maps, tr)));
  return std::get<ComplexVector>(add_noise(clean, noise_sigma, seed));
}

PdEstimate recover_pd(const ComplexVector& y, const SamplingMask& mask,
                      const AnalysisOperator& psi, const SolverConfig& config,
                      LambdaMode mode) {
  if (psi.input_shape() != mask.shape()) {
    throw DimensionError("recover_pd: transform and mask shapes differ");
  }
  const MaskedFourierOperator rf(mask);
  const Measurement data(y);
  SolverConfig cfg = config;
  if (mode == LambdaMode::relative) {
    const Vector x0 = cfg.x0 ? *cfg.x0 : Vector::Zero(rf.input_size());
    cfg.lambda *= lambda_reference(rf, data, psi, x0);
    if (!(cfg.lambda > 0.0)) throw DegenerateInputError("recover_pd: data carry no signal");
  }
  SolverResult r = ista_analysis_linear(rf, data, psi, cfg);
  PdEstimate out;
  out.lambda = cfg.lambda;
  out.pd = unflatten(r.x.cwiseMax(0.0), mask.shape());
  out.trace = std::move(r.trace);
  return out;
}

T1Estimate recover_t1(const ComplexVector& y, const SamplingMask& mask, const Image& pd_estimate,
                      double tr_t1, const AnalysisOperator& psi, const SolverConfig& config,
                      LambdaMode mode) {
  if (!(tr_t1 > 0.0)) throw ParameterError("recover_t1: TR must be positive");
  const GridShape shape = mask.shape();
  if (pd_estimate.rows() != shape.rows || pd_estimate.cols() != shape.cols) {
    throw DimensionError("recover_t1: PD estimate and mask shapes differ");
  }
  if (psi.input_shape() != shape) throw DimensionError("recover_t1: transform and mask shapes differ");

  const double peak = pd_estimate.maxCoeff();
  if (!(peak > 0.0)) throw DegenerateInputError("recover_t1: PD estimate is all background");
  Vector rho = flatten(pd_estimate);
  std::vector<std::uint8_t> background(static_cast<std::size_t>(rho.size()), 0);
  for (Index k = 0; k < rho.size(); ++k) {
    if (rho[k] < kBackgroundThreshold * peak) {
      rho[k] = 0.0;
      background[static_cast<std::size_t>(k)] = 1;
    }
  }

  const MeasurementModel model = MeasurementModel::fourier_mri(mask, rho);
  const Measurement data(y);
  SolverConfig cfg = config;
  if (mode == LambdaMode::relative) {
    const Vector z0 = cfg.x0 ? *cfg.x0 : default_initial_point(model);
    cfg.lambda *= lambda_reference(model, data, psi, z0);
    if (!(cfg.lambda > 0.0)) throw DegenerateInputError("recover_t1: data carry no signal");
  }
  SolverResult r = ista_analysis_nonlinear(model, data, psi, cfg);

  T1Estimate out;
  out.lambda = cfg.lambda;
  out.z = unflatten(r.x, shape);
  out.t1 = Image::Zero(shape.rows, shape.cols);
  for (Index k = 0; k < rho.size(); ++k) {
    if (!background[static_cast<std::size_t>(k)]) out.t1.data()[k] = tr_t1 / r.x[k];
  }
  out.background = std::move(background);
  out.trace = std::move(r.trace);
  return out;
}

double t1_nmse(const TissueMaps& truth, const Image& t1_estimate) {
  if (truth.t1.rows() != t1_estimate.rows() || truth.t1.cols() != t1_estimate.cols()) {
    throw DimensionError("t1_nmse: shapes differ");
  }
  double err = 0.0;
  double ref = 0.0;
  for (Index k = 0; k < truth.pd.size(); ++k) {
    if (truth.pd.data()[k] > 0.0) {
      const double t = truth.t1.data()[k];
      const double d = t - t1_estimate.data()[k];
      err += d * d;
      ref += t * t;
    }
  }
  if (ref == 0.0) throw DegenerateInputError("t1_nmse: truth has no foreground");
  return std::sqrt(err / ref);
}

PipelineResult run_two_scan(const TissueMaps& maps, const ScanProtocol& protocol,
                            TransformKind psi_kind, const SolverConfig& pd_config,
                            const SolverConfig& t1_config, LambdaMode mode) {
  protocol.validate(maps);
  const GridShape shape = maps.shape();
  const AnalysisOperator psi = AnalysisOperator::make(psi_kind, shape);

  const SamplingMask pd_mask =
      generate_mask(shape, protocol.pd_fraction, protocol.density_power, protocol.pd_mask_seed);
  const SamplingMask t1_mask =
      generate_mask(shape, protocol.t1_fraction, protocol.density_power, protocol.t1_mask_seed);

  const ComplexVector y_pd =
      acquire(maps, protocol.tr_pd, pd_mask, protocol.noise_sigma, protocol.pd_noise_seed);
  const ComplexVector y_t1 =
      acquire(maps, protocol.tr_t1, t1_mask, protocol.noise_sigma, protocol.t1_noise_seed);

  PipelineResult out;
  out.protocol = protocol;
  out.pd = recover_pd(y_pd, pd_mask, psi, pd_config, mode);
  out.pd_nmse = nmse(maps.pd, out.pd.pd);
  out.t1 = recover_t1(y_t1, t1_mask, out.pd.pd, protocol.tr_t1, psi, t1_config, mode);
  out.t1_nmse = t1_nmse(maps, out.t1.t1);
  return out;
}

}  // namespace sparsemri
