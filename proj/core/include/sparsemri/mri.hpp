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
#include <vector>

#include "sparsemri/measurements.hpp"
#include "sparsemri/phantom.hpp"
#include "sparsemri/sampling.hpp"
#include "sparsemri/solvers.hpp"
#include "sparsemri/transforms.hpp"

namespace sparsemri {

/// Two-scan acquisition: a long-TR scan that nulls T1 weighting (proton
/// density) and a scan with TR near the mean T1 (T1 weighting). The sampling
/// fractions of both scans together must not exceed one full K-space.
struct ScanProtocol {
  double tr_pd = 0.0;
  double tr_t1 = 0.0;
  double pd_fraction = 0.3;
  double t1_fraction = 0.7;
  double noise_sigma = 0.0;
  double density_power = 3.0;
  std::uint64_t pd_mask_seed = 1;
  std::uint64_t t1_mask_seed = 2;
  std::uint64_t pd_noise_seed = 3;
  std::uint64_t t1_noise_seed = 4;

  /// tr_t1 = mean foreground T1, tr_pd = 5 * max foreground T1; seeds are
  /// derived from `seed`. Validates the result.
  static ScanProtocol for_maps(const TissueMaps& maps, double pd_fraction, double t1_fraction,
                               std::uint64_t seed, double noise_sigma = 0.0,
                               double density_power = 3.0);

  /// Throws ParameterError when the sampling budget exceeds one scan, a
  /// fraction is outside (0, 1], a TR is not positive, or tr_pd < 5 max(T1).
  void validate(const TissueMaps& maps) const;
};

/// rho .* (1 - exp(-tr / T1)). T2 decay is neglected (short echo time).
Image simulate_signal(const TissueMaps& maps, double tr);

/// R F simulate_signal(maps, tr) plus complex Gaussian noise.
ComplexVector acquire(const TissueMaps& maps, double tr, const SamplingMask& mask,
                      double noise_sigma, std::uint64_t seed);

/// How SolverConfig::lambda is read by the recovery routines: as-is, or as a
/// fraction of lambda_reference() evaluated on the data at the start point.
enum class LambdaMode { absolute, relative };

struct PdEstimate {
  Image pd;
  /// The lambda actually used.
  double lambda = 0.0;
  SolverTrace trace;
};

/// Solves min ||y - R F rho||^2 + lambda ||Psi rho||_1 with the linear
/// analysis solver and returns the real part with negatives clamped to zero.
PdEstimate recover_pd(const ComplexVector& y, const SamplingMask& mask,
                      const AnalysisOperator& psi, const SolverConfig& config,
                      LambdaMode mode = LambdaMode::absolute);

/// Pixels with pd_estimate below this fraction of its maximum are background.
inline constexpr double kBackgroundThreshold = 0.01;

struct T1Estimate {
  /// T1 in ms; 0 on background pixels.
  Image t1;
  /// Recovered Z = TR / T1 (background entries are unconstrained by data).
  Image z;
  /// 1 on pixels excluded as background.
  std::vector<std::uint8_t> background;
  double lambda = 0.0;
  SolverTrace trace;
};

/// Solves min ||y - R F rho (1 - e^{-Z})||^2 + lambda ||Psi Z||_1 with the
/// non-linear analysis solver (rho = pd_estimate, zeroed on background) and
/// returns T1 = tr_t1 / Z. Throws DegenerateInputError when every pixel is
/// background.
T1Estimate recover_t1(const ComplexVector& y, const SamplingMask& mask, const Image& pd_estimate,
                      double tr_t1, const AnalysisOperator& psi, const SolverConfig& config,
                      LambdaMode mode = LambdaMode::absolute);

/// NMSE of a T1 estimate over the foreground (pd > 0) of the true maps.
double t1_nmse(const TissueMaps& truth, const Image& t1_estimate);

struct PipelineResult {
  ScanProtocol protocol;
  PdEstimate pd;
  T1Estimate t1;
  double pd_nmse = 0.0;
  double t1_nmse = 0.0;
};

/// Simulates both scans and runs PD then T1 recovery.
PipelineResult run_two_scan(const TissueMaps& maps, const ScanProtocol& protocol,
                            TransformKind psi_kind, const SolverConfig& pd_config,
                            const SolverConfig& t1_config,
                            LambdaMode mode = LambdaMode::absolute);

}  // namespace sparsemri
