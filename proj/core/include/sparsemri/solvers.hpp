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
#include <optional>
#include <string>
#include <vector>

#include "sparsemri/measurements.hpp"
#include "sparsemri/transforms.hpp"
#include "sparsemri/types.hpp"

namespace sparsemri {

/// Controls shared by every solver.
///
/// `step_size` and `aux_c` are resolved automatically when unset: the step is
/// 1/a with a the largest eigenvalue of A^T A (or of J^T J at the initial point
/// for the non-linear kinds), and c is 1.05 times the largest eigenvalue of
/// Psi Psi^T.
struct SolverConfig {
  double lambda = 1e-3;
  std::optional<double> step_size;
  std::optional<double> aux_c;
  int max_outer_iters = 1000;
  int inner_z_iters = 5;
  /// Stop when ||x_k - x_{k-1}|| / max(||x_{k-1}||, 1e-12) < tol.
  double tol = 1e-6;
  /// Non-linear solvers only: halve the step until the data term does not
  /// increase and the iterate stays in the domain of f.
  bool backtracking = true;
  int max_halvings = 50;
  int power_iterations = 100;
  std::uint64_t seed = 0;
  /// Initial iterate; defaults depend on the measurement kind.
  std::optional<Vector> x0;
  /// When set, the trace records the NMSE of every iterate against it.
  std::optional<Vector> ground_truth;
  /// Box applied to Z after every outer iteration of a fourier-mri solve.
  double z_min = 0.01;
  double z_max = 20.0;

  /// Throws ParameterError on non-positive lambda/step/c, negative tol or
  /// non-positive iteration counts.
  void validate() const;
};

struct SolverTrace {
  /// Objective ||y - f(x)||^2 + lambda * penalty(x) after each iteration.
  std::vector<double> objective;
  /// NMSE against SolverConfig::ground_truth after each iteration (empty
  /// when no ground truth was supplied).
  std::vector<double> nmse;
  double initial_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Backtracking exhausted max_halvings; the best iterate was returned.
  bool backtracking_failed = false;
  int halvings = 0;
  double step_size = 0.0;
  double aux_c = 0.0;
  double wall_seconds = 0.0;
  std::string note;

  /// Equality of everything except wall time.
  bool same_run(const SolverTrace& other) const;
};

struct SolverResult {
  Vector x;
  SolverTrace trace;
};

/// signum(b) * max(0, |b| - tau), elementwise.
Vector soft_threshold(const Vector& b, double tau);

/// Approximate solution of min_x ||b - x||^2 + 2 tau ||Psi x||_1 by
/// `inner_iters` sweeps of
///
///   z <- (D^{-1}/tau + c I)^{-1} (c z + Psi (b - Psi^T z)),  D^{-1} = diag(|Psi b|)
///
/// followed by x = b - Psi^T z. With tau = lambda / (2a) this is the
/// analysis-prior shrinkage step of the linear solver. `z` carries the warm
/// start in and the final dual iterate out. Coordinates where Psi b is
/// exactly zero reduce to z <- z + (1/c)(...), with no division by zero.
Vector analysis_shrink(const AnalysisOperator& psi, const Vector& b, double tau, double c,
                       int inner_iters, Vector& z);

/// min ||y - A x||^2 + lambda ||x||_1 by iterative soft thresholding.
SolverResult ista_synthesis_linear(const LinearOperator& a, const Measurement& y,
                                   const SolverConfig& config);
SolverResult ista_synthesis_linear(const Matrix& a, const Vector& y, const SolverConfig& config);

/// min ||y - A x||^2 + lambda ||Psi x||_1: Landweber step followed by the
/// analysis shrinkage.
SolverResult ista_analysis_linear(const LinearOperator& a, const Measurement& y,
                                  const AnalysisOperator& psi, const SolverConfig& config);
SolverResult ista_analysis_linear(const Matrix& a, const Vector& y, const AnalysisOperator& psi,
                                  const SolverConfig& config);

/// min ||y - f(x)||^2 + lambda ||x||_1 for the matrix-based kinds: gradient
/// step b = x - (sigma/2) grad, then soft threshold at lambda * sigma / 2.
SolverResult ista_synthesis_nonlinear(const MeasurementModel& model, const Measurement& y,
                                      const SolverConfig& config);

/// min ||y - f(x)||^2 + lambda ||Psi x||_1 for any kind, including
/// fourier-mri: gradient step, analysis shrinkage with a = 1/sigma, then the
/// Z box projection for fourier-mri.
SolverResult ista_analysis_nonlinear(const MeasurementModel& model, const Measurement& y,
                                     const AnalysisOperator& psi, const SolverConfig& config);

/// Default starting point: zeros for linear/exponential, ones for fourier-mri,
/// and for logarithmic all-ones when A 1 > 0, otherwise the minimum-norm x
/// with A x = 1 (so that f(x0) = 0).
Vector default_initial_point(const MeasurementModel& model);

/// ||Psi grad ||y - f(x0)||^2||_inf, the natural scale for lambda: with
/// Psi = I and a convex data term, x0 = 0 is optimal for any larger lambda.
double lambda_reference(const LinearOperator& a, const Measurement& y,
                        const AnalysisOperator& psi, const Vector& x0);
double lambda_reference(const MeasurementModel& model, const Measurement& y,
                        const AnalysisOperator& psi, const Vector& x0);

}  // namespace sparsemri
