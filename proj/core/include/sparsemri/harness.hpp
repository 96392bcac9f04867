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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsemri/measurements.hpp"
#include "sparsemri/mri.hpp"
#include "sparsemri/phantom.hpp"
#include "sparsemri/solvers.hpp"
#include "sparsemri/transforms.hpp"

namespace sparsemri {

/// Library version string, as recorded in manifests.
std::string_view library_version();

enum class ExperimentKind { convergence, success_rate, t1_pipeline };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

/// baseline = ista_analysis_linear (linear kind only);
/// proposed = ista_analysis_nonlinear.
enum class SolverKind { baseline, proposed };

std::string to_string(SolverKind kind);
SolverKind parse_solver_kind(std::string_view name);

/// Geometric lambda continuation with warm starts. Stage s of S uses
/// lambda = ref * start * (final / start)^(s / (S - 1)) and a stopping
/// tolerance interpolated the same way between start_tol and final_tol.
/// `start_fraction` <= 0 means final_fraction^(1 / stages).
struct ContinuationSchedule {
  int stages = 16;
  double start_fraction = 0.0;
  double start_tol = 1e-6;
  double final_tol = 1e-10;
  int max_iters_per_stage = 20000;
  /// Outer iterations summed over all stages; the last stage is cut short.
  int max_total_iters = 150000;

  void validate() const;
  double fraction(int stage, double final_fraction) const;
  double tolerance(int stage) const;
};

struct ContinuationResult {
  Vector x;
  int iterations = 0;
  int halvings = 0;
  bool backtracking_failed = false;
  /// lambda_reference at the start point.
  double lambda_ref = 0.0;
};

/// Runs `solver` through the schedule down to final_fraction * lambda_ref.
/// `base` supplies everything except lambda, tol, x0 and max_outer_iters.
ContinuationResult solve_with_continuation(SolverKind solver, const MeasurementModel& model,
                                           const Measurement& y, const AnalysisOperator& psi,
                                           const SolverConfig& base,
                                           const ContinuationSchedule& schedule,
                                           double final_fraction);

/// One synthetic recovery problem: A is m x n with N(0, 1/m) entries and
/// Psi x* has `sparsity` N(0, 1) nonzeros on a uniformly drawn support.
struct BenchmarkInstance {
  Matrix a;
  Vector x_true;
  std::uint64_t seed = 0;
};

/// Psi must satisfy Psi Psi^T = I (identity or Haar) so that x* = Psi^T s.
/// The same seed gives the same (A, x*) for every kind except that the
/// logarithmic kind negates the rows of A with (A x*)_i < 0.
BenchmarkInstance make_benchmark_instance(Index m, Index n, Index sparsity,
                                          const AnalysisOperator& psi, MeasurementKind kind,
                                          std::uint64_t seed);

/// Everything needed to reproduce one experiment. Fields irrelevant to the
/// chosen experiment are carried along untouched.
struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::success_rate;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  /// Worker threads for success-rate trials; 0 means hardware concurrency.
  int threads = 0;

  // Synthetic benchmarks.
  Index m = 40;
  Index n = 100;
  TransformKind transform = TransformKind::haar_wavelet_2d;
  Index k_min = 1;
  Index k_max = 25;
  Index k_step = 1;
  int trials = 200;
  std::vector<MeasurementKind> kinds = {MeasurementKind::linear, MeasurementKind::exponential,
                                        MeasurementKind::logarithmic};
  double noise_sigma = 0.0;
  double success_threshold = 1e-3;
  SolverConfig solver;
  ContinuationSchedule schedule;
  /// Candidate lambda fractions (of lambda_reference); the best on a held-out
  /// instance is frozen into `lambda_fraction`.
  std::vector<double> lambda_grid = {1e-4, 1e-5, 1e-6};
  std::map<std::string, double> lambda_fraction;
  Index selection_sparsity = 10;
  /// Sparsity of the single convergence instance.
  Index convergence_sparsity = 10;

  // Two-scan pipeline.
  PhantomSpec phantom;
  std::vector<std::pair<double, double>> splits = {{0.2, 0.8}, {0.3, 0.7}, {0.4, 0.6},
                                                   {0.5, 0.5}};
  TransformKind mri_transform = TransformKind::finite_difference_2d;
  double density_power = 3.0;
  SolverConfig pd_solver;
  SolverConfig t1_solver;
  std::vector<double> mri_lambda_grid = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};

  /// Defaults tuned per experiment kind (iteration budgets, lambda grids).
  static ExperimentSpec defaults(ExperimentKind kind);

  void validate() const;
};

/// JSON text of the spec; `load_experiment_spec` reads it back, as well as
/// a manifest (whose "config" member is used). Unknown keys are rejected.
std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(std::string_view text, ExperimentKind expected);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path, ExperimentKind expected);

/// Resolved configuration plus provenance, written as manifest.json.
struct RunManifest {
  ExperimentSpec spec;
  std::string version;
  std::string started_utc;
  std::string finished_utc;
  double wall_seconds = 0.0;
  /// Seed-splitting rule and the seeds it produced, keyed by role.
  std::string seed_rule;
  std::map<std::string, std::vector<std::uint64_t>> seeds;
  std::vector<std::string> outputs;

  std::string to_json() const;
  void write(const std::filesystem::path& path) const;
};

// Seed streams for derive_seed(master, stream, index).
inline constexpr std::uint64_t kTrialStream = 1;
inline constexpr std::uint64_t kHeldOutStream = 2;
inline constexpr std::uint64_t kConvergenceStream = 3;
inline constexpr std::uint64_t kProtocolStream = 4;
inline constexpr std::uint64_t kSolverStream = 5;

/// Trial seed for sparsity k and trial t: derive_seed(seed, kTrialStream,
/// k * 1000003 + t).
std::uint64_t trial_seed(std::uint64_t master, Index k, int trial);

struct ConvergenceTrace {
  MeasurementKind kind;
  SolverKind solver;
  double lambda = 0.0;
  SolverTrace trace;
};

struct ConvergenceReport {
  std::vector<ConvergenceTrace> traces;
  RunManifest manifest;
};

/// Fixed-lambda runs on one seeded instance per kind; writes convergence.csv
/// (kind, solver, iteration, objective, nmse) and manifest.json.
ConvergenceReport run_convergence(ExperimentSpec spec);

struct TrialOutcome {
  Index k = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  MeasurementKind kind;
  SolverKind solver;
  double nmse = 0.0;
  bool success = false;
  int iterations = 0;
};

struct SuccessRate {
  MeasurementKind kind;
  SolverKind solver;
  Index k = 0;
  int trials = 0;
  int successes = 0;
  double rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
};

struct SuccessReport {
  std::vector<SuccessRate> rates;
  std::vector<TrialOutcome> trials;
  RunManifest manifest;

  /// Throws InputError when the combination was not run.
  const SuccessRate& find(MeasurementKind kind, SolverKind solver, Index k) const;
};

/// Writes success_rate.csv (kind, solver, k, trials, successes, rate),
/// trials.csv and manifest.json.
SuccessReport run_success_rate(ExperimentSpec spec);

struct SplitResult {
  double pd_fraction = 0.0;
  double t1_fraction = 0.0;
  double pd_nmse = 0.0;
  double t1_nmse = 0.0;
  int pd_iterations = 0;
  int t1_iterations = 0;
  double pd_lambda = 0.0;
  double t1_lambda = 0.0;
};

struct PipelineReport {
  std::vector<SplitResult> rows;
  RunManifest manifest;
};

/// Writes table.csv (split, pd_fraction, t1_fraction, pd_nmse, t1_nmse, ...),
/// ground-truth / reconstruction / absolute-difference images as PGM plus
/// float64 field files, and manifest.json.
PipelineReport run_t1_pipeline(ExperimentSpec spec);

}  // namespace sparsemri
