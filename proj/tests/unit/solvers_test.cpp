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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "sparsemri/error.hpp"
#include "sparsemri/harness.hpp"
#include "sparsemri/phantom.hpp"
#include "sparsemri/sampling.hpp"
#include "sparsemri/solvers.hpp"

namespace sparsemri {
namespace {

Matrix gaussian(Index m, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
  Matrix a(m, n);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = d(rng);
  return a;
}

Vector sparse_vector(Index n, std::initializer_list<std::pair<Index, double>> entries) {
  Vector x = Vector::Zero(n);
  for (auto [i, v] : entries) x[i] = v;
  return x;
}

// Exact LASSO minimizer of ||y - A x||^2 + lambda ||x||_1 by enumerating
// every sign pattern in {-1, 0, 1}^n and keeping the KKT-consistent one.
Vector lasso_oracle(const Matrix& a, const Vector& y, double lambda) {
  const Index n = a.cols();
  Index patterns = 1;
  for (Index i = 0; i < n; ++i) patterns *= 3;
  Vector best = Vector::Zero(n);
  double best_obj = std::numeric_limits<double>::infinity();
  for (Index code = 0; code < patterns; ++code) {
    std::vector<Index> support;
    Vector sign = Vector::Zero(n);
    Index c = code;
    for (Index i = 0; i < n; ++i, c /= 3) {
      if (c % 3 == 0) continue;
      sign[i] = c % 3 == 1 ? 1.0 : -1.0;
      support.push_back(i);
    }
    if (static_cast<Index>(support.size()) > a.rows()) continue;
    Vector x = Vector::Zero(n);
    if (!support.empty()) {
      Matrix as(a.rows(), static_cast<Index>(support.size()));
      Vector s(static_cast<Index>(support.size()));
      for (std::size_t j = 0; j < support.size(); ++j) {
        as.col(static_cast<Index>(j)) = a.col(support[j]);
        s[static_cast<Index>(j)] = sign[support[j]];
      }
      const Vector xs = (as.transpose() * as).ldlt().solve(as.transpose() * y - 0.5 * lambda * s);
      bool consistent = true;
      for (std::size_t j = 0; j < support.size(); ++j) {
        consistent = consistent && xs[static_cast<Index>(j)] * s[static_cast<Index>(j)] > 0.0;
        x[support[j]] = xs[static_cast<Index>(j)];
      }
      if (!consistent) continue;
    }
    const Vector r = y - a * x;
    const Vector corr = 2.0 * a.transpose() * r;
    bool kkt = true;
    for (Index i = 0; i < n; ++i) {
      if (sign[i] == 0.0 && std::abs(corr[i]) > lambda * (1.0 + 1e-9)) kkt = false;
    }
    if (!kkt) continue;
    const double obj = r.squaredNorm() + lambda * x.lpNorm<1>();
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

TEST(SoftThreshold, TrivialCases) {
  Vector b(3);
  b << 3.0, -0.5, 0.0;
  Vector expected(3);
  expected << 2.0, 0.0, 0.0;
  EXPECT_EQ(soft_threshold(b, 1.0), expected);
  EXPECT_EQ(soft_threshold(b, 0.0), b);
  Vector edge(2);
  edge << -2.0, 2.0;
  EXPECT_EQ(soft_threshold(edge, 2.0), Vector::Zero(2));
  EXPECT_THROW(soft_threshold(b, -1.0), ParameterError);
}

TEST(AnalysisShrink, IdentityFixedPointIsClosedForm) {
  // With Psi = I the inner iteration converges to z = b tau / (|b| + tau).
  const AnalysisOperator psi = AnalysisOperator::identity(5);
  Vector b(5);
  b << 2.0, -1.0, 0.25, 0.0, -3.0;
  const double tau = 0.5;
  Vector z = Vector::Zero(5);
  const Vector x = analysis_shrink(psi, b, tau, 1.05, 2000, z);
  for (Index i = 0; i < 5; ++i) {
    EXPECT_NEAR(x[i], b[i] * std::abs(b[i]) / (std::abs(b[i]) + tau), 1e-12);
  }
}

TEST(AnalysisShrink, ExactZerosInAnalysisCoefficients) {
  const AnalysisOperator psi = AnalysisOperator::finite_difference_2d({4, 4});
  Vector z = Vector::Zero(psi.coeff_length());
  // Constant b: every finite difference is exactly zero.
  const Vector x = analysis_shrink(psi, Vector::Constant(16, 2.0), 0.3, 8.4, 5, z);
  EXPECT_TRUE(x.allFinite());
  EXPECT_TRUE(z.allFinite());
  EXPECT_LE((x - Vector::Constant(16, 2.0)).norm(), 1e-12);
  Vector zz = Vector::Zero(psi.coeff_length());
  EXPECT_EQ(analysis_shrink(psi, Vector::Zero(16), 0.3, 8.4, 5, zz), Vector::Zero(16));
}

TEST(IstaSynthesisLinear, IdentityWithTinyLambda) {
  SolverConfig cfg;
  cfg.lambda = 1e-10;
  cfg.tol = 0.0;
  cfg.max_outer_iters = 10;
  Vector y(2);
  y << 1.0, -2.0;
  const SolverResult r = ista_synthesis_linear(Matrix::Identity(2, 2), y, cfg);
  EXPECT_LE((r.x - y).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(IstaSynthesisLinear, MatchesEnumeratedLassoOracle) {
  const Matrix a = gaussian(6, 8, 21);
  const Vector y = a * sparse_vector(8, {{1, 1.3}, {6, -0.8}});
  const double lambda = 0.05;
  const Vector oracle = lasso_oracle(a, y, lambda);
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.tol = 1e-14;
  cfg.max_outer_iters = 200000;
  const SolverResult r = ista_synthesis_linear(a, y, cfg);
  EXPECT_LE((r.x - oracle).norm(), 1e-6 * oracle.norm());
  for (Index i = 0; i < 8; ++i) {
    EXPECT_EQ(std::abs(r.x[i]) > 1e-8, oracle[i] != 0.0) << "coordinate " << i;
  }
}

// Support minimizing the least-squares residual over all C(n, 2) supports.
std::pair<Index, Index> best_pair_support(const Matrix& a, const Vector& y) {
  std::pair<Index, Index> best{-1, -1};
  double best_res = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < a.cols(); ++i) {
    for (Index j = i + 1; j < a.cols(); ++j) {
      Matrix as(a.rows(), 2);
      as.col(0) = a.col(i);
      as.col(1) = a.col(j);
      const Vector xs = as.colPivHouseholderQr().solve(y);
      const double res = (y - as * xs).norm();
      if (res < best_res) {
        best_res = res;
        best = {i, j};
      }
    }
  }
  return best;
}

TEST(IstaSynthesisLinear, SupportMatchesLeastSquaresOracle) {
  for (std::uint64_t seed : {31, 32, 33, 34, 35}) {
    const Matrix a = gaussian(6, 8, seed);
    const Vector y = a * sparse_vector(8, {{2, 1.1}, {5, -0.9}});
    const auto [i, j] = best_pair_support(a, y);
    SolverConfig cfg;
    cfg.lambda = 1e-3;
    cfg.tol = 1e-13;
    cfg.max_outer_iters = 200000;
    const SolverResult r = ista_synthesis_linear(a, y, cfg);
    const double peak = r.x.cwiseAbs().maxCoeff();
    for (Index c = 0; c < 8; ++c) {
      EXPECT_EQ(std::abs(r.x[c]) > 1e-2 * peak, c == i || c == j)
          << "seed " << seed << " coordinate " << c;
    }
  }
}

TEST(IstaSynthesisLinear, ObjectiveNonIncreasing) {
  const Matrix a = gaussian(20, 50, 3);
  const Vector y = a * sparse_vector(50, {{4, 1.0}, {17, -2.0}, {33, 0.5}});
  SolverConfig cfg;
  cfg.lambda = 0.01;
  cfg.max_outer_iters = 300;
  const SolverResult r = ista_synthesis_linear(a, y, cfg);
  ASSERT_EQ(static_cast<int>(r.trace.objective.size()), r.trace.iterations);
  double prev = r.trace.initial_objective;
  for (double obj : r.trace.objective) {
    EXPECT_LE(obj, prev * (1.0 + 1e-12));
    prev = obj;
  }
}

TEST(IstaSynthesisLinear, DimensionMismatch) {
  SolverConfig cfg;
  EXPECT_THROW(ista_synthesis_linear(Matrix::Identity(3, 3), Vector::Ones(4), cfg),
               DimensionError);
}

TEST(IstaAnalysisLinear, ConstantFieldFromRandomMeasurements) {
  // 8x8 constant field, finite-difference prior, 60% random measurements
  // (first row all ones so the mean is observed).
  const Index n = 64;
  Matrix a = gaussian(38, n, 8);
  a.row(0).setConstant(1.0 / 8.0);
  const Vector x_true = Vector::Constant(n, 1.7);
  const MeasurementModel model = MeasurementModel::linear(a);
  const Measurement y = model.forward(x_true);
  const AnalysisOperator psi = AnalysisOperator::finite_difference_2d({8, 8});
  SolverConfig cfg;
  ContinuationSchedule schedule;
  schedule.stages = 8;
  const ContinuationResult r =
      solve_with_continuation(SolverKind::baseline, model, y, psi, cfg, schedule, 1e-8);
  EXPECT_LE(nmse(x_true, r.x), 1e-6);
  EXPECT_LE(psi.analyze(r.x).lpNorm<1>(), 1e-5);
  EXPECT_LE(std::sqrt(model.data_misfit(r.x, y)), 1e-5);
}

TEST(IstaAnalysisLinear, IdentityPsiMatchesSynthesis) {
  const Matrix a = gaussian(40, 100, 4);
  const Vector x_true =
      sparse_vector(100, {{3, 1.0}, {20, -1.5}, {41, 0.7}, {77, 2.0}, {90, -0.4}});
  const MeasurementModel model = MeasurementModel::linear(a);
  const Measurement y = model.forward(x_true);
  const AnalysisOperator psi = AnalysisOperator::identity(100);
  ContinuationSchedule schedule;
  SolverConfig cfg;
  const Vector analysis =
      solve_with_continuation(SolverKind::baseline, model, y, psi, cfg, schedule, 1e-7).x;
  // Synthesis with the same final lambda, solved to high accuracy.
  SolverConfig syn;
  syn.lambda = 1e-7 * lambda_reference(model, y, psi, Vector::Zero(100));
  syn.tol = 1e-14;
  syn.max_outer_iters = 200000;
  syn.x0 = analysis;
  const Vector synthesis = ista_synthesis_linear(a, std::get<Vector>(y), syn).x;
  EXPECT_LE(nmse(synthesis, analysis), 1e-4);
}

TEST(IstaSynthesisNonlinear, LinearKindMatchesLinearSolver) {
  const Matrix a = gaussian(30, 60, 5);
  const Vector y = a * sparse_vector(60, {{2, 1.0}, {30, -1.0}});
  SolverConfig cfg;
  cfg.lambda = 0.01;
  cfg.max_outer_iters = 500;
  cfg.backtracking = false;
  cfg.step_size = 1.0 / DenseOperator(a).gram_max_eigenvalue(100, 0);
  const SolverResult lin = ista_synthesis_linear(a, y, cfg);
  const SolverResult non =
      ista_synthesis_nonlinear(MeasurementModel::linear(a), Measurement(y), cfg);
  EXPECT_LE(nmse(lin.x, non.x), 1e-6);
}

TEST(IstaSynthesisNonlinear, ZeroIsFixedPoint) {
  const Matrix a = gaussian(10, 20, 6);
  const MeasurementModel model = MeasurementModel::exponential(a);
  SolverConfig cfg;
  cfg.lambda = 10.0;
  const SolverResult r = ista_synthesis_nonlinear(model, model.forward(Vector::Zero(20)), cfg);
  EXPECT_EQ(r.x, Vector::Zero(20));
}

TEST(IstaSynthesisNonlinear, RejectsFourierModel) {
  const MeasurementModel m =
      MeasurementModel::fourier_mri(SamplingMask::full({4, 4}), Vector::Ones(16));
  SolverConfig cfg;
  EXPECT_THROW(ista_synthesis_nonlinear(m, m.forward(Vector::Ones(16)), cfg), ParameterError);
}

TEST(IstaAnalysisNonlinear, IdentityPsiLinearKindStepMatchesBaseline) {
  const Matrix a = gaussian(30, 64, 7);
  const Vector y = a * sparse_vector(64, {{5, 1.0}, {40, -2.0}});
  const AnalysisOperator psi = AnalysisOperator::haar_wavelet_1d(64);
  SolverConfig cfg;
  cfg.lambda = 0.01;
  cfg.max_outer_iters = 300;
  const SolverResult base = ista_analysis_linear(a, y, psi, cfg);
  const SolverResult prop =
      ista_analysis_nonlinear(MeasurementModel::linear(a), Measurement(y), psi, cfg);
  EXPECT_LE(nmse(base.x, prop.x), 1e-10);
  EXPECT_EQ(prop.trace.halvings, 0);
}

TEST(IstaAnalysisNonlinear, ObjectiveNotAboveStartWithBacktracking) {
  const Matrix a = gaussian(40, 100, 9);
  const AnalysisOperator psi = AnalysisOperator::haar_wavelet_1d(100);
  const BenchmarkInstance inst =
      make_benchmark_instance(40, 100, 10, psi, MeasurementKind::logarithmic, 12);
  for (auto kind : {MeasurementKind::exponential, MeasurementKind::logarithmic}) {
    const MeasurementModel model = MeasurementModel::matrix_model(kind, inst.a);
    const Measurement y = model.forward(inst.x_true);
    SolverConfig cfg;
    cfg.lambda = 1e-3;
    cfg.max_outer_iters = 200;
    const SolverResult r = ista_analysis_nonlinear(model, y, psi, cfg);
    const double start = model.data_misfit(default_initial_point(model), y) +
                         cfg.lambda * psi.analyze(default_initial_point(model)).lpNorm<1>();
    const double end = model.data_misfit(r.x, y) + cfg.lambda * psi.analyze(r.x).lpNorm<1>();
    EXPECT_LE(end, start) << to_string(kind);
    EXPECT_TRUE(model.in_domain(r.x));
  }
}

TEST(IstaAnalysisNonlinear, BacktrackingExhaustionReturnsBestIterate) {
  Matrix a = gaussian(20, 32, 10).cwiseAbs();
  const MeasurementModel model = MeasurementModel::logarithmic(a);
  const Vector x0 = Vector::Ones(32);
  const Measurement y = model.forward(Vector::Constant(32, 3.0));
  SolverConfig cfg;
  cfg.lambda = 1e-3;
  cfg.step_size = 1e12;
  cfg.max_halvings = 3;
  cfg.x0 = x0;
  const SolverResult r =
      ista_analysis_nonlinear(model, y, AnalysisOperator::haar_wavelet_1d(32), cfg);
  EXPECT_TRUE(r.trace.backtracking_failed);
  EXPECT_FALSE(r.trace.note.empty());
  EXPECT_EQ(r.x, x0);
}

TEST(IstaAnalysisNonlinear, DomainExitWithoutBacktracking) {
  Matrix a = gaussian(20, 32, 11).cwiseAbs();
  const MeasurementModel model = MeasurementModel::logarithmic(a);
  // Target below x0: the huge step pushes A x negative.
  const Measurement y = model.forward(Vector::Constant(32, 0.01));
  SolverConfig cfg;
  cfg.lambda = 1e-3;
  cfg.step_size = 1e12;
  cfg.backtracking = false;
  cfg.x0 = Vector::Ones(32);
  const SolverResult r =
      ista_analysis_nonlinear(model, y, AnalysisOperator::identity(32), cfg);
  EXPECT_TRUE(model.in_domain(r.x));
  EXPECT_FALSE(r.trace.note.empty());
}

TEST(IstaAnalysisNonlinear, FourierMriFullMaskRecoversPiecewiseZ) {
  const TissueMaps maps = make_piecewise_phantom(16);
  const GridShape shape = maps.shape();
  const double tr = maps.mean_t1();
  Vector z_true(shape.size());
  Vector rho = flatten(maps.pd);
  for (Index k = 0; k < z_true.size(); ++k) z_true[k] = tr / maps.t1.data()[k];
  // Background Z is unobservable (rho = 0); compare on the foreground.
  const MeasurementModel model = MeasurementModel::fourier_mri(SamplingMask::full(shape), rho);
  const Measurement y = model.forward(z_true.cwiseMin(20.0));
  SolverConfig cfg;
  cfg.lambda = 1e-6;
  cfg.max_outer_iters = 3000;
  cfg.tol = 1e-10;
  const SolverResult r = ista_analysis_nonlinear(
      model, y, AnalysisOperator::finite_difference_2d(shape), cfg);
  Vector truth_fg = Vector::Zero(shape.size());
  Vector est_fg = Vector::Zero(shape.size());
  for (Index k = 0; k < shape.size(); ++k) {
    if (rho[k] > 0.0) {
      truth_fg[k] = z_true[k];
      est_fg[k] = r.x[k];
    }
  }
  EXPECT_LE(nmse(truth_fg, est_fg), 1e-2);
  EXPECT_TRUE((r.x.array() >= cfg.z_min).all() && (r.x.array() <= cfg.z_max).all());
}

TEST(Solvers, FixedPointAtTruth) {
  const Matrix a = gaussian(40, 64, 13);
  const AnalysisOperator psi = AnalysisOperator::haar_wavelet_1d(64);
  Vector coeffs = Vector::Zero(64);
  coeffs[0] = 3.0;
  coeffs[9] = -1.0;
  const Vector x_true = psi.synthesize(coeffs);
  const Vector y = a * x_true;
  SolverConfig cfg;
  cfg.lambda = 1e-12;
  cfg.max_outer_iters = 1;
  cfg.x0 = x_true;
  const double tol = 1e-6;
  const MeasurementModel lin = MeasurementModel::linear(a);
  EXPECT_LE(nmse(x_true, ista_synthesis_linear(a, y, cfg).x), tol);
  EXPECT_LE(nmse(x_true, ista_analysis_linear(a, y, psi, cfg).x), tol);
  EXPECT_LE(nmse(x_true, ista_synthesis_nonlinear(lin, Measurement(y), cfg).x), tol);
  EXPECT_LE(nmse(x_true, ista_analysis_nonlinear(lin, Measurement(y), psi, cfg).x), tol);
}

TEST(Solvers, DeterministicTraces) {
  const Matrix a = gaussian(20, 32, 14);
  const MeasurementModel model = MeasurementModel::exponential(a * 0.3);
  const Measurement y = model.forward(Vector::LinSpaced(32, -1.0, 1.0));
  SolverConfig cfg;
  cfg.lambda = 1e-3;
  cfg.max_outer_iters = 100;
  cfg.seed = 77;
  const AnalysisOperator psi = AnalysisOperator::haar_wavelet_1d(32);
  const SolverResult r1 = ista_analysis_nonlinear(model, y, psi, cfg);
  const SolverResult r2 = ista_analysis_nonlinear(model, y, psi, cfg);
  EXPECT_TRUE(r1.trace.same_run(r2.trace));
  EXPECT_EQ(r1.x, r2.x);
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  cfg.lambda = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = SolverConfig{};
  cfg.step_size = -1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = SolverConfig{};
  cfg.tol = -1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = SolverConfig{};
  cfg.aux_c = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(DefaultInitialPoint, LogarithmicIsFeasible) {
  const Matrix a = gaussian(40, 100, 15);
  const MeasurementModel model = MeasurementModel::logarithmic(a);
  const Vector x0 = default_initial_point(model);
  ASSERT_TRUE(model.in_domain(x0));
  EXPECT_LE(std::get<Vector>(model.forward(x0)).norm(), 1e-10);
}

}  // namespace
}  // namespace sparsemri
