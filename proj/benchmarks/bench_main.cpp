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

#include <benchmark/benchmark.h>

#include <random>

#include "sparsemri/fft.hpp"
#include "sparsemri/harness.hpp"
#include "sparsemri/sampling.hpp"
#include "sparsemri/solvers.hpp"
#include "sparsemri/transforms.hpp"

namespace {

using namespace sparsemri;

Vector noise(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

void BM_HaarAnalyze(benchmark::State& state) {
  const Index side = state.range(0);
  const AnalysisOperator op = AnalysisOperator::haar_wavelet_2d({side, side});
  const Vector x = noise(side * side, 1);
  for (auto _ : state) benchmark::DoNotOptimize(op.analyze(x));
}
BENCHMARK(BM_HaarAnalyze)->Arg(64)->Arg(128)->Arg(256);

void BM_FiniteDifferenceRoundTrip(benchmark::State& state) {
  const Index side = state.range(0);
  const AnalysisOperator op = AnalysisOperator::finite_difference_2d({side, side});
  const Vector x = noise(side * side, 2);
  for (auto _ : state) benchmark::DoNotOptimize(op.synthesize(op.analyze(x)));
}
BENCHMARK(BM_FiniteDifferenceRoundTrip)->Arg(64)->Arg(128)->Arg(256);

void BM_UnitaryFft(benchmark::State& state) {
  const Index side = state.range(0);
  const UnitaryFft2d fft({side, side});
  const ComplexVector x = noise(side * side, 3).cast<std::complex<double>>();
  for (auto _ : state) benchmark::DoNotOptimize(fft.forward(x));
}
BENCHMARK(BM_UnitaryFft)->Arg(64)->Arg(128)->Arg(256);

void BM_FourierGradient(benchmark::State& state) {
  const GridShape shape{128, 128};
  const MeasurementModel model = MeasurementModel::fourier_mri(
      generate_mask(shape, 0.7, 3.0, 4), noise(shape.size(), 5).cwiseAbs());
  const Vector z = noise(shape.size(), 6).cwiseAbs().array() + 0.5;
  const Measurement y = model.forward(z);
  const Vector z0 = Vector::Ones(shape.size());
  for (auto _ : state) benchmark::DoNotOptimize(model.residual_gradient(z0, y));
}
BENCHMARK(BM_FourierGradient);

void BM_SolverIterations(benchmark::State& state) {
  const auto kind = static_cast<MeasurementKind>(state.range(0));
  const AnalysisOperator psi = AnalysisOperator::haar_wavelet_1d(100);
  const BenchmarkInstance inst = make_benchmark_instance(40, 100, 10, psi, kind, 7);
  const MeasurementModel model = MeasurementModel::matrix_model(kind, inst.a);
  const Measurement y = model.forward(inst.x_true);
  SolverConfig cfg;
  cfg.lambda = 1e-4;
  cfg.tol = 0.0;
  cfg.max_outer_iters = 100;
  for (auto _ : state) benchmark::DoNotOptimize(ista_analysis_nonlinear(model, y, psi, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.max_outer_iters);
}
BENCHMARK(BM_SolverIterations)
    ->Arg(static_cast<int>(MeasurementKind::linear))
    ->Arg(static_cast<int>(MeasurementKind::exponential))
    ->Arg(static_cast<int>(MeasurementKind::logarithmic));

}  // namespace

BENCHMARK_MAIN();
