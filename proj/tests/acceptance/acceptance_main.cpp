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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Usage: acceptance [output-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sparsemri/error.hpp"
#include "sparsemri/harness.hpp"
#include "sparsemri/mri.hpp"
#include "sparsemri/phantom.hpp"
#include "sparsemri/sampling.hpp"
#include "sparsemri/solvers.hpp"

namespace fs = std::filesystem;
using namespace sparsemri;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

// 1. <Psi x, z> = <x, Psi^T z> for 100 random pairs per operator.
Outcome adjoint_suite() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  const std::vector<AnalysisOperator> ops = {
      AnalysisOperator::identity(100),
      AnalysisOperator::finite_difference_2d({32, 32}),
      AnalysisOperator::finite_difference_2d({7, 13}),
      AnalysisOperator::haar_wavelet_2d({32, 32}),
      AnalysisOperator::haar_wavelet_2d({12, 9}),
      AnalysisOperator::haar_wavelet_1d(100),
  };
  for (const auto& op : ops) {
    for (int t = 0; t < 100; ++t) {
      const Vector x = random_vector(op.input_size(), rng);
      const Vector z = random_vector(op.coeff_length(), rng);
      const double lhs = op.analyze(x).dot(z);
      const double rhs = x.dot(op.synthesize(z));
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
    }
  }
  return {worst <= 1e-10, "max relative mismatch " + fmt(worst)};
}

// Central-difference gradient of the model's data misfit on 10 coordinates.
double gradient_error(const MeasurementModel& model, const Measurement& y, const Vector& x,
                      std::mt19937_64& rng) {
  const Vector g = model.residual_gradient(x, y);
  std::uniform_int_distribution<Index> pick(0, x.size() - 1);
  double num = 0.0;
  double den = 0.0;
  for (int c = 0; c < 10; ++c) {
    const Index i = pick(rng);
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    Vector xp = x;
    Vector xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (model.data_misfit(xp, y) - model.data_misfit(xm, y)) / (2.0 * h);
    num += (fd - g[i]) * (fd - g[i]);
    den += fd * fd;
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

// 2. Gradients of all four kinds against finite differences.
Outcome gradient_suite() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const Index m = 20;
    const Index n = 30;
    Matrix a(m, n);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = random_vector(1, rng)[0] / std::sqrt(m);
    const Vector x = 0.5 * random_vector(n, rng);
    const Vector x_true = 0.5 * random_vector(n, rng);
    for (auto kind : {MeasurementKind::linear, MeasurementKind::exponential}) {
      const MeasurementModel model = MeasurementModel::matrix_model(kind, a);
      worst = std::max(worst, gradient_error(model, model.forward(x_true), x, rng));
    }
    // Logarithmic: positive A and x keep A x in the domain.
    const Matrix pos = a.cwiseAbs();
    const MeasurementModel lg = MeasurementModel::logarithmic(pos);
    const Vector xp = x.cwiseAbs().array() + 0.1;
    const Vector tp = x_true.cwiseAbs().array() + 0.1;
    worst = std::max(worst, gradient_error(lg, lg.forward(tp), xp, rng));

    const GridShape shape{8, 8};
    Vector rho(shape.size());
    for (Index i = 0; i < rho.size(); ++i) rho[i] = 0.2 + unit(rng);
    const MeasurementModel fm = MeasurementModel::fourier_mri(
        generate_mask(shape, 0.5, 3.0, static_cast<std::uint64_t>(inst) + 1), rho);
    Vector z(shape.size());
    Vector z_true(shape.size());
    for (Index i = 0; i < z.size(); ++i) {
      z[i] = 0.2 + 2.0 * unit(rng);
      z_true[i] = 0.2 + 2.0 * unit(rng);
    }
    worst = std::max(worst, gradient_error(fm, fm.forward(z_true), z, rng));
  }
  return {worst <= 1e-4, "max relative error " + fmt(worst)};
}

// Continuation driver for the synthesis solvers, mirroring
// solve_with_continuation for the analysis ones.
Vector synthesis_continuation(const MeasurementModel& model, const Measurement& y, bool nonlinear,
                              const ContinuationSchedule& schedule, double final_fraction,
                              double lambda_ref, double step) {
  SolverConfig cfg;
  cfg.step_size = step;
  cfg.backtracking = false;
  Vector x = Vector::Zero(model.input_size());
  int used = 0;
  for (int s = 0; s < schedule.stages && used < schedule.max_total_iters; ++s) {
    cfg.lambda = lambda_ref * schedule.fraction(s, final_fraction);
    cfg.tol = schedule.tolerance(s);
    cfg.max_outer_iters = std::min(schedule.max_iters_per_stage, schedule.max_total_iters - used);
    cfg.x0 = x;
    SolverResult r = nonlinear ? ista_synthesis_nonlinear(model, y, cfg)
                               : ista_synthesis_linear(DenseOperator(model.matrix()), y, cfg);
    x = std::move(r.x);
    used += r.trace.iterations;
  }
  return x;
}

// 3. Reduction web on one seeded 40x100 instance.
Outcome reduction_web() {
  const AnalysisOperator psi = AnalysisOperator::identity(100);
  const BenchmarkInstance inst =
      make_benchmark_instance(40, 100, 8, psi, MeasurementKind::linear, 303);
  const MeasurementModel model = MeasurementModel::linear(inst.a);
  const Measurement y = model.forward(inst.x_true);
  ContinuationSchedule schedule;
  const double final_fraction = 1e-8;
  const double step = 1.0 / DenseOperator(inst.a).gram_max_eigenvalue(100, 0);
  const double ref = lambda_reference(model, y, psi, Vector::Zero(100));
  SolverConfig base;
  base.step_size = step;
  base.x0 = Vector::Zero(100);

  const Vector nl_analysis =
      solve_with_continuation(SolverKind::proposed, model, y, psi, base, schedule, final_fraction).x;
  const Vector lin_analysis =
      solve_with_continuation(SolverKind::baseline, model, y, psi, base, schedule, final_fraction).x;
  const Vector nl_synthesis =
      synthesis_continuation(model, y, true, schedule, final_fraction, ref, step);
  const Vector lin_synthesis =
      synthesis_continuation(model, y, false, schedule, final_fraction, ref, step);

  const double e1 = nmse(nl_synthesis, nl_analysis);
  const double e2 = nmse(lin_synthesis, nl_synthesis);
  const double e3 = nmse(lin_synthesis, lin_analysis);
  const double worst = std::max({e1, e2, e3});
  return {worst <= 1e-6, "nl-analysis/nl-synthesis " + fmt(e1) + ", nl-synthesis/linear-synthesis " +
                             fmt(e2) + ", analysis/synthesis " + fmt(e3)};
}

// 4. Success rates at k = 10, 200 trials.
Outcome success_benchmark(const fs::path& out) {
  ExperimentSpec s = ExperimentSpec::defaults(ExperimentKind::success_rate);
  s.out_dir = out / "success";
  s.k_min = s.k_max = 10;
  s.trials = 200;
  const SuccessReport r = run_success_rate(s);
  const double base = r.find(MeasurementKind::linear, SolverKind::baseline, 10).rate();
  const double lin = r.find(MeasurementKind::linear, SolverKind::proposed, 10).rate();
  const double ex = r.find(MeasurementKind::exponential, SolverKind::proposed, 10).rate();
  const double lg = r.find(MeasurementKind::logarithmic, SolverKind::proposed, 10).rate();
  const bool pass = base >= 0.9 && std::abs(lin - base) <= 0.05 && ex >= lin - 0.10 && lg < ex;
  return {pass, "baseline " + fmt(base) + ", proposed linear " + fmt(lin) + ", exponential " +
                    fmt(ex) + ", logarithmic " + fmt(lg)};
}

// 5. Proposed vs baseline objective traces on the linear kind.
Outcome convergence(const fs::path& out, ExperimentSpec* ran) {
  ExperimentSpec s = ExperimentSpec::defaults(ExperimentKind::convergence);
  s.out_dir = out / "convergence";
  s.kinds = {MeasurementKind::linear};
  const ConvergenceReport r = run_convergence(s);
  *ran = r.manifest.spec;
  const SolverTrace* base = nullptr;
  const SolverTrace* prop = nullptr;
  for (const auto& t : r.traces) {
    (t.solver == SolverKind::baseline ? base : prop) = &t.trace;
  }
  if (!base || !prop || base->objective.empty() || prop->objective.empty()) {
    return {false, "missing trace"};
  }
  const double fb = base->objective.back();
  const double fp = prop->objective.back();
  const double rel = std::abs(fp - fb) / std::max(std::abs(fb), 1e-300);
  const bool pass = rel <= 0.01 && prop->iterations >= base->iterations;
  return {pass, "final objective rel diff " + fmt(rel) + ", iterations baseline " +
                    std::to_string(base->iterations) + " proposed " +
                    std::to_string(prop->iterations)};
}

// 6. Full-data T1 recovery on a 16x16 piecewise phantom.
Outcome pipeline_oracle() {
  const TissueMaps maps = make_piecewise_phantom(16);
  const double tr = maps.mean_t1();
  const SamplingMask mask = SamplingMask::full(maps.shape());
  const ComplexVector y = acquire(maps, tr, mask, 0.0, 1);
  SolverConfig cfg;
  cfg.lambda = 1e-6;
  cfg.max_outer_iters = 3000;
  cfg.tol = 1e-10;
  const T1Estimate est =
      recover_t1(y, mask, maps.pd, tr, AnalysisOperator::finite_difference_2d(maps.shape()), cfg);
  const double e = t1_nmse(maps, est.t1);
  return {e <= 1e-2, "T1 nmse " + fmt(e)};
}

// 7. Split trends on Shepp-Logan 128x128.
Outcome table_trends(const fs::path& out) {
  ExperimentSpec s = ExperimentSpec::defaults(ExperimentKind::t1_pipeline);
  s.out_dir = out / "pipeline";
  const PipelineReport r = run_t1_pipeline(s);
  if (r.rows.size() != 4) return {false, "expected 4 splits"};
  bool a = true;
  for (std::size_t i = 1; i < r.rows.size(); ++i) a = a && r.rows[i].pd_nmse <= r.rows[i - 1].pd_nmse;
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    if (r.rows[i].t1_nmse < r.rows[best].t1_nmse) best = i;
  }
  const bool b = best == 1;
  const bool c = r.rows[1].pd_nmse <= 0.05 && r.rows[1].t1_nmse <= 0.06;
  std::string detail = std::string("(a) ") + (a ? "ok" : "fail") + " (b) " + (b ? "ok" : "fail") +
                       " (c) " + (c ? "ok" : "fail") + "; pd";
  for (const auto& row : r.rows) detail += " " + fmt(row.pd_nmse);
  detail += "; t1";
  for (const auto& row : r.rows) detail += " " + fmt(row.t1_nmse);
  return {a && b && c, detail};
}

// 8. Degenerate inputs and byte-identical reruns.
Outcome degeneracy(const fs::path& out, const ExperimentSpec& convergence_spec) {
  std::vector<std::string> failures;
  const AnalysisOperator fd = AnalysisOperator::finite_difference_2d({8, 8});
  Vector z = Vector::Zero(fd.coeff_length());
  Vector b = Vector::Constant(64, 1.0);
  b.tail(32).setConstant(2.0);  // Psi b is zero except on one row boundary.
  const Vector x = analysis_shrink(fd, b, 0.1, 8.4, 5, z);
  if (!x.allFinite() || !z.allFinite()) failures.push_back("z-update not finite");
  Vector zz = Vector::Zero(fd.coeff_length());
  if (!analysis_shrink(fd, Vector::Zero(64), 0.1, 8.4, 5, zz).allFinite()) {
    failures.push_back("z-update on zero input not finite");
  }

  Vector v(3);
  v << 3.0, -0.5, 0.0;
  Vector expected(3);
  expected << 2.0, 0.0, 0.0;
  if (soft_threshold(v, 1.0) != expected) failures.push_back("soft_threshold tau=1");
  if (soft_threshold(v, 0.0) != v) failures.push_back("soft_threshold tau=0");
  Vector edge(2);
  edge << -2.0, 2.0;
  if (soft_threshold(edge, 2.0) != Vector::Zero(2)) failures.push_back("soft_threshold |b|=tau");

  Vector t(2);
  t << 3.0, 4.0;
  if (nmse(t, t) != 0.0) failures.push_back("nmse(x, x)");
  if (nmse(t, Vector::Zero(2)) != 1.0) failures.push_back("nmse(x, 0)");
  Vector half(2);
  half << 0.0, 4.0;
  if (nmse(t, half) != 0.6) failures.push_back("nmse([3,4],[0,4])");
  try {
    nmse(Vector::Zero(2), t);
    failures.push_back("nmse with zero truth did not throw");
  } catch (const DegenerateInputError&) {
  }

  ExperimentSpec again = load_experiment_spec(convergence_spec.out_dir / "manifest.json",
                                              ExperimentKind::convergence);
  again.out_dir = out / "convergence_rerun";
  run_convergence(again);
  if (slurp(convergence_spec.out_dir / "convergence.csv") !=
      slurp(again.out_dir / "convergence.csv")) {
    failures.push_back("convergence rerun differs");
  }

  ExperimentSpec s = ExperimentSpec::defaults(ExperimentKind::success_rate);
  s.out_dir = out / "rerun_a";
  s.k_min = 3;
  s.k_max = 6;
  s.k_step = 3;
  s.trials = 4;
  run_success_rate(s);
  ExperimentSpec s2 = load_experiment_spec(s.out_dir / "manifest.json", ExperimentKind::success_rate);
  s2.out_dir = out / "rerun_b";
  run_success_rate(s2);
  for (const char* f : {"success_rate.csv", "trials.csv"}) {
    if (slurp(s.out_dir / f) != slurp(s2.out_dir / f)) {
      failures.push_back(std::string("success rerun differs in ") + f);
    }
  }

  std::string detail = failures.empty() ? "all checks hold" : "";
  for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);
  ExperimentSpec convergence_spec;
  bool have_convergence = false;

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "adjoint-suite", adjoint_suite},
      {2, "gradient-suite", gradient_suite},
      {3, "reduction-web", reduction_web},
      {4, "success-benchmark", [&] { return success_benchmark(out); }},
      {5, "convergence",
       [&] {
         Outcome o = convergence(out, &convergence_spec);
         have_convergence = true;
         return o;
       }},
      {6, "pipeline-oracle", pipeline_oracle},
      {7, "table-trends", [&] { return table_trends(out); }},
      {8, "degeneracy",
       [&] {
         if (!have_convergence) return Outcome{false, "convergence run unavailable"};
         return degeneracy(out, convergence_spec);
       }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name << " (" << fmt(secs)
              << " s): " << o.detail << std::endl;
    if (!o.pass) ++failed;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
