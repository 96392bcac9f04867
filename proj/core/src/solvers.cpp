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

#include "sparsemri/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include "sparsemri/error.hpp"

namespace sparsemri {
namespace {

// Everything the shared majorize-then-shrink loop needs to know about a
// problem instance.
struct Problem {
  // y - f(x); may throw DomainError.
  std::function<Measurement(const Vector&)> residual;
  // grad ||y - f(x)||^2 given the residual at x.
  std::function<Vector(const Vector&, const Measurement&)> gradient;
  std::function<bool(const Vector&)> feasible;
  std::function<double(const Vector&)> penalty;
  // shrink(b, tau, z): z is the persistent dual state (unused for synthesis).
  std::function<Vector(const Vector&, double, Vector&)> shrink;
  std::function<void(Vector&)> project;
  Index dual_length = 0;
};

double safe_misfit(const Problem& p, const Vector& x) {
  try {
    const double v = squared_norm(p.residual(x));
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

SolverResult run_majorize_shrink(const Problem& p, Vector x, double step, bool backtracking,
                                 double aux_c, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  SolverResult result;
  SolverTrace& trace = result.trace;
  trace.aux_c = aux_c;

  if (!p.feasible(x)) {
    throw DomainError("initial point lies outside the domain of the measurement model", 0);
  }
  const Vector x_init = x;
  Measurement residual = p.residual(x);
  double data_x = squared_norm(residual);
  trace.initial_objective = data_x + cfg.lambda * p.penalty(x);

  Vector z = Vector::Zero(p.dual_length);
  Vector best_x = x;
  double best_obj = trace.initial_objective;
  double sigma = step;
  bool stopped_early = false;

  for (int k = 0; k < cfg.max_outer_iters; ++k) {
    const Vector grad = p.gradient(x, residual);
    Vector candidate;
    Vector z_next;
    int halvings = 0;
    while (true) {
      const Vector b = x - (sigma / 2.0) * grad;
      z_next = z;
      candidate = p.shrink(b, cfg.lambda * sigma / 2.0, z_next);
      if (p.project) p.project(candidate);
      if (!backtracking) break;
      const double data_b = safe_misfit(p, b);
      const bool descent = data_b <= data_x * (1.0 + 1e-12) + std::numeric_limits<double>::min();
      if (descent && p.feasible(candidate)) break;
      if (++halvings > cfg.max_halvings) {
        trace.backtracking_failed = true;
        break;
      }
      sigma /= 2.0;
    }
    trace.halvings += halvings;
    if (trace.backtracking_failed) {
      trace.note = "backtracking exhausted " + std::to_string(cfg.max_halvings) +
                   " halvings without a feasible descent step";
      stopped_early = true;
      break;
    }
    if (!backtracking && !p.feasible(candidate)) {
      trace.note = "iterate left the domain of f (backtracking disabled)";
      stopped_early = true;
      break;
    }

    const double change = (candidate - x).norm() / std::max(x.norm(), 1e-12);
    x = std::move(candidate);
    z = std::move(z_next);
    residual = p.residual(x);
    data_x = squared_norm(residual);
    const double obj = data_x + cfg.lambda * p.penalty(x);
    trace.objective.push_back(obj);
    if (cfg.ground_truth) trace.nmse.push_back(nmse(*cfg.ground_truth, x));
    trace.iterations = k + 1;
    if (obj < best_obj) {
      best_obj = obj;
      best_x = x;
    }
    if (!std::isfinite(obj)) {
      trace.note = "objective became non-finite";
      stopped_early = true;
      break;
    }
    if (change < cfg.tol) {
      trace.converged = true;
      break;
    }
  }

  trace.step_size = sigma;
  if (stopped_early) {
    result.x = best_x;
  } else if (backtracking && !trace.objective.empty() &&
             trace.objective.back() > trace.initial_objective) {
    result.x = x_init;
    trace.note = "final objective exceeded the initial one; returning the initial point";
  } else {
    result.x = std::move(x);
  }
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

Problem synthesis_shrink_part() {
  Problem p;
  p.penalty = [](const Vector& x) { return x.lpNorm<1>(); };
  p.shrink = [](const Vector& b, double tau, Vector&) { return soft_threshold(b, tau); };
  return p;
}

Problem analysis_shrink_part(const AnalysisOperator& psi, double c, int inner_iters) {
  Problem p;
  p.penalty = [&psi](const Vector& x) { return psi.analyze(x).lpNorm<1>(); };
  p.shrink = [&psi, c, inner_iters](const Vector& b, double tau, Vector& z) {
    return analysis_shrink(psi, b, tau, c, inner_iters, z);
  };
  p.dual_length = psi.coeff_length();
  return p;
}

void attach_linear(Problem& p, const LinearOperator& a, const Measurement& y) {
  p.residual = [&a, &y](const Vector& x) { return subtract(y, a.apply(x)); };
  p.gradient = [&a](const Vector&, const Measurement& r) {
    return Vector(-2.0 * a.apply_adjoint(r));
  };
  p.feasible = [](const Vector& x) { return x.allFinite(); };
}

void attach_model(Problem& p, const MeasurementModel& model, const Measurement& y,
                  const SolverConfig& cfg) {
  p.residual = [&model, &y](const Vector& x) { return subtract(y, model.forward(x)); };
  p.gradient = [&model, &y](const Vector& x, const Measurement& r) {
    return model.residual_gradient(x, y, r);
  };
  p.feasible = [&model](const Vector& x) { return model.in_domain(x); };
  if (model.kind() == MeasurementKind::fourier_mri) {
    const double lo = cfg.z_min;
    const double hi = cfg.z_max;
    p.project = [lo, hi](Vector& z) { z = z.cwiseMax(lo).cwiseMin(hi); };
  }
}

void check_linear_inputs(const LinearOperator& a, const Measurement& y) {
  if (measurement_size(y) != a.output_size()) {
    throw_dimension("measurement vector", static_cast<std::size_t>(a.output_size()),
                    static_cast<std::size_t>(measurement_size(y)));
  }
}

Vector initial_point(const SolverConfig& cfg, Index n, const Vector& fallback) {
  if (!cfg.x0) return fallback;
  if (cfg.x0->size() != n) {
    throw_dimension("initial point", static_cast<std::size_t>(n),
                    static_cast<std::size_t>(cfg.x0->size()));
  }
  return *cfg.x0;
}

double resolve_linear_step(const LinearOperator& a, const SolverConfig& cfg) {
  if (cfg.step_size) return *cfg.step_size;
  const double eig = a.gram_max_eigenvalue(cfg.power_iterations, cfg.seed);
  if (!(eig > 0.0)) throw DegenerateInputError("measurement operator is identically zero");
  return 1.0 / eig;
}

double resolve_model_step(const MeasurementModel& model, const Vector& x0,
                          const SolverConfig& cfg) {
  if (cfg.step_size) return *cfg.step_size;
  const double eig = model.jacobian_gram_max_eigenvalue(x0, cfg.power_iterations, cfg.seed);
  if (!(eig > 0.0)) {
    throw DegenerateInputError("Jacobian of the measurement model vanishes at the initial point");
  }
  return 1.0 / eig;
}

double resolve_aux_c(const AnalysisOperator& psi, const SolverConfig& cfg) {
  if (cfg.aux_c) return *cfg.aux_c;
  return 1.05 * psi.gram_max_eigenvalue(cfg.power_iterations, cfg.seed);
}

void check_psi(const AnalysisOperator& psi, Index n) {
  if (psi.input_size() != n) {
    throw_dimension("analysis operator input", static_cast<std::size_t>(n),
                    static_cast<std::size_t>(psi.input_size()));
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  if (step_size && !(*step_size > 0.0)) throw ParameterError("step_size must be positive");
  if (aux_c && !(*aux_c > 0.0)) throw ParameterError("aux_c must be positive");
  if (!(tol >= 0.0)) throw ParameterError("tol must be non-negative");
  if (max_outer_iters <= 0) throw ParameterError("max_outer_iters must be positive");
  if (inner_z_iters <= 0) throw ParameterError("inner_z_iters must be positive");
  if (max_halvings < 0) throw ParameterError("max_halvings must be non-negative");
  if (power_iterations <= 0) throw ParameterError("power_iterations must be positive");
  if (!(z_min > 0.0 && z_max > z_min)) throw ParameterError("need 0 < z_min < z_max");
}

bool SolverTrace::same_run(const SolverTrace& other) const {
  return objective == other.objective && nmse == other.nmse &&
         initial_objective == other.initial_objective && iterations == other.iterations &&
         converged == other.converged && backtracking_failed == other.backtracking_failed &&
         halvings == other.halvings && step_size == other.step_size && aux_c == other.aux_c &&
         note == other.note;
}

Vector soft_threshold(const Vector& b, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("soft_threshold: tau must be non-negative");
  Vector out(b.size());
  for (Index i = 0; i < b.size(); ++i) {
    const double mag = std::abs(b[i]) - tau;
    out[i] = mag > 0.0 ? std::copysign(mag, b[i]) : 0.0;
  }
  return out;
}

Vector analysis_shrink(const AnalysisOperator& psi, const Vector& b, double tau, double c,
                       int inner_iters, Vector& z) {
  if (!(tau > 0.0)) throw ParameterError("analysis_shrink: tau must be positive");
  if (!(c > 0.0)) throw ParameterError("analysis_shrink: c must be positive");
  if (z.size() != psi.coeff_length()) {
    throw_dimension("analysis_shrink: dual iterate", static_cast<std::size_t>(psi.coeff_length()),
                    static_cast<std::size_t>(z.size()));
  }
  // D^{-1} = diag(|Psi b|) is formed directly; D itself is never needed.
  const Vector denom = (psi.analyze(b).cwiseAbs() / tau).array() + c;
  for (int it = 0; it < inner_iters; ++it) {
    const Vector update = c * z + psi.analyze(b - psi.synthesize(z));
    z = update.cwiseQuotient(denom);
  }
  return b - psi.synthesize(z);
}

SolverResult ista_synthesis_linear(const LinearOperator& a, const Measurement& y,
                                   const SolverConfig& config) {
  config.validate();
  check_linear_inputs(a, y);
  Problem p = synthesis_shrink_part();
  attach_linear(p, a, y);
  const Vector x0 = initial_point(config, a.input_size(), Vector::Zero(a.input_size()));
  return run_majorize_shrink(p, x0, resolve_linear_step(a, config), false, 0.0, config);
}

SolverResult ista_synthesis_linear(const Matrix& a, const Vector& y, const SolverConfig& config) {
  return ista_synthesis_linear(DenseOperator(a), Measurement(y), config);
}

SolverResult ista_analysis_linear(const LinearOperator& a, const Measurement& y,
                                  const AnalysisOperator& psi, const SolverConfig& config) {
  config.validate();
  check_linear_inputs(a, y);
  check_psi(psi, a.input_size());
  const double c = resolve_aux_c(psi, config);
  Problem p = analysis_shrink_part(psi, c, config.inner_z_iters);
  attach_linear(p, a, y);
  const Vector x0 = initial_point(config, a.input_size(), Vector::Zero(a.input_size()));
  return run_majorize_shrink(p, x0, resolve_linear_step(a, config), false, c, config);
}

SolverResult ista_analysis_linear(const Matrix& a, const Vector& y, const AnalysisOperator& psi,
                                  const SolverConfig& config) {
  return ista_analysis_linear(DenseOperator(a), Measurement(y), psi, config);
}

SolverResult ista_synthesis_nonlinear(const MeasurementModel& model, const Measurement& y,
                                      const SolverConfig& config) {
  config.validate();
  if (model.kind() == MeasurementKind::fourier_mri) {
    throw ParameterError("ista_synthesis_nonlinear supports the matrix-based kinds only");
  }
  if (measurement_size(y) != model.output_size()) {
    throw_dimension("measurement vector", static_cast<std::size_t>(model.output_size()),
                    static_cast<std::size_t>(measurement_size(y)));
  }
  Problem p = synthesis_shrink_part();
  attach_model(p, model, y, config);
  const Vector x0 = initial_point(config, model.input_size(), default_initial_point(model));
  if (!model.in_domain(x0)) {
    throw DomainError("initial point lies outside the domain of the measurement model", 0);
  }
  return run_majorize_shrink(p, x0, resolve_model_step(model, x0, config), config.backtracking,
                             0.0, config);
}

SolverResult ista_analysis_nonlinear(const MeasurementModel& model, const Measurement& y,
                                     const AnalysisOperator& psi, const SolverConfig& config) {
  config.validate();
  if (measurement_size(y) != model.output_size()) {
    throw_dimension("measurement vector", static_cast<std::size_t>(model.output_size()),
                    static_cast<std::size_t>(measurement_size(y)));
  }
  check_psi(psi, model.input_size());
  const double c = resolve_aux_c(psi, config);
  Problem p = analysis_shrink_part(psi, c, config.inner_z_iters);
  attach_model(p, model, y, config);
  const Vector x0 = initial_point(config, model.input_size(), default_initial_point(model));
  if (!model.in_domain(x0)) {
    throw DomainError("initial point lies outside the domain of the measurement model", 0);
  }
  return run_majorize_shrink(p, x0, resolve_model_step(model, x0, config), config.backtracking,
                             c, config);
}

Vector default_initial_point(const MeasurementModel& model) {
  const Index n = model.input_size();
  switch (model.kind()) {
    case MeasurementKind::linear:
    case MeasurementKind::exponential:
      return Vector::Zero(n);
    case MeasurementKind::fourier_mri:
      return Vector::Ones(n);
    case MeasurementKind::logarithmic: {
      const Matrix& a = model.matrix();
      Vector ones = Vector::Ones(n);
      if (((a * ones).array() > 0.0).all()) return ones;
      return a.completeOrthogonalDecomposition().solve(Vector::Ones(a.rows()));
    }
  }
  return Vector::Zero(n);
}

double lambda_reference(const LinearOperator& a, const Measurement& y,
                        const AnalysisOperator& psi, const Vector& x0) {
  check_linear_inputs(a, y);
  check_psi(psi, a.input_size());
  if (x0.size() != a.input_size()) {
    throw_dimension("initial point", static_cast<std::size_t>(a.input_size()),
                    static_cast<std::size_t>(x0.size()));
  }
  const Vector grad = -2.0 * a.apply_adjoint(subtract(y, a.apply(x0)));
  return psi.analyze(grad).lpNorm<Eigen::Infinity>();
}

double lambda_reference(const MeasurementModel& model, const Measurement& y,
                        const AnalysisOperator& psi, const Vector& x0) {
  check_psi(psi, model.input_size());
  return psi.analyze(model.residual_gradient(x0, y)).lpNorm<Eigen::Infinity>();
}

}  // namespace sparsemri
