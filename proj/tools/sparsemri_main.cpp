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


// sparsemri: command-line front end for the benchmark harness and one-shot
// recovery from CSV files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sparsemri/csv.hpp"
#include "sparsemri/error.hpp"
#include "sparsemri/harness.hpp"
#include "sparsemri/measurements.hpp"
#include "sparsemri/solvers.hpp"
#include "sparsemri/transforms.hpp"

namespace {

using namespace sparsemri;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "20/80" (percent) or "0.2:0.8" (fractions).
std::pair<double, double> parse_split(const std::string& text) {
  const auto sep = text.find_first_of("/:");
  if (sep == std::string::npos) throw ParameterError("split \"" + text + "\" needs pd/t1");
  try {
    const double pd = std::stod(text.substr(0, sep));
    const double t1 = std::stod(text.substr(sep + 1));
    if (text[sep] == '/') return {pd / 100.0, t1 / 100.0};
    return {pd, t1};
  } catch (const std::logic_error&) {
    throw ParameterError("split \"" + text + "\" is not numeric");
  }
}

// "k", "kmin:kmax" or "kmin:kmax:step".
void parse_sparsity(const std::string& text, ExperimentSpec& spec) {
  std::vector<Index> parts;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ':')) parts.push_back(std::stol(item));
  } catch (const std::logic_error&) {
    throw ParameterError("sparsity \"" + text + "\" is not numeric");
  }
  if (parts.empty() || parts.size() > 3) throw ParameterError("sparsity must be k[:kmax[:step]]");
  spec.k_min = parts[0];
  spec.k_max = parts.size() > 1 ? parts[1] : parts[0];
  spec.k_step = parts.size() > 2 ? parts[2] : 1;
}

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> trials;
  std::string kinds;
  std::string splits;
  std::string sparsity;
  std::optional<int> threads;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON config or a previous manifest.json");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

ExperimentSpec resolve_spec(ExperimentKind kind, const CommonFlags& f) {
  ExperimentSpec spec = f.config.empty() ? ExperimentSpec::defaults(kind)
                                         : load_experiment_spec(f.config, kind);
  if (f.seed) {
    spec.seed = *f.seed;
    // Frozen lambdas belong to the held-out instance of the old seed.
    if (!f.config.empty()) spec.lambda_fraction.clear();
  }
  if (!f.out.empty()) spec.out_dir = f.out;
  if (f.trials) spec.trials = *f.trials;
  if (f.threads) spec.threads = *f.threads;
  if (!f.kinds.empty()) {
    spec.kinds.clear();
    for (const auto& k : split_list(f.kinds)) spec.kinds.push_back(parse_measurement_kind(k));
  }
  if (!f.splits.empty()) {
    spec.splits.clear();
    for (const auto& s : split_list(f.splits)) spec.splits.push_back(parse_split(s));
  }
  if (!f.sparsity.empty()) parse_sparsity(f.sparsity, spec);
  spec.validate();
  return spec;
}

int cmd_convergence(const CommonFlags& f) {
  const ConvergenceReport r = run_convergence(resolve_spec(ExperimentKind::convergence, f));
  for (const auto& t : r.traces) {
    std::cout << to_string(t.kind) << " " << to_string(t.solver) << ": "
              << t.trace.iterations << " iterations, final objective "
              << (t.trace.objective.empty() ? t.trace.initial_objective : t.trace.objective.back())
              << ", final nmse " << (t.trace.nmse.empty() ? 0.0 : t.trace.nmse.back()) << "\n";
  }
  std::cout << "wrote " << (r.manifest.spec.out_dir / "convergence.csv").string() << "\n";
  return 0;
}

int cmd_success(const CommonFlags& f) {
  const SuccessReport r = run_success_rate(resolve_spec(ExperimentKind::success_rate, f));
  for (const auto& s : r.rates) {
    std::cout << to_string(s.kind) << " " << to_string(s.solver) << " k=" << s.k << ": "
              << s.successes << "/" << s.trials << " = " << s.rate() << "\n";
  }
  std::cout << "wrote " << (r.manifest.spec.out_dir / "success_rate.csv").string() << "\n";
  return 0;
}

int cmd_pipeline(const CommonFlags& f) {
  const PipelineReport r = run_t1_pipeline(resolve_spec(ExperimentKind::t1_pipeline, f));
  for (const auto& row : r.rows) {
    std::cout << row.pd_fraction << "/" << row.t1_fraction << ": pd nmse " << row.pd_nmse
              << ", t1 nmse " << row.t1_nmse << "\n";
  }
  std::cout << "wrote " << (r.manifest.spec.out_dir / "table.csv").string() << "\n";
  return 0;
}

struct RecoverFlags {
  std::string matrix;
  std::string data;
  std::string x0;
  std::string kind = "linear";
  std::string solver = "proposed";
  std::string transform = "identity";
  double lambda = 1e-3;
  bool relative = false;
  bool continuation = false;
  int iters = 1000;
  int inner = 5;
  double tol = 1e-6;
  bool no_backtracking = false;
  std::string out = "out";
};

int cmd_recover(const RecoverFlags& f) {
  const Matrix a = read_numeric_csv(f.matrix);
  const Matrix y_table = read_numeric_csv(f.data);
  if (y_table.cols() != 1) throw InputError("data file must have a single column");
  const Vector y = y_table.col(0);
  const MeasurementKind kind = parse_measurement_kind(f.kind);
  if (kind == MeasurementKind::fourier_mri) {
    throw ParameterError("recover works on matrix models; use t1-pipeline for MRI data");
  }
  const MeasurementModel model = MeasurementModel::matrix_model(kind, a);
  const AnalysisOperator psi =
      AnalysisOperator::make(parse_transform_kind(f.transform), {1, a.cols()});
  const SolverKind solver = parse_solver_kind(f.solver);

  SolverConfig cfg;
  cfg.max_outer_iters = f.iters;
  cfg.inner_z_iters = f.inner;
  cfg.tol = f.tol;
  cfg.backtracking = !f.no_backtracking;
  if (!f.x0.empty()) {
    const Matrix x0 = read_numeric_csv(f.x0);
    if (x0.cols() != 1) throw InputError("x0 file must have a single column");
    cfg.x0 = Vector(x0.col(0));
  }
  const Vector start = cfg.x0 ? *cfg.x0 : default_initial_point(model);
  const Measurement data(y);

  std::filesystem::create_directories(f.out);
  Vector x;
  nlohmann::json summary;
  if (f.continuation) {
    ContinuationSchedule schedule;
    const ContinuationResult r =
        solve_with_continuation(solver, model, data, psi, cfg, schedule, f.lambda);
    x = r.x;
    summary["iterations"] = r.iterations;
    summary["lambda_final"] = f.lambda * r.lambda_ref;
    summary["backtracking_failed"] = r.backtracking_failed;
  } else {
    cfg.lambda = f.relative ? f.lambda * lambda_reference(model, data, psi, start) : f.lambda;
    SolverResult r = solver == SolverKind::baseline
                         ? ista_analysis_linear(DenseOperator(a), data, psi, cfg)
                         : ista_analysis_nonlinear(model, data, psi, cfg);
    x = r.x;
    CsvWriter trace(std::filesystem::path(f.out) / "trace.csv");
    trace.row({"iteration", "objective"});
    for (std::size_t i = 0; i < r.trace.objective.size(); ++i) {
      trace.row({std::to_string(i + 1), format_double(r.trace.objective[i])});
    }
    summary["iterations"] = r.trace.iterations;
    summary["converged"] = r.trace.converged;
    summary["lambda"] = cfg.lambda;
    summary["note"] = r.trace.note;
  }
  CsvWriter out(std::filesystem::path(f.out) / "solution.csv");
  out.row({"x"});
  for (Index i = 0; i < x.size(); ++i) out.row({format_double(x[i])});
  summary["data_misfit"] = model.data_misfit(x, data);
  std::cout << summary.dump() << "\n";
  return 0;
}

void print_error(const std::string& code, const std::string& message) {
  nlohmann::json err{{"error", {{"code", code}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse recovery benchmarks and two-scan T1 mapping"};
  app.set_version_flag("--version", std::string(sparsemri::library_version()));
  app.require_subcommand(1);

  CommonFlags conv_flags, success_flags, pipeline_flags;
  auto* conv = app.add_subcommand("bench-convergence", "Objective per iteration, baseline vs proposed");
  add_common(conv, conv_flags);
  conv->add_option("--kinds", conv_flags.kinds, "Comma list of linear,exponential,logarithmic");

  auto* success = app.add_subcommand("bench-success", "Success rate versus sparsity");
  add_common(success, success_flags);
  success->add_option("--trials", success_flags.trials, "Trials per sparsity level");
  success->add_option("--kinds", success_flags.kinds, "Comma list of linear,exponential,logarithmic");
  success->add_option("--sparsity", success_flags.sparsity, "k, kmin:kmax or kmin:kmax:step");

  auto* pipeline = app.add_subcommand("t1-pipeline", "Two-scan PD/T1 recovery over sampling splits");
  add_common(pipeline, pipeline_flags);
  pipeline->add_option("--splits", pipeline_flags.splits, "Comma list such as 20/80,30/70");

  RecoverFlags rf;
  auto* recover = app.add_subcommand("recover", "Solve one problem from CSV files");
  recover->add_option("--matrix", rf.matrix, "CSV of A (m rows, n columns)")->required();
  recover->add_option("--data", rf.data, "CSV with one column y")->required();
  recover->add_option("--x0", rf.x0, "CSV with one column starting point");
  recover->add_option("--kind", rf.kind, "linear, exponential or logarithmic");
  recover->add_option("--solver", rf.solver, "baseline or proposed");
  recover->add_option("--transform", rf.transform, "identity, haar or fd");
  recover->add_option("--lambda", rf.lambda, "Regularization weight");
  recover->add_flag("--relative-lambda", rf.relative, "Read --lambda as a fraction of lambda_ref");
  recover->add_flag("--continuation", rf.continuation,
                    "Anneal lambda down to --lambda * lambda_ref with warm starts");
  recover->add_option("--iters", rf.iters, "Maximum outer iterations");
  recover->add_option("--inner", rf.inner, "Inner z sweeps per outer iteration");
  recover->add_option("--tol", rf.tol, "Relative-change stopping tolerance");
  recover->add_flag("--no-backtracking", rf.no_backtracking, "Disable step halving");
  recover->add_option("--out", rf.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*conv) return cmd_convergence(conv_flags);
    if (*success) return cmd_success(success_flags);
    if (*pipeline) return cmd_pipeline(pipeline_flags);
    if (*recover) return cmd_recover(rf);
  } catch (const sparsemri::Error& e) {
    print_error(e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 1;
}
