// ggmsel: command-line front end for Gaussian graphical model selection.
//
// Every subcommand prints `key=value` summary lines on stdout, writes its
// artifacts atomically, and on failure prints one `error: <kind>: <message>`
// line on stderr. Exit status: 0 success, 1 numerical failure, 2 usage,
// parameter, or file errors.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ggmsel/experiment.hpp"
#include "ggmsel/io.hpp"
#include "ggmsel/metrics.hpp"
#include "ggmsel/robsel.hpp"
#include "ggmsel/simulation.hpp"
#include "ggmsel/solver.hpp"
#include "ggmsel/testing.hpp"
#include "ggmsel/tuning.hpp"

namespace {

using namespace ggmsel;
namespace fs = std::filesystem;

struct Common {
  std::string input;
  int threads = default_thread_count();
  bool no_center = false;
  bool standardize = false;

  CovarianceOptions covariance() const { return {.center = !no_center, .standardize = standardize}; }
};

struct SolverFlags {
  bool offdiag_only = false;
  double kkt_tol = 1e-6;
  int max_sweeps = 500;

  SolverConfig config(double lambda = 0.0) const {
    return {.lambda = lambda, .penalize_diagonal = !offdiag_only, .kkt_tol = kkt_tol, .max_sweeps = max_sweeps};
  }
};

void add_input(CLI::App* cmd, Common& c) {
  cmd->add_option("--input", c.input, "Observation CSV (rows = samples)")->required();
  cmd->add_option("--threads", c.threads, "Worker threads (default: $GGMSEL_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-center", c.no_center, "Do not subtract column means");
  cmd->add_flag("--standardize", c.standardize, "Use the correlation matrix");
}

void add_solver(CLI::App* cmd, SolverFlags& s) {
  cmd->add_flag("--offdiag-only", s.offdiag_only, "Leave the diagonal of K unpenalized");
  cmd->add_option("--kkt-tol", s.kkt_tol, "KKT residual tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-sweeps", s.max_sweeps, "Maximum coordinate-descent sweeps")->check(CLI::PositiveNumber);
}

void emit(const std::string& key, const std::string& value) { std::cout << key << '=' << value << '\n'; }
void emit(const std::string& key, double value) { emit(key, io::format_real(value)); }

void write_if(const std::string& path, const std::string& contents) {
  if (!path.empty()) io::write_atomic(path, contents);
}

void emit_fit(const SolverResult& fit) {
  emit("objective", fit.objective);
  emit("kkt_residual", fit.kkt_residual);
  emit("sweeps", std::to_string(fit.sweeps_used));
  emit("converged", fit.converged ? "true" : "false");
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter:
    case ErrorKind::parse:
    case ErrorKind::io:
      return 2;
    default:
      return 1;
  }
}

std::string pvalues_csv(const PValueMatrix& pv, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "node_i,node_j,unadjusted,adjusted\n";
  for (int i = 0; i < pv.d; ++i)
    for (int j = i + 1; j < pv.d; ++j)
      out << names[static_cast<std::size_t>(i)] << ',' << names[static_cast<std::size_t>(j)] << ','
          << io::format_real(pv.unadjusted[pv.index(i, j)]) << ',' << io::format_real(pv.adjusted[pv.index(i, j)])
          << '\n';
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian graphical model selection with family-wise error control"};
  app.require_subcommand(1);

  // fit ---------------------------------------------------------------------
  Common fit_common;
  SolverFlags fit_solver;
  double fit_lambda = 0.0;
  std::string fit_precision, fit_edges;
  auto* fit = app.add_subcommand("fit", "Graphical lasso at a given lambda");
  add_input(fit, fit_common);
  add_solver(fit, fit_solver);
  fit->add_option("--lambda", fit_lambda, "Penalty")->required()->check(CLI::NonNegativeNumber);
  fit->add_option("--output-precision", fit_precision, "Write K as CSV");
  fit->add_option("--output-edges", fit_edges, "Write the edge list as CSV");

  // robsel ------------------------------------------------------------------
  Common rs_common;
  SolverFlags rs_solver;
  RobselConfig rs;
  bool rs_no_fit = false, rs_original_mean = false;
  std::string rs_precision, rs_edges, rs_samples;
  auto* robsel = app.add_subcommand("robsel", "Bootstrap choice of lambda for a target alpha, then fit");
  add_input(robsel, rs_common);
  add_solver(robsel, rs_solver);
  robsel->add_option("--alpha", rs.alpha, "Error tolerance in (0, 1)")->required();
  robsel->add_option("--bootstrap", rs.bootstrap, "Bootstrap replicates B")->check(CLI::PositiveNumber);
  robsel->add_option("--seed", rs.seed, "Random seed");
  robsel->add_flag("--center-original-mean", rs_original_mean,
                   "Center bootstrap replicates at the original data mean");
  robsel->add_flag("--no-fit", rs_no_fit, "Only report lambda");
  robsel->add_option("--output-precision", rs_precision, "Write K as CSV");
  robsel->add_option("--output-edges", rs_edges, "Write the edge list as CSV");
  robsel->add_option("--output-samples", rs_samples, "Write the sorted bootstrap RWP samples");

  // test --------------------------------------------------------------------
  Common t_common;
  double t_alpha = 0.05;
  std::string t_method = "holm", t_pvalues, t_edges;
  auto* test = app.add_subcommand("test", "Partial-correlation tests with multiplicity adjustment");
  add_input(test, t_common);
  test->add_option("--alpha", t_alpha, "Family-wise level in (0, 1)")->required();
  test->add_option("--method", t_method, "holm|bonferroni|sidak")
      ->check(CLI::IsMember({"holm", "bonferroni", "sidak"}));
  test->add_option("--output-pvalues", t_pvalues, "Write unadjusted and adjusted p-values");
  test->add_option("--output-edges", t_edges, "Write the edge list as CSV");

  // tune --------------------------------------------------------------------
  Common tu_common;
  SolverFlags tu_solver;
  std::string tu_method = "ebic", tu_scores, tu_precision, tu_edges;
  int tu_folds = 5, tu_grid = 10;
  double tu_gamma = 0.5;
  std::uint64_t tu_seed = 0;
  auto* tune = app.add_subcommand("tune", "Cross-validation or extended BIC over a lambda grid");
  add_input(tune, tu_common);
  add_solver(tune, tu_solver);
  tune->add_option("--method", tu_method, "cv|ebic")->check(CLI::IsMember({"cv", "ebic"}));
  tune->add_option("--folds", tu_folds, "CV folds");
  tune->add_option("--gamma", tu_gamma, "EBIC gamma");
  tune->add_option("--grid-size", tu_grid, "Number of grid values");
  tune->add_option("--seed", tu_seed, "Fold shuffle seed");
  tune->add_option("--output-scores", tu_scores, "Write the (lambda, score) table");
  tune->add_option("--output-precision", tu_precision, "Write K at the chosen lambda");
  tune->add_option("--output-edges", tu_edges, "Write the edge list at the chosen lambda");

  // simulate ----------------------------------------------------------------
  int sim_d = 100;
  long sim_n = 200;
  double sim_prob = 0.02;
  std::uint64_t sim_seed = 0;
  std::string sim_precision, sim_data, sim_edges;
  auto* simulate = app.add_subcommand("simulate", "Random sparse precision matrix and Gaussian sample");
  simulate->add_option("--d", sim_d, "Variables")->check(CLI::Range(2, 100000));
  simulate->add_option("--n", sim_n, "Observations")->check(CLI::Range(2L, 100000000L));
  simulate->add_option("--edge-prob", sim_prob, "Edge probability");
  simulate->add_option("--seed", sim_seed, "Random seed");
  simulate->add_option("--output-precision", sim_precision, "Write the true precision matrix");
  simulate->add_option("--output-data", sim_data, "Write the sampled observations");
  simulate->add_option("--output-edges", sim_edges, "Write the true edge list");
  int unused_threads = 1;
  simulate->add_option("--threads", unused_threads, "Accepted for uniformity; generation is serial")
      ->check(CLI::PositiveNumber);

  // experiment --------------------------------------------------------------
  std::string ex_config, ex_output, ex_summary;
  int ex_threads = default_thread_count();
  auto* experiment = app.add_subcommand("experiment", "Replicated simulation sweep");
  experiment->add_option("--config", ex_config, "Plan file (key = value)")->required();
  experiment->add_option("--output", ex_output, "Per-replicate tidy CSV")->required();
  experiment->add_option("--summary", ex_summary, "Per-cell means and standard errors");
  experiment->add_option("--threads", ex_threads, "Worker threads")->check(CLI::PositiveNumber);

  // evaluate ----------------------------------------------------------------
  std::string ev_edges, ev_reference, ev_nodes, ev_output;
  auto* evaluate = app.add_subcommand("evaluate", "Count estimated edges found in a reference list");
  evaluate->add_option("--edges", ev_edges, "Estimated edge list (node_i,node_j,...)")->required();
  evaluate->add_option("--reference", ev_reference, "Reference interactions (two node-name columns)")->required();
  evaluate->add_option("--nodes", ev_nodes, "Data CSV whose header defines the node names")->required();
  evaluate->add_option("--output", ev_output, "Write the report as CSV");
  evaluate->add_option("--threads", unused_threads, "Accepted for uniformity; evaluation is serial")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*fit) {
      const DataMatrix data = io::read_data_csv(fs::path(fit_common.input));
      const SymmetricMatrix a = empirical_covariance(data, fit_common.covariance());
      const SolverResult r = glasso(a, fit_solver.config(fit_lambda));
      const EdgeSet edges = edges_from_precision(r.precision);
      emit("lambda", fit_lambda);
      emit_fit(r);
      emit("edges", std::to_string(edges.size()));
      write_if(fit_precision, io::matrix_csv(r.precision, data.variable_names()));
      write_if(fit_edges, io::edges_csv(edges, data.variable_names(), &r.precision));
    } else if (*robsel) {
      const DataMatrix data = io::read_data_csv(fs::path(rs_common.input));
      rs.covariance = rs_common.covariance();
      rs.threads = rs_common.threads;
      rs.center_replicate_mean = !rs_original_mean;
      const RobselResult chosen = robsel_lambda(data, rs);
      emit("alpha", rs.alpha);
      emit("bootstrap", std::to_string(rs.bootstrap));
      emit("rank", std::to_string(chosen.order_index + 1));
      emit("lambda", chosen.lambda);
      if (!rs_samples.empty()) {
        std::string text = "rwp\n";
        for (double v : chosen.rwp_samples) text += io::format_real(v) + '\n';
        io::write_atomic(rs_samples, text);
      }
      if (!rs_no_fit) {
        const SolverResult r =
            glasso(empirical_covariance(data, rs.covariance), rs_solver.config(chosen.lambda));
        const EdgeSet edges = edges_from_precision(r.precision);
        emit_fit(r);
        emit("edges", std::to_string(edges.size()));
        write_if(rs_precision, io::matrix_csv(r.precision, data.variable_names()));
        write_if(rs_edges, io::edges_csv(edges, data.variable_names(), &r.precision));
      }
    } else if (*test) {
      const DataMatrix data = io::read_data_csv(fs::path(t_common.input));
      const TestingResult r =
          testing_select_detailed(data, t_alpha, parse_adjustment(t_method), t_common.covariance());
      for (const auto& e : r.pvalues.degenerate)
        std::cerr << "warning: degenerate partial correlation for (" << data.variable_names()[e.i] << ", "
                  << data.variable_names()[e.j] << "); p-value set to 0\n";
      emit("alpha", t_alpha);
      emit("method", t_method);
      emit("edges", std::to_string(r.selection.edges.size()));
      write_if(t_pvalues, pvalues_csv(r.pvalues, data.variable_names()));
      write_if(t_edges, io::edges_csv(r.selection.edges, data.variable_names()));
    } else if (*tune) {
      const DataMatrix data = io::read_data_csv(fs::path(tu_common.input));
      const auto cov = tu_common.covariance();
      const SymmetricMatrix a = empirical_covariance(data, cov);
      const LambdaGrid grid = lambda_grid(a, tu_grid);
      const SolverConfig sc = tu_solver.config();
      const TuningResult r = tu_method == "cv" ? cv_select(data, tu_folds, grid, sc, tu_seed, cov, tu_common.threads)
                                               : ebic_select(data, grid, tu_gamma, sc, cov);
      emit("method", tu_method);
      emit("s_max", grid.s_max);
      emit("lambda", r.chosen_lambda);
      if (!tu_scores.empty()) {
        std::string text = "lambda,score\n";
        for (const auto& [lambda, score] : r.scores)
          text += io::format_real(lambda) + ',' + io::format_real(score) + '\n';
        io::write_atomic(tu_scores, text);
      }
      if (!tu_precision.empty() || !tu_edges.empty()) {
        const SolverResult fitted = glasso(a, tu_solver.config(r.chosen_lambda));
        const EdgeSet edges = edges_from_precision(fitted.precision);
        emit("edges", std::to_string(edges.size()));
        write_if(tu_precision, io::matrix_csv(fitted.precision, data.variable_names()));
        write_if(tu_edges, io::edges_csv(edges, data.variable_names(), &fitted.precision));
      }
    } else if (*simulate) {
      const GroundTruth truth = generate_precision(sim_d, sim_prob, sim_seed);
      const DataMatrix data = sample_gaussian(truth, sim_n, sim_seed);
      emit("d", std::to_string(sim_d));
      emit("n", std::to_string(sim_n));
      emit("edges", std::to_string(truth.edges.size()));
      write_if(sim_precision, io::matrix_csv(truth.omega, data.variable_names()));
      write_if(sim_data, io::data_csv(data));
      write_if(sim_edges, io::edges_csv(truth.edges, data.variable_names(), &truth.omega));
    } else if (*experiment) {
      const ExperimentPlan plan = parse_plan(fs::path(ex_config));
      const ExperimentReport report = run_experiment(plan, ex_threads);
      for (const auto& c : report.cells)
        std::clog << to_string(c.method) << " n=" << c.n << " alpha=" << io::format_optional(c.alpha)
                  << " ok=" << c.ok << " fwer=" << io::format_optional(c.fwer.mean) << '\n';
      io::write_atomic(ex_output, io::report_csv(report.rows));
      write_if(ex_summary, io::summary_csv(report.cells));
      emit("rows", std::to_string(report.rows.size()));
      emit("cells", std::to_string(report.cells.size()));
      emit("true_edges", std::to_string(report.truth.edges.size()));
    } else if (*evaluate) {
      const DataMatrix nodes = io::read_data_csv(fs::path(ev_nodes));
      const EdgeSet estimated = io::read_edge_list(fs::path(ev_edges), nodes.variable_names());
      const EdgeSet reference = io::read_edge_list(fs::path(ev_reference), nodes.variable_names());
      const ValidatedEdgeReport r = validated_edge_report(estimated, reference);
      emit("estimated_edges", std::to_string(r.estimated_count));
      emit("validated_edges", std::to_string(r.validated_count));
      emit("proportion", io::format_optional(r.proportion));
      write_if(ev_output, "estimated_edges,validated_edges,proportion\n" + std::to_string(r.estimated_count) + ',' +
                              std::to_string(r.validated_count) + ',' + io::format_optional(r.proportion) + '\n');
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
