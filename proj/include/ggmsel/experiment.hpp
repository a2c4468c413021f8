#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ggmsel/core.hpp"
#include "ggmsel/io.hpp"
#include "ggmsel/metrics.hpp"
#include "ggmsel/parallel.hpp"
#include "ggmsel/robsel.hpp"
#include "ggmsel/simulation.hpp"
#include "ggmsel/solver.hpp"
#include "ggmsel/testing.hpp"
#include "ggmsel/tuning.hpp"

namespace ggmsel {

enum class Method { robsel, holm, bonferroni, sidak, cv, ebic };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::robsel: return "robsel";
    case Method::holm: return "holm";
    case Method::bonferroni: return "bonferroni";
    case Method::sidak: return "sidak";
    case Method::cv: return "cv";
    case Method::ebic: return "ebic";
  }
  return "unknown";
}

inline Method parse_method(std::string_view name) {
  for (Method m : {Method::robsel, Method::holm, Method::bonferroni, Method::sidak, Method::cv, Method::ebic})
    if (to_string(m) == name) return m;
  fail(ErrorKind::invalid_parameter, "unknown method '" + std::string(name) + "'");
}

inline bool uses_alpha(Method m) { return m != Method::cv && m != Method::ebic; }

struct ExperimentPlan {
  int d = 50;
  double edge_prob = 0.02;
  std::vector<long> sample_sizes{200, 800, 3200};
  int replications = 100;
  std::vector<double> alphas{0.1};
  int bootstrap = 200;
  std::uint64_t seed = 1;
  std::vector<Method> methods{Method::robsel, Method::holm};
  bool penalize_diagonal = true;
  int cv_folds = 5;
  double ebic_gamma = 0.5;
  int grid_size = 10;
  bool record_timing = false;

  void validate() const {
    require(d >= 2, ErrorKind::invalid_parameter, "d must be at least 2");
    require(edge_prob > 0.0 && edge_prob < 1.0, ErrorKind::invalid_parameter, "edge_prob must lie in (0, 1)");
    require(!sample_sizes.empty(), ErrorKind::invalid_parameter, "sample_sizes is empty");
    for (long n : sample_sizes) require(n >= 2, ErrorKind::invalid_parameter, "sample sizes must be at least 2");
    require(replications >= 1, ErrorKind::invalid_parameter, "replications must be at least 1");
    require(!alphas.empty(), ErrorKind::invalid_parameter, "alphas is empty");
    for (double a : alphas) require(a > 0.0 && a < 1.0, ErrorKind::invalid_parameter, "alphas must lie in (0, 1)");
    require(bootstrap >= 1, ErrorKind::invalid_parameter, "bootstrap must be at least 1");
    require(!methods.empty(), ErrorKind::invalid_parameter, "methods is empty");
    require(cv_folds >= 2, ErrorKind::invalid_parameter, "cv_folds must be at least 2");
    require(ebic_gamma >= 0.0, ErrorKind::invalid_parameter, "ebic_gamma must be nonnegative");
    require(grid_size >= 2, ErrorKind::invalid_parameter, "grid_size must be at least 2");
  }
};

namespace detail {

template <typename T>
T parse_scalar(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  require(!in.fail() && (in >> std::ws).eof(), ErrorKind::parse,
          "plan key '" + key + "': cannot parse '" + text + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& field : io::split_csv_line(text)) out.push_back(parse_scalar<T>(key, field));
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorKind::parse, "plan key '" + key + "': expected true or false, got '" + text + "'");
}

}  // namespace detail

/// Parses a `key = value` plan; '#' starts a comment, lists are comma
/// separated. Keys: d, edge_prob, sample_sizes, replications, alphas,
/// bootstrap, seed, methods, penalize_diagonal, cv_folds, ebic_gamma,
/// grid_size, record_timing. Unset keys keep their defaults.
inline ExperimentPlan parse_plan(std::istream& in, const std::string& source = "<plan>") {
  ExperimentPlan plan;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (io::trim(line).empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::parse,
            source + ": line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = io::trim(std::string_view(line).substr(0, eq));
    const std::string value = io::trim(std::string_view(line).substr(eq + 1));
    using namespace detail;
    if (key == "d") plan.d = parse_scalar<int>(key, value);
    else if (key == "edge_prob") plan.edge_prob = parse_scalar<double>(key, value);
    else if (key == "sample_sizes") plan.sample_sizes = parse_list<long>(key, value);
    else if (key == "replications") plan.replications = parse_scalar<int>(key, value);
    else if (key == "alphas") plan.alphas = parse_list<double>(key, value);
    else if (key == "bootstrap") plan.bootstrap = parse_scalar<int>(key, value);
    else if (key == "seed") plan.seed = parse_scalar<std::uint64_t>(key, value);
    else if (key == "methods") {
      plan.methods.clear();
      for (const auto& name : io::split_csv_line(value)) plan.methods.push_back(parse_method(name));
    } else if (key == "penalize_diagonal") plan.penalize_diagonal = parse_bool(key, value);
    else if (key == "cv_folds") plan.cv_folds = parse_scalar<int>(key, value);
    else if (key == "ebic_gamma") plan.ebic_gamma = parse_scalar<double>(key, value);
    else if (key == "grid_size") plan.grid_size = parse_scalar<int>(key, value);
    else if (key == "record_timing") plan.record_timing = parse_bool(key, value);
    else fail(ErrorKind::parse, source + ": line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  plan.validate();
  return plan;
}

inline ExperimentPlan parse_plan(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return parse_plan(in, path.string());
}

/// One (method, n, alpha, replicate) outcome. `status` is "ok",
/// "not_applicable", or "error: <message>".
struct ReportRow {
  Method method = Method::robsel;
  long n = 0;
  std::optional<double> alpha;
  int replicate = 0;
  std::optional<MetricRecord> metrics;
  std::optional<double> jaccard_robsel_holm;
  std::optional<double> lambda;
  std::optional<double> runtime_seconds;
  std::string status = "ok";
};

struct SummaryStat {
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> standard_error;
};

struct CellSummary {
  Method method = Method::robsel;
  long n = 0;
  std::optional<double> alpha;
  std::size_t ok = 0;
  std::size_t not_applicable = 0;
  std::size_t failed = 0;
  SummaryStat fwer, tpr, fpr, mcc, jaccard_vs_truth, jaccard_robsel_holm, lambda;
};

struct ExperimentReport {
  GroundTruth truth;
  std::vector<ReportRow> rows;
  std::vector<CellSummary> cells;
};

namespace detail {

inline SummaryStat summarize(const std::vector<double>& values) {
  SummaryStat s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  s.mean = mean;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    s.standard_error = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return s;
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Runs every method of the plan on one simulated dataset. Row order:
/// alpha-dependent methods by (method, alpha), then cv, ebic.
inline std::vector<ReportRow> run_replicate(const ExperimentPlan& plan, const GroundTruth& truth, long n,
                                            int replicate) {
  const auto has = [&](Method m) { return std::ranges::find(plan.methods, m) != plan.methods.end(); };
  const auto key = [&](std::uint64_t tag) {
    return stream_key(plan.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replicate), tag});
  };
  const DataMatrix data = sample_gaussian(truth, n, key(stream::data));
  SolverConfig solver;
  solver.penalize_diagonal = plan.penalize_diagonal;

  auto make_row = [&](Method m, std::optional<double> alpha) {
    ReportRow row;
    row.method = m;
    row.n = n;
    row.alpha = alpha;
    row.replicate = replicate;
    return row;
  };
  auto record = [&](ReportRow& row, const EdgeSet& edges) {
    row.metrics = metrics_from_confusion(confusion(edges, truth.edges));
  };

  std::vector<ReportRow> rows;
  const std::size_t na = plan.alphas.size();
  std::vector<std::optional<EdgeSet>> robsel_edges(na), holm_edges(na);

  for (Method m : plan.methods) {
    if (!uses_alpha(m)) continue;
    if (m == Method::robsel) {
      std::vector<double> samples;
      std::string error;
      const auto start = Clock::now();
      double bootstrap_time = 0.0;
      try {
        RobselConfig rc;
        rc.bootstrap = plan.bootstrap;
        rc.seed = key(stream::bootstrap);
        samples = bootstrap_rwp_samples(data, rc);
        bootstrap_time = seconds_since(start);
      } catch (const std::exception& e) {
        error = e.what();
      }
      const SymmetricMatrix a = empirical_covariance(data);
      for (std::size_t ai = 0; ai < na; ++ai) {
        ReportRow row = make_row(m, plan.alphas[ai]);
        const auto fit_start = Clock::now();
        try {
          if (!error.empty()) fail(ErrorKind::invalid_data, error);
          const RobselResult chosen = robsel_from_samples(samples, plan.alphas[ai]);
          SolverConfig sc = solver;
          sc.lambda = chosen.lambda;
          const SolverResult fit = glasso(a, sc);
          const EdgeSet edges = edges_from_precision(fit.precision);
          row.lambda = chosen.lambda;
          record(row, edges);
          robsel_edges[ai] = edges;
        } catch (const std::exception& e) {
          row.status = std::string("error: ") + e.what();
        }
        if (plan.record_timing) row.runtime_seconds = bootstrap_time + seconds_since(fit_start);
        rows.push_back(std::move(row));
      }
      continue;
    }

    const Adjustment adj = m == Method::holm ? Adjustment::holm
                         : m == Method::bonferroni ? Adjustment::bonferroni
                                                   : Adjustment::sidak;
    std::optional<PValueMatrix> pv;
    std::string error;
    bool applicable = n > plan.d + 1;
    const auto start = Clock::now();
    if (applicable) {
      try {
        pv = unadjusted_pvalues(partial_correlations(empirical_covariance(data)), n, plan.d);
        pv->adjusted = adjust_pvalues(pv->unadjusted, adj);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::not_applicable) applicable = false;
        else error = e.what();
      } catch (const std::exception& e) {
        error = e.what();
      }
    }
    const double elapsed = seconds_since(start);
    for (std::size_t ai = 0; ai < na; ++ai) {
      ReportRow row = make_row(m, plan.alphas[ai]);
      if (!applicable) {
        row.status = "not_applicable";
      } else if (!error.empty()) {
        row.status = "error: " + error;
      } else {
        const EdgeSet edges = edges_from_pvalues(*pv, plan.alphas[ai]);
        record(row, edges);
        if (m == Method::holm) holm_edges[ai] = edges;
        if (plan.record_timing) row.runtime_seconds = elapsed;
      }
      rows.push_back(std::move(row));
    }
  }

  for (auto& row : rows) {
    if (row.method != Method::robsel && row.method != Method::holm) continue;
    const auto ai = static_cast<std::size_t>(
        std::ranges::find(plan.alphas, *row.alpha) - plan.alphas.begin());
    if (robsel_edges[ai] && holm_edges[ai]) row.jaccard_robsel_holm = jaccard(*robsel_edges[ai], *holm_edges[ai]);
  }

  for (Method m : {Method::cv, Method::ebic}) {
    if (!has(m)) continue;
    ReportRow row = make_row(m, std::nullopt);
    const auto start = Clock::now();
    try {
      const SymmetricMatrix a = empirical_covariance(data);
      const LambdaGrid grid = lambda_grid(a, plan.grid_size);
      const TuningResult tuned = m == Method::cv ? cv_select(data, plan.cv_folds, grid, solver, key(stream::folds))
                                                 : ebic_select(data, grid, plan.ebic_gamma, solver);
      SolverConfig sc = solver;
      sc.lambda = tuned.chosen_lambda;
      const SolverResult fit = glasso(a, sc);
      row.lambda = tuned.chosen_lambda;
      record(row, edges_from_precision(fit.precision));
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    if (plan.record_timing) row.runtime_seconds = seconds_since(start);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

/// Aggregates rows into per-(method, n, alpha) cells, in first-seen order.
inline std::vector<CellSummary> summarize_rows(const std::vector<ReportRow>& rows) {
  struct Accum {
    CellSummary cell;
    std::vector<double> fwer, tpr, fpr, mcc, jac, jrh, lambda;
  };
  std::vector<Accum> accums;
  for (const auto& row : rows) {
    auto it = std::ranges::find_if(accums, [&](const Accum& a) {
      return a.cell.method == row.method && a.cell.n == row.n && a.cell.alpha == row.alpha;
    });
    if (it == accums.end()) {
      accums.emplace_back();
      accums.back().cell.method = row.method;
      accums.back().cell.n = row.n;
      accums.back().cell.alpha = row.alpha;
      it = std::prev(accums.end());
    }
    Accum& a = *it;
    if (row.status == "not_applicable") {
      ++a.cell.not_applicable;
      continue;
    }
    if (!row.metrics) {
      ++a.cell.failed;
      continue;
    }
    ++a.cell.ok;
    a.fwer.push_back(row.metrics->fwer_indicator);
    if (row.metrics->tpr) a.tpr.push_back(*row.metrics->tpr);
    if (row.metrics->fpr) a.fpr.push_back(*row.metrics->fpr);
    a.mcc.push_back(row.metrics->mcc);
    a.jac.push_back(row.metrics->jaccard);
    if (row.jaccard_robsel_holm) a.jrh.push_back(*row.jaccard_robsel_holm);
    if (row.lambda) a.lambda.push_back(*row.lambda);
  }
  std::vector<CellSummary> cells;
  for (auto& a : accums) {
    a.cell.fwer = detail::summarize(a.fwer);
    a.cell.tpr = detail::summarize(a.tpr);
    a.cell.fpr = detail::summarize(a.fpr);
    a.cell.mcc = detail::summarize(a.mcc);
    a.cell.jaccard_vs_truth = detail::summarize(a.jac);
    a.cell.jaccard_robsel_holm = detail::summarize(a.jrh);
    a.cell.lambda = detail::summarize(a.lambda);
    cells.push_back(std::move(a.cell));
  }
  return cells;
}

/// Runs the replicated sweep. The ground truth comes from `plan.seed`; each
/// (n, replicate) dataset and its bootstrap and fold streams are keyed by
/// (seed, n, replicate), so the report is identical for any thread count.
inline ExperimentReport run_experiment(const ExperimentPlan& plan, int threads = 1) {
  plan.validate();
  ExperimentReport report;
  report.truth = generate_precision(plan.d, plan.edge_prob, plan.seed);

  const std::size_t reps = static_cast<std::size_t>(plan.replications);
  std::vector<std::vector<ReportRow>> per_task(plan.sample_sizes.size() * reps);
  parallel_for(per_task.size(), threads, [&](std::size_t task) {
    const long n = plan.sample_sizes[task / reps];
    const int replicate = static_cast<int>(task % reps);
    try {
      per_task[task] = detail::run_replicate(plan, report.truth, n, replicate);
    } catch (const std::exception& e) {
      for (Method m : plan.methods) {
        const auto n_alpha = uses_alpha(m) ? plan.alphas.size() : 1;
        for (std::size_t ai = 0; ai < n_alpha; ++ai) {
          ReportRow row;
          row.method = m;
          row.n = n;
          if (uses_alpha(m)) row.alpha = plan.alphas[ai];
          row.replicate = replicate;
          row.status = std::string("error: ") + e.what();
          per_task[task].push_back(std::move(row));
        }
      }
    }
  });

  // Rows ordered by (n, method as listed in the plan, alpha, replicate).
  const auto method_pos = [&](Method m) { return std::ranges::find(plan.methods, m) - plan.methods.begin(); };
  const auto alpha_pos = [&](const std::optional<double>& a) {
    return a ? std::ranges::find(plan.alphas, *a) - plan.alphas.begin() : 0;
  };
  for (std::size_t ni = 0; ni < plan.sample_sizes.size(); ++ni) {
    std::vector<ReportRow> block;
    for (std::size_t r = 0; r < reps; ++r)
      for (auto& row : per_task[ni * reps + r]) block.push_back(std::move(row));
    std::ranges::stable_sort(block, [&](const ReportRow& x, const ReportRow& y) {
      return std::tuple(method_pos(x.method), alpha_pos(x.alpha), x.replicate) <
             std::tuple(method_pos(y.method), alpha_pos(y.alpha), y.replicate);
    });
    for (auto& row : block) report.rows.push_back(std::move(row));
  }
  report.cells = summarize_rows(report.rows);
  return report;
}

namespace io {

inline std::string csv_field(std::string text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c == '\n' ? ' ' : c;
  }
  return quoted + "\"";
}

inline std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "method,n,alpha,replicate,fwer_indicator,tpr,fpr,mcc,jaccard_vs_truth,jaccard_robsel_holm,lambda,"
         "runtime_seconds,status\n";
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << r.n << ',' << format_optional(r.alpha) << ',' << r.replicate << ',';
    if (r.metrics) {
      out << r.metrics->fwer_indicator << ',' << format_optional(r.metrics->tpr) << ','
          << format_optional(r.metrics->fpr) << ',' << format_real(r.metrics->mcc) << ','
          << format_real(r.metrics->jaccard) << ',';
    } else {
      out << ",,,,,";
    }
    out << format_optional(r.jaccard_robsel_holm) << ',' << format_optional(r.lambda) << ','
        << format_optional(r.runtime_seconds) << ',' << csv_field(r.status) << '\n';
  }
  return out.str();
}

inline std::string summary_csv(const std::vector<CellSummary>& cells) {
  std::ostringstream out;
  out << "method,n,alpha,replicates_ok,replicates_not_applicable,replicates_failed";
  for (const char* name : {"fwer", "tpr", "fpr", "mcc", "jaccard_vs_truth", "jaccard_robsel_holm", "lambda"})
    out << ',' << name << "_mean," << name << "_se";
  out << '\n';
  for (const auto& c : cells) {
    out << to_string(c.method) << ',' << c.n << ',' << format_optional(c.alpha) << ',' << c.ok << ','
        << c.not_applicable << ',' << c.failed;
    for (const SummaryStat* s : {&c.fwer, &c.tpr, &c.fpr, &c.mcc, &c.jaccard_vs_truth, &c.jaccard_robsel_holm,
                                 &c.lambda})
      out << ',' << format_optional(s->mean) << ',' << format_optional(s->standard_error);
    out << '\n';
  }
  return out.str();
}

}  // namespace io

}  // namespace ggmsel
