#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ggmsel/core.hpp"
#include "ggmsel/parallel.hpp"
#include "ggmsel/rng.hpp"
#include "ggmsel/solver.hpp"

namespace ggmsel {

/// Strictly decreasing penalties; values.front() == s_max.
struct LambdaGrid {
  std::vector<double> values;
  double s_max = 0.0;
};

struct TuningResult {
  double chosen_lambda = 0.0;
  /// (lambda, score) in grid order.
  std::vector<std::pair<double, double>> scores;
  /// CV only: fold index of each row.
  std::vector<int> fold_assignments;
};

inline constexpr double grid_low_ratio = 0.05;

/// `grid_size` log-spaced values from s_max down to 0.05 s_max, both ends
/// included, where s_max = max_offdiag_abs(A).
inline LambdaGrid lambda_grid(const SymmetricMatrix& a, int grid_size) {
  require(grid_size >= 2, ErrorKind::invalid_parameter, "grid_size must be at least 2");
  LambdaGrid grid;
  grid.s_max = max_offdiag_abs(a);
  require(grid.s_max > 0.0, ErrorKind::degenerate_covariance,
          "covariance has no nonzero off-diagonal entry");
  const double log_ratio = std::log(grid_low_ratio) / static_cast<double>(grid_size - 1);
  grid.values.reserve(static_cast<std::size_t>(grid_size));
  for (int k = 0; k < grid_size; ++k) grid.values.push_back(grid.s_max * std::exp(log_ratio * k));
  grid.values.back() = grid_low_ratio * grid.s_max;
  return grid;
}

namespace detail {

/// Index of the smallest score; ties go to the earlier (larger) lambda.
inline std::size_t argmin_prefer_first(const std::vector<std::pair<double, double>>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i].second < scores[best].second) best = i;
  return best;
}

inline void check_grid(const LambdaGrid& grid) {
  require(!grid.values.empty(), ErrorKind::invalid_parameter, "lambda grid is empty");
  for (double v : grid.values)
    require(v > 0.0, ErrorKind::invalid_parameter, "lambda grid values must be positive");
}

inline Matrix select_rows(const Matrix& x, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
  return out;
}

}  // namespace detail

/// Shuffles row indices with the seeded stream, then deals them round-robin
/// into `folds` groups, so fold sizes differ by at most one.
inline std::vector<int> assign_folds(Eigen::Index n, int folds, std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Engine engine = make_engine(seed, {stream::folds});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(engine, i)]);
  std::vector<int> assignment(order.size());
  for (std::size_t p = 0; p < order.size(); ++p)
    assignment[static_cast<std::size_t>(order[p])] = static_cast<int>(p % static_cast<std::size_t>(folds));
  return assignment;
}

/// Cross-validated graphical lasso loss. For each lambda and fold the model
/// is fit on the training covariance and scored by trace(K A_val) - log det K
/// on the held-out covariance (centered at the held-out mean); the score of
/// lambda is the mean over folds.
inline TuningResult cv_select(const DataMatrix& data, int folds, const LambdaGrid& grid,
                              const SolverConfig& solver_config, std::uint64_t seed,
                              const CovarianceOptions& covariance = {}, int threads = 1) {
  require(folds >= 2, ErrorKind::invalid_parameter, "folds must be at least 2");
  require(data.n() >= folds, ErrorKind::invalid_fold,
          "fewer rows (" + std::to_string(data.n()) + ") than folds (" + std::to_string(folds) + ")");
  detail::check_grid(grid);

  TuningResult out;
  out.fold_assignments = assign_folds(data.n(), folds, seed);

  std::vector<SymmetricMatrix> train_cov, val_cov;
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train, val;
    for (std::size_t r = 0; r < out.fold_assignments.size(); ++r)
      (out.fold_assignments[r] == f ? val : train).push_back(static_cast<Eigen::Index>(r));
    require(train.size() >= 2, ErrorKind::invalid_fold,
            "fold " + std::to_string(f) + " leaves fewer than 2 training rows");
    const Matrix xt = detail::select_rows(data.values(), train);
    const Matrix xv = detail::select_rows(data.values(), val);
    train_cov.push_back(detail::covariance_from_rows(xt, detail::center_of(xt, covariance), covariance));
    val_cov.push_back(detail::covariance_from_rows(xv, detail::center_of(xv, covariance), covariance));
  }

  const std::size_t g = grid.values.size();
  std::vector<double> losses(g * static_cast<std::size_t>(folds));
  parallel_for(losses.size(), threads, [&](std::size_t task) {
    const std::size_t li = task / static_cast<std::size_t>(folds);
    const std::size_t f = task % static_cast<std::size_t>(folds);
    SolverConfig sc = solver_config;
    sc.lambda = grid.values[li];
    const SolverResult fit = glasso(train_cov[f], sc);
    const Matrix& k = fit.precision.matrix();
    losses[task] = k.cwiseProduct(val_cov[f].matrix()).sum() - log_det_pd(k);
  });

  for (std::size_t li = 0; li < g; ++li) {
    double total = 0.0;
    for (int f = 0; f < folds; ++f) total += losses[li * static_cast<std::size_t>(folds) + f];
    out.scores.emplace_back(grid.values[li], total / folds);
  }
  out.chosen_lambda = out.scores[detail::argmin_prefer_first(out.scores)].first;
  return out;
}

/// Gaussian log-likelihood without its additive constant:
/// (n / 2)(log det K - trace(K A)).
inline double gaussian_loglik(const SymmetricMatrix& k, const SymmetricMatrix& a, long n) {
  require(k.dim() == a.dim(), ErrorKind::invalid_input, "dimension mismatch");
  return 0.5 * static_cast<double>(n) * (log_det_pd(k.matrix()) - k.matrix().cwiseProduct(a.matrix()).sum());
}

/// Extended BIC: -2 L + |E| log n + 4 gamma |E| log d, with |E| the number
/// of off-diagonal pairs of K above zero_tol.
inline double ebic_score(const SymmetricMatrix& k, const SymmetricMatrix& a, long n, int d, double gamma,
                         double zero_tol = default_zero_tol) {
  require(gamma >= 0.0, ErrorKind::invalid_parameter, "gamma must be nonnegative");
  const double edges = static_cast<double>(edges_from_precision(k, zero_tol).size());
  return -2.0 * gaussian_loglik(k, a, n) + edges * std::log(static_cast<double>(n)) +
         4.0 * gamma * edges * std::log(static_cast<double>(d));
}

/// Fits every grid value in descending order, each warm-started from the
/// previous fit, and returns the EBIC minimizer.
inline TuningResult ebic_select(const DataMatrix& data, const LambdaGrid& grid, double gamma,
                                const SolverConfig& solver_config,
                                const CovarianceOptions& covariance = {}) {
  detail::check_grid(grid);
  const SymmetricMatrix a = empirical_covariance(data, covariance);
  TuningResult out;
  std::optional<SolverResult> previous;
  for (double lambda : grid.values) {
    SolverConfig sc = solver_config;
    sc.lambda = lambda;
    SolverResult fit = glasso(a, sc, previous ? &*previous : nullptr);
    out.scores.emplace_back(lambda, ebic_score(fit.precision, a, static_cast<long>(data.n()),
                                               static_cast<int>(data.d()), gamma));
    previous = std::move(fit);
  }
  out.chosen_lambda = out.scores[detail::argmin_prefer_first(out.scores)].first;
  return out;
}

}  // namespace ggmsel
