#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ggmsel/core.hpp"
#include "ggmsel/parallel.hpp"
#include "ggmsel/rng.hpp"
#include "ggmsel/selection.hpp"
#include "ggmsel/solver.hpp"

namespace ggmsel {

struct RobselConfig {
  double alpha = 0.1;
  int bootstrap = 200;
  std::uint64_t seed = 0;
  /// Center each bootstrap replicate at its own mean (true) or at the mean
  /// of the original data (false). Ignored when covariance centering is off.
  bool center_replicate_mean = true;
  CovarianceOptions covariance{};
  int threads = 1;

  void validate() const {
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::invalid_parameter, "alpha must lie in (0, 1)");
    require(bootstrap >= 1, ErrorKind::invalid_parameter, "bootstrap count must be at least 1");
  }
};

struct RobselResult {
  double alpha = 0.0;
  double lambda = 0.0;
  /// Bootstrap RWP values, ascending.
  std::vector<double> rwp_samples;
  /// Zero-based position of lambda in rwp_samples.
  std::size_t order_index = 0;
};

/// Robust Wasserstein profile value of K at A: the entrywise max-norm of
/// A - K over the full matrix, diagonal included.
inline double rwp(const SymmetricMatrix& a, const SymmetricMatrix& k) {
  require(a.dim() == k.dim(), ErrorKind::invalid_input, "dimension mismatch");
  return (a.matrix() - k.matrix()).cwiseAbs().maxCoeff();
}

/// One-based rank ceil((B + 1)(1 - alpha)) clamped to [1, B].
inline std::size_t robsel_rank(double alpha, int bootstrap) {
  const double raw = (static_cast<double>(bootstrap) + 1.0) * (1.0 - alpha);
  // Absorb representation error so that e.g. 100 * 0.9 ranks as 90, not 91.
  const double rank = std::ceil(raw - 1e-9 * std::max(1.0, raw));
  return static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(bootstrap)));
}

/// Sorted bootstrap RWP samples R*_b = ||A*_b - A||_max, b = 1..B. Replicate
/// b draws from the stream keyed by (seed, b) only, so the output does not
/// depend on the thread count.
inline std::vector<double> bootstrap_rwp_samples(const DataMatrix& data, const RobselConfig& config) {
  config.validate();
  const Matrix& x = data.values();
  const Eigen::Index n = data.n();
  const Vector base_mean = detail::center_of(x, config.covariance);
  const SymmetricMatrix a = detail::covariance_from_rows(x, base_mean, config.covariance);

  std::vector<double> samples(static_cast<std::size_t>(config.bootstrap));
  parallel_for(samples.size(), config.threads, [&](std::size_t b) {
    Engine engine = make_engine(config.seed, {stream::bootstrap, b});
    Matrix rows(n, data.d());
    for (Eigen::Index r = 0; r < n; ++r)
      rows.row(r) = x.row(static_cast<Eigen::Index>(uniform_index(engine, static_cast<std::size_t>(n))));
    const Vector mean = (config.covariance.center && config.center_replicate_mean)
                            ? detail::center_of(rows, config.covariance)
                            : base_mean;
    samples[b] = rwp(detail::covariance_from_rows(rows, mean, config.covariance), a);
  });
  std::sort(samples.begin(), samples.end());
  return samples;
}

/// Selects lambda from already-sorted bootstrap samples.
inline RobselResult robsel_from_samples(std::vector<double> sorted_samples, double alpha) {
  require(!sorted_samples.empty(), ErrorKind::invalid_parameter, "no bootstrap samples");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::invalid_parameter, "alpha must lie in (0, 1)");
  RobselResult result;
  result.alpha = alpha;
  result.order_index = robsel_rank(alpha, static_cast<int>(sorted_samples.size())) - 1;
  result.lambda = sorted_samples[result.order_index];
  result.rwp_samples = std::move(sorted_samples);
  return result;
}

/// Bootstrap estimate of the regularization level whose ambiguity set
/// covers the empirical covariance with confidence 1 - alpha.
inline RobselResult robsel_lambda(const DataMatrix& data, const RobselConfig& config) {
  return robsel_from_samples(bootstrap_rwp_samples(data, config), config.alpha);
}

inline SelectionResult robsel_fit(const DataMatrix& data, const RobselConfig& config,
                                  const SolverConfig& solver_config) {
  const RobselResult chosen = robsel_lambda(data, config);
  SolverConfig sc = solver_config;
  sc.lambda = chosen.lambda;
  const SolverResult fit = glasso(empirical_covariance(data, config.covariance), sc);

  SelectionResult out;
  out.method = "robsel";
  out.alpha = config.alpha;
  out.lambda = chosen.lambda;
  out.edges = edges_from_precision(fit.precision);
  out.precision = fit.precision;
  out.diagnostics = diagnostics_of(fit);
  return out;
}

}  // namespace ggmsel
