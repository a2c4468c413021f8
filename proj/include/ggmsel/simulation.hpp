#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ggmsel/core.hpp"
#include "ggmsel/rng.hpp"

namespace ggmsel {

struct GroundTruth {
  SymmetricMatrix omega;  // true precision
  EdgeSet edges;
  SymmetricMatrix sigma;  // omega^{-1}
};

inline constexpr int diagonal_resample_attempts = 100;

/// Random sparse precision matrix:
///  1. Erdos-Renyi adjacency over the C(d, 2) pairs with probability edge_prob;
///  2. edge weights Uniform[0.5, 1] with a fair random sign;
///  3. each row's off-diagonal entries divided by 1.5x that row's absolute
///     off-diagonal sum, averaged with the transpose, unit diagonal;
///  4. diagonal redrawn Uniform[1, 1.5], retried until Cholesky succeeds.
inline GroundTruth generate_precision(int d, double edge_prob, std::uint64_t seed) {
  require(d >= 2, ErrorKind::invalid_parameter, "d must be at least 2");
  require(edge_prob > 0.0 && edge_prob < 1.0, ErrorKind::invalid_parameter,
          "edge_prob must lie in (0, 1)");

  Engine engine = make_engine(seed, {stream::truth});
  Matrix m = Matrix::Zero(d, d);
  std::vector<Edge> adjacency;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      if (uniform(engine, 0.0, 1.0) >= edge_prob) continue;
      const double magnitude = uniform(engine, 0.5, 1.0);
      const double sign = uniform(engine, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
      m(i, j) = m(j, i) = sign * magnitude;
      adjacency.push_back({i, j});
    }
  }

  for (int i = 0; i < d; ++i) {
    const double row_sum = m.row(i).cwiseAbs().sum();
    if (row_sum > 0.0) m.row(i) /= 1.5 * row_sum;
  }
  Matrix omega = 0.5 * (m + m.transpose());

  Engine diag_engine = make_engine(seed, {stream::diagonal});
  for (int attempt = 0; attempt < diagonal_resample_attempts; ++attempt) {
    for (int i = 0; i < d; ++i) omega(i, i) = uniform(diag_engine, 1.0, 1.5);
    if (!is_positive_definite(omega)) continue;
    SymmetricMatrix om(omega);
    SymmetricMatrix sigma(inverse_pd(om.matrix(), ErrorKind::generation));
    return GroundTruth{std::move(om), EdgeSet(d, std::move(adjacency)), std::move(sigma)};
  }
  fail(ErrorKind::generation, "could not obtain a positive definite precision matrix (seed " +
                                  std::to_string(seed) + ")");
}

/// Identity precision: the global null with no edges.
inline GroundTruth identity_truth(int d) {
  return GroundTruth{SymmetricMatrix::identity(d), EdgeSet(d), SymmetricMatrix::identity(d)};
}

/// n draws from N(0, sigma) as L z with L the lower Cholesky factor of
/// sigma. Rows are drawn in order from one stream, so the first rows of a
/// larger sample equal a smaller sample with the same seed.
inline DataMatrix sample_gaussian(const GroundTruth& truth, Eigen::Index n, std::uint64_t seed) {
  require(n >= 2, ErrorKind::invalid_parameter, "sample size must be at least 2");
  const Eigen::Index d = truth.sigma.dim();
  Eigen::LLT<Matrix> llt(truth.sigma.matrix());
  require(llt.info() == Eigen::Success, ErrorKind::domain, "covariance is not positive definite");
  const Matrix lower = llt.matrixL();

  Engine engine = make_engine(seed, {stream::data});
  Matrix x(n, d);
  Vector z(d);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) z(c) = standard_normal(engine);
    x.row(r) = (lower.triangularView<Eigen::Lower>() * z).transpose();
  }
  return DataMatrix(std::move(x));
}

}  // namespace ggmsel
