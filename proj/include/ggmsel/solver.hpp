#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ggmsel/core.hpp"

namespace ggmsel {

struct SolverConfig {
  double lambda = 0.0;
  /// Penalize the full vec(K) (true) or only its off-diagonal entries.
  bool penalize_diagonal = true;
  double kkt_tol = 1e-6;
  int max_sweeps = 500;

  void validate() const {
    require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::invalid_parameter,
            "lambda must be finite and nonnegative");
    require(kkt_tol > 0.0, ErrorKind::invalid_parameter, "kkt_tol must be positive");
    require(max_sweeps >= 1, ErrorKind::invalid_parameter, "max_sweeps must be at least 1");
  }
};

struct SolverResult {
  SymmetricMatrix precision;   // K
  SymmetricMatrix covariance;  // W = K^{-1}
  double objective = 0.0;
  double kkt_residual = 0.0;
  int sweeps_used = 0;
  bool converged = false;
};

namespace detail {

inline double penalty(const Matrix& k, bool penalize_diagonal) {
  double total = k.cwiseAbs().sum();
  if (!penalize_diagonal) total -= k.diagonal().cwiseAbs().sum();
  return total;
}

inline double kkt_residual_with_inverse(const Matrix& k, const Matrix& w, const Matrix& a,
                                        const SolverConfig& config) {
  const double lambda = config.lambda;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      const double g = a(i, j) - w(i, j);
      const bool penalized = i != j || config.penalize_diagonal;
      double v;
      if (!penalized) {
        v = std::abs(g);
      } else if (k(i, j) == 0.0) {
        v = std::max(0.0, std::abs(g) - lambda);
      } else {
        v = std::abs(g + lambda * (k(i, j) > 0.0 ? 1.0 : -1.0));
      }
      worst = std::max(worst, v);
    }
  }
  return worst;
}

inline void check_pair(const SymmetricMatrix& k, const SymmetricMatrix& a) {
  require(k.dim() == a.dim(), ErrorKind::invalid_input, "dimension mismatch");
}

}  // namespace detail

/// trace(K A) - log det K + lambda * P(K).
inline double objective_value(const SymmetricMatrix& k, const SymmetricMatrix& a,
                              const SolverConfig& config) {
  detail::check_pair(k, a);
  const double log_det = log_det_pd(k.matrix());
  return (k.matrix().cwiseProduct(a.matrix())).sum() - log_det +
         config.lambda * detail::penalty(k.matrix(), config.penalize_diagonal);
}

/// Max-norm violation of the subgradient optimality conditions at K:
///   |A_ij - W_ij| <= lambda            where K_ij == 0,
///   A_ij - W_ij + lambda sign(K_ij) = 0 where K_ij != 0,
/// with W = K^{-1}; unpenalized diagonal entries require A_ii = W_ii.
inline double kkt_residual(const SymmetricMatrix& k, const SymmetricMatrix& a,
                           const SolverConfig& config) {
  detail::check_pair(k, a);
  const Matrix w = inverse_pd(k.matrix(), ErrorKind::domain);
  return detail::kkt_residual_with_inverse(k.matrix(), w, a.matrix(), config);
}

namespace detail {

inline void check_psd(const SymmetricMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.matrix(), Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, a.matrix().cwiseAbs().maxCoeff());
  require(eig.eigenvalues().minCoeff() >= -1e-10 * scale * static_cast<double>(a.dim()),
          ErrorKind::invalid_input, "covariance input is not positive semidefinite");
}

inline SolverResult finish(const Matrix& k_raw, const SymmetricMatrix& a, const SolverConfig& config,
                           int sweeps, bool converged_hint) {
  SymmetricMatrix k(k_raw);
  const Matrix w = inverse_pd(k.matrix(), ErrorKind::singular_input);
  SolverResult result;
  result.kkt_residual = kkt_residual_with_inverse(k.matrix(), w, a.matrix(), config);
  result.objective = objective_value(k, a, config);
  result.precision = std::move(k);
  result.covariance = SymmetricMatrix(w);
  result.sweeps_used = sweeps;
  result.converged = converged_hint && result.kkt_residual <= config.kkt_tol;
  return result;
}

}  // namespace detail

/// Graphical lasso: minimizes trace(K A) - log det K + lambda * P(K) over
/// positive definite K by block coordinate descent on the columns of the
/// covariance estimate W = K^{-1}; each column subproblem is a lasso solved
/// by cyclic coordinate descent.
///
/// Sweeps continue until the KKT residual of the recovered K is within
/// `kkt_tol` or `max_sweeps` is reached (then `converged` is false).
/// A previous result may be supplied as a warm start; it changes the path,
/// not the optimum.
inline SolverResult glasso(const SymmetricMatrix& a, const SolverConfig& config,
                           const SolverResult* warm_start = nullptr) {
  config.validate();
  detail::check_psd(a);
  const Eigen::Index d = a.dim();
  const Matrix& s = a.matrix();
  const double lambda = config.lambda;

  if (lambda == 0.0) {
    // Rank-deficient covariances can pass a Cholesky factorization through
    // rounding, so singularity is judged on the spectrum.
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(s, Eigen::EigenvaluesOnly).eigenvalues();
    const double tol = static_cast<double>(d) * std::numeric_limits<double>::epsilon() * ev.cwiseAbs().maxCoeff();
    require(ev.minCoeff() > tol, ErrorKind::singular_input, "lambda = 0 requires a positive definite covariance");
    Eigen::LLT<Matrix> llt(s);
    Matrix k = llt.solve(Matrix::Identity(d, d));
    return detail::finish(k, a, config, 0, true);
  }

  const double diag_shift = config.penalize_diagonal ? lambda : 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    require(s(j, j) + diag_shift > 0.0, ErrorKind::singular_input,
            "variable " + std::to_string(j) + " has zero variance and an unpenalized diagonal");

  // W holds the running covariance estimate; column j of `beta` holds the
  // lasso coefficients for column j (beta(j, j) unused).
  Matrix w = s;
  Matrix beta = Matrix::Zero(d, d);
  if (warm_start != nullptr && warm_start->covariance.dim() == d) {
    w = warm_start->covariance.matrix();
    const Matrix& kw = warm_start->precision.matrix();
    for (Eigen::Index j = 0; j < d; ++j) {
      beta.col(j) = -kw.col(j) / kw(j, j);
      beta(j, j) = 0.0;
    }
  }
  w.diagonal() = s.diagonal().array() + diag_shift;

  const double scale = std::max(1e-300, s.diagonal().maxCoeff() + diag_shift);
  double tol = 1e-9 * scale;
  Vector wb(d);
  Vector w_old(d);

  auto recover_precision = [&] {
    Matrix k = Matrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      double quad = 0.0;
      for (Eigen::Index i = 0; i < d; ++i)
        if (i != j) quad += w(i, j) * beta(i, j);
      const double kjj = 1.0 / (w(j, j) - quad);
      for (Eigen::Index i = 0; i < d; ++i) k(i, j) = (i == j) ? kjj : -beta(i, j) * kjj;
    }
    return k;
  };

  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      // wb = W_{-j,-j} beta_j, maintained incrementally.
      wb.setZero();
      for (Eigen::Index l = 0; l < d; ++l)
        if (l != j && beta(l, j) != 0.0) wb += beta(l, j) * w.col(l);

      for (int pass = 0; pass < 10000; ++pass) {
        double delta_max = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
          if (k == j) continue;
          const double old = beta(k, j);
          const double partial = s(k, j) - (wb(k) - w(k, k) * old);
          const double shrunk = std::copysign(std::max(std::abs(partial) - lambda, 0.0), partial);
          const double updated = shrunk / w(k, k);
          if (updated != old) {
            const double delta = updated - old;
            beta(k, j) = updated;
            wb += delta * w.col(k);
            delta_max = std::max(delta_max, std::abs(delta) * w(k, k));
          }
        }
        if (delta_max < 1e-3 * tol) break;
      }

      for (Eigen::Index i = 0; i < d; ++i) w_old(i) = w(i, j);
      for (Eigen::Index i = 0; i < d; ++i) {
        if (i == j) continue;
        w(i, j) = wb(i);
        w(j, i) = wb(i);
      }
      for (Eigen::Index i = 0; i < d; ++i)
        if (i != j) max_change = std::max(max_change, std::abs(w(i, j) - w_old(i)));
    }

    if (max_change < tol || sweep == config.max_sweeps) {
      Matrix k = recover_precision();
      SymmetricMatrix ks(k);
      if (is_positive_definite(ks.matrix())) {
        SolverResult result = detail::finish(k, a, config, sweep, true);
        if (result.converged || sweep == config.max_sweeps) return result;
      } else if (sweep == config.max_sweeps) {
        fail(ErrorKind::singular_input, "graphical lasso produced a non-positive-definite estimate");
      }
      tol = std::max(tol * 0.01, 1e-15 * scale);
    }
  }
  fail(ErrorKind::singular_input, "graphical lasso did not produce an estimate");
}

}  // namespace ggmsel
