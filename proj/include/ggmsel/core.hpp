#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ggmsel/error.hpp"

namespace ggmsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// DataMatrix: n x d observations, rows are samples.

class DataMatrix {
 public:
  explicit DataMatrix(Matrix values, std::vector<std::string> names = {})
      : values_(std::move(values)), names_(std::move(names)) {
    require(values_.rows() >= 2, ErrorKind::invalid_data,
            "data must have at least 2 observations, got " + std::to_string(values_.rows()));
    require(values_.cols() >= 2, ErrorKind::invalid_data,
            "data must have at least 2 variables, got " + std::to_string(values_.cols()));
    require(values_.allFinite(), ErrorKind::invalid_data, "data contains non-finite entries");
    if (names_.empty()) {
      names_.reserve(static_cast<std::size_t>(d()));
      for (Eigen::Index j = 0; j < d(); ++j) names_.push_back("V" + std::to_string(j + 1));
    }
    require(names_.size() == static_cast<std::size_t>(d()), ErrorKind::invalid_data,
            "variable name count does not match column count");
  }

  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index d() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  const std::vector<std::string>& variable_names() const { return names_; }

 private:
  Matrix values_;
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// SymmetricMatrix: exact symmetry is established at construction by averaging
// the input with its transpose (a + b == b + a in IEEE arithmetic).

class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(const Matrix& m) {
    require(m.rows() == m.cols(), ErrorKind::invalid_input, "matrix must be square");
    require(m.allFinite(), ErrorKind::invalid_input, "matrix contains non-finite entries");
    m_ = 0.5 * (m + m.transpose());
  }

  static SymmetricMatrix identity(Eigen::Index d) { return SymmetricMatrix(Matrix::Identity(d, d)); }
  static SymmetricMatrix zero(Eigen::Index d) { return SymmetricMatrix(Matrix::Zero(d, d)); }

  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

// ---------------------------------------------------------------------------
// EdgeSet: undirected graph over d nodes, stored as sorted (i < j) pairs.

struct Edge {
  int i = 0;
  int j = 0;
  auto operator<=>(const Edge&) const = default;
};

class EdgeSet {
 public:
  EdgeSet() = default;

  explicit EdgeSet(int d, std::vector<Edge> edges = {}) : d_(d), edges_(std::move(edges)) {
    require(d >= 0, ErrorKind::invalid_input, "node count must be nonnegative");
    for (auto& e : edges_) {
      if (e.i > e.j) std::swap(e.i, e.j);
      require(e.i != e.j, ErrorKind::invalid_input, "self-loop at node " + std::to_string(e.i));
      require(e.i >= 0 && e.j < d, ErrorKind::invalid_input,
              "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") out of range");
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  }

  int d() const { return d_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const std::vector<Edge>& edges() const { return edges_; }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

  bool contains(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
  }

  std::size_t intersection_size(const EdgeSet& other) const {
    std::size_t count = 0;
    auto a = edges_.begin();
    auto b = other.edges_.begin();
    while (a != edges_.end() && b != other.edges_.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++count, ++a, ++b;
      }
    }
    return count;
  }

  bool is_subset_of(const EdgeSet& other) const { return intersection_size(other) == size(); }

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  int d_ = 0;
  std::vector<Edge> edges_;
};

inline std::size_t pair_count(int d) {
  return static_cast<std::size_t>(d) * static_cast<std::size_t>(d - 1) / 2;
}

// ---------------------------------------------------------------------------
// Covariance.

struct CovarianceOptions {
  /// Subtract the column means before forming cross-products.
  bool center = true;
  /// Rescale to unit variances (a correlation matrix).
  bool standardize = false;
};

namespace detail {

inline SymmetricMatrix covariance_from_rows(const Matrix& rows, const Vector& mean,
                                            const CovarianceOptions& options) {
  const double n = static_cast<double>(rows.rows());
  Matrix centered = rows.rowwise() - mean.transpose();
  Matrix cov = Matrix::Zero(rows.cols(), rows.cols());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / n);
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  if (options.standardize) {
    const Vector diag = cov.diagonal();
    require((diag.array() > 0.0).all(), ErrorKind::invalid_data,
            "cannot standardize a zero-variance column");
    const Vector inv_sd = diag.array().sqrt().inverse();
    cov = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
    cov.diagonal().setOnes();
  }
  return SymmetricMatrix(cov);
}

inline Vector center_of(const Matrix& rows, const CovarianceOptions& options) {
  return options.center ? Vector(rows.colwise().mean().transpose()) : Vector::Zero(rows.cols());
}

}  // namespace detail

/// Empirical covariance with divisor n: A = (1/n) sum_k (x_k - m)(x_k - m)^T,
/// where m is the column mean (or zero when centering is disabled).
inline SymmetricMatrix empirical_covariance(const DataMatrix& data,
                                            const CovarianceOptions& options = {}) {
  const Matrix& x = data.values();
  return detail::covariance_from_rows(x, detail::center_of(x, options), options);
}

inline constexpr double default_zero_tol = 1e-8;

inline EdgeSet edges_from_precision(const SymmetricMatrix& k, double zero_tol = default_zero_tol) {
  require(zero_tol >= 0.0, ErrorKind::invalid_parameter, "zero_tol must be nonnegative");
  const int d = static_cast<int>(k.dim());
  std::vector<Edge> edges;
  for (int j = 1; j < d; ++j)
    for (int i = 0; i < j; ++i)
      if (std::abs(k(i, j)) > zero_tol) edges.push_back({i, j});
  return EdgeSet(d, std::move(edges));
}

/// Largest absolute off-diagonal entry. For a covariance this is the
/// smallest penalty at which the graphical lasso returns an empty graph.
inline double max_offdiag_abs(const SymmetricMatrix& a) {
  double best = 0.0;
  for (Eigen::Index j = 1; j < a.dim(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) best = std::max(best, std::abs(a(i, j)));
  return best;
}

// ---------------------------------------------------------------------------
// Positive-definite helpers.

inline bool is_positive_definite(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return false;
  return (llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all();
}

/// log det of a positive definite matrix via its Cholesky factor.
inline double log_det_pd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  require(llt.info() == Eigen::Success, ErrorKind::domain, "matrix is not positive definite");
  const Vector diag = llt.matrixLLT().diagonal();
  require((diag.array() > 0.0).all(), ErrorKind::domain, "matrix is not positive definite");
  return 2.0 * diag.array().log().sum();
}

inline Matrix inverse_pd(const Matrix& m, ErrorKind kind = ErrorKind::domain) {
  Eigen::LLT<Matrix> llt(m);
  require(llt.info() == Eigen::Success && (llt.matrixLLT().diagonal().array() > 0.0).all(), kind,
          "matrix is not positive definite");
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

}  // namespace ggmsel
