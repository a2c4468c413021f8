#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ggmsel/core.hpp"
#include "ggmsel/selection.hpp"

namespace ggmsel {

enum class Adjustment { holm, bonferroni, sidak };

inline std::string_view to_string(Adjustment method) {
  switch (method) {
    case Adjustment::holm: return "holm";
    case Adjustment::bonferroni: return "bonferroni";
    case Adjustment::sidak: return "sidak";
  }
  return "unknown";
}

inline Adjustment parse_adjustment(std::string_view name) {
  if (name == "holm") return Adjustment::holm;
  if (name == "bonferroni") return Adjustment::bonferroni;
  if (name == "sidak") return Adjustment::sidak;
  fail(ErrorKind::invalid_parameter, "unknown adjustment method '" + std::string(name) + "'");
}

/// Per-pair p-values over the upper triangle, row-major: (0,1), (0,2), ...,
/// (0,d-1), (1,2), ...
struct PValueMatrix {
  int d = 0;
  std::vector<double> unadjusted;
  std::vector<double> adjusted;
  /// Pairs whose sample partial correlation was +-1; their p-value is 0.
  std::vector<Edge> degenerate;

  std::size_t index(int i, int j) const {
    if (i > j) std::swap(i, j);
    const auto row = static_cast<std::size_t>(i);
    return row * static_cast<std::size_t>(d) - row * (row + 1) / 2 +
           static_cast<std::size_t>(j - i - 1);
  }
};

/// R_ij = -P_ij / sqrt(P_ii P_jj) with P = A^{-1}; unit diagonal.
inline SymmetricMatrix partial_correlations(const SymmetricMatrix& a) {
  const Matrix p = inverse_pd(a.matrix(), ErrorKind::singular_input);
  const Vector inv_sd = p.diagonal().array().sqrt().inverse();
  Matrix r = -(inv_sd.asDiagonal() * p * inv_sd.asDiagonal());
  r.diagonal().setOnes();
  return SymmetricMatrix(r);
}

/// Two-sided p-values of Fisher's z-transformed partial correlations:
/// 2 (1 - Phi(sqrt(n - d - 1) |atanh r|)). `adjusted` is left equal to
/// `unadjusted`.
inline PValueMatrix unadjusted_pvalues(const SymmetricMatrix& r, long n, int d) {
  require(r.dim() == d, ErrorKind::invalid_input, "partial correlation dimension mismatch");
  require(n > static_cast<long>(d) + 1, ErrorKind::not_applicable,
          "testing requires n > d + 1 (n = " + std::to_string(n) + ", d = " + std::to_string(d) + ")");
  PValueMatrix out;
  out.d = d;
  out.unadjusted.reserve(pair_count(d));
  const double scale = std::sqrt(static_cast<double>(n - d - 1));
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double rij = std::abs(r(i, j));
      if (rij >= 1.0) {
        out.unadjusted.push_back(0.0);
        out.degenerate.push_back({i, j});
        continue;
      }
      // 2 (1 - Phi(x)) = erfc(x / sqrt 2), without cancellation in the tail.
      const double x = scale * std::atanh(rij);
      out.unadjusted.push_back(std::min(1.0, std::erfc(x / std::sqrt(2.0))));
    }
  }
  out.adjusted = out.unadjusted;
  return out;
}

namespace detail {

inline void check_pvalues(std::span<const double> p) {
  for (double v : p)
    require(v >= 0.0 && v <= 1.0, ErrorKind::invalid_input, "p-values must lie in [0, 1]");
}

}  // namespace detail

/// Holm step-down adjustment, returned in input order:
/// adj_(a) = max_{b <= a} min((m - b + 1) p_(b), 1) over the ascending order.
inline std::vector<double> holm_adjust(std::span<const double> p) {
  detail::check_pvalues(p);
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return p[x] < p[y]; });

  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    const double step = std::min(static_cast<double>(m - b) * p[order[b]], 1.0);
    running = std::max(running, step);
    adjusted[order[b]] = running;
  }
  return adjusted;
}

inline std::vector<double> bonferroni_adjust(std::span<const double> p) {
  detail::check_pvalues(p);
  const double m = static_cast<double>(p.size());
  std::vector<double> adjusted(p.size());
  std::transform(p.begin(), p.end(), adjusted.begin(), [m](double v) { return std::min(m * v, 1.0); });
  return adjusted;
}

/// 1 - (1 - p)^m, evaluated as -expm1(m log1p(-p)).
inline std::vector<double> sidak_adjust(std::span<const double> p) {
  detail::check_pvalues(p);
  const double m = static_cast<double>(p.size());
  std::vector<double> adjusted(p.size());
  std::transform(p.begin(), p.end(), adjusted.begin(), [m](double v) {
    if (v >= 1.0) return 1.0;
    return std::clamp(-std::expm1(m * std::log1p(-v)), v, 1.0);
  });
  return adjusted;
}

inline std::vector<double> adjust_pvalues(std::span<const double> p, Adjustment method) {
  switch (method) {
    case Adjustment::holm: return holm_adjust(p);
    case Adjustment::bonferroni: return bonferroni_adjust(p);
    case Adjustment::sidak: return sidak_adjust(p);
  }
  fail(ErrorKind::invalid_parameter, "unknown adjustment method");
}

struct TestingResult {
  SelectionResult selection;
  PValueMatrix pvalues;
};

/// Edge (i, j) is selected iff its adjusted p-value is at most alpha.
inline EdgeSet edges_from_pvalues(const PValueMatrix& pv, double alpha) {
  std::vector<Edge> edges;
  for (int i = 0; i < pv.d; ++i)
    for (int j = i + 1; j < pv.d; ++j)
      if (pv.adjusted[pv.index(i, j)] <= alpha) edges.push_back({i, j});
  return EdgeSet(pv.d, std::move(edges));
}

inline TestingResult testing_select_detailed(const DataMatrix& data, double alpha, Adjustment method,
                                             const CovarianceOptions& covariance = {}) {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::invalid_parameter, "alpha must lie in (0, 1)");
  const int d = static_cast<int>(data.d());
  require(data.n() > d + 1, ErrorKind::not_applicable,
          "testing requires n > d + 1 (n = " + std::to_string(data.n()) + ", d = " + std::to_string(d) + ")");
  const SymmetricMatrix r = partial_correlations(empirical_covariance(data, covariance));
  TestingResult out;
  out.pvalues = unadjusted_pvalues(r, static_cast<long>(data.n()), d);
  out.pvalues.adjusted = adjust_pvalues(out.pvalues.unadjusted, method);
  out.selection.method = std::string(to_string(method));
  out.selection.alpha = alpha;
  out.selection.edges = edges_from_pvalues(out.pvalues, alpha);
  return out;
}

inline SelectionResult testing_select(const DataMatrix& data, double alpha, Adjustment method,
                                      const CovarianceOptions& covariance = {}) {
  return testing_select_detailed(data, alpha, method, covariance).selection;
}

}  // namespace ggmsel
