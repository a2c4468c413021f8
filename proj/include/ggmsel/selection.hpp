#pragma once

#include <optional>
#include <string>

#include "ggmsel/core.hpp"
#include "ggmsel/solver.hpp"

namespace ggmsel {

struct SolverDiagnostics {
  double objective = 0.0;
  double kkt_residual = 0.0;
  int sweeps_used = 0;
  bool converged = false;
};

inline SolverDiagnostics diagnostics_of(const SolverResult& r) {
  return {r.objective, r.kkt_residual, r.sweeps_used, r.converged};
}

/// Outcome of a model-selection procedure. Testing-based selection carries
/// no precision estimate, only the edge set.
struct SelectionResult {
  std::string method;
  std::optional<double> alpha;
  std::optional<double> lambda;
  std::optional<SymmetricMatrix> precision;
  EdgeSet edges;
  std::optional<SolverDiagnostics> diagnostics;
};

}  // namespace ggmsel
