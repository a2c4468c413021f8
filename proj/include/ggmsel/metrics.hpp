#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "ggmsel/core.hpp"

namespace ggmsel {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Undefined ratios (0/0) are empty optionals.
struct MetricRecord {
  int fwer_indicator = 0;
  std::optional<double> tpr;
  std::optional<double> fpr;
  double mcc = 0.0;
  double jaccard = 1.0;
};

/// Counts over all C(d, 2) node pairs; a positive is an estimated edge.
inline ConfusionCounts confusion(const EdgeSet& estimated, const EdgeSet& truth) {
  require(estimated.d() == truth.d(), ErrorKind::invalid_input,
          "edge sets are over different node counts");
  ConfusionCounts c;
  c.tp = estimated.intersection_size(truth);
  c.fp = estimated.size() - c.tp;
  c.fn = truth.size() - c.tp;
  c.tn = pair_count(truth.d()) - c.tp - c.fp - c.fn;
  return c;
}

inline MetricRecord metrics_from_confusion(const ConfusionCounts& c) {
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn);
  const auto fn = static_cast<double>(c.fn);

  MetricRecord m;
  m.fwer_indicator = c.fp > 0 ? 1 : 0;
  if (c.tp + c.fn > 0) m.tpr = tp / (tp + fn);
  if (c.fp + c.tn > 0) m.fpr = fp / (fp + tn);

  // Standard MCC (with the square root); any zero marginal gives 0.
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  m.mcc = denom > 0.0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;

  // |A n B| / |A u B| with J(empty, empty) = 1.
  const std::uint64_t uni = c.tp + c.fp + c.fn;
  m.jaccard = uni == 0 ? 1.0 : tp / static_cast<double>(uni);
  return m;
}

inline double jaccard(const EdgeSet& a, const EdgeSet& b) {
  const std::size_t inter = a.intersection_size(b);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct ValidatedEdgeReport {
  std::size_t estimated_count = 0;
  std::size_t validated_count = 0;
  /// validated / estimated; empty when nothing was estimated.
  std::optional<double> proportion;
};

/// How many estimated edges appear in a reference interaction list.
inline ValidatedEdgeReport validated_edge_report(const EdgeSet& estimated, const EdgeSet& reference) {
  require(estimated.d() == reference.d(), ErrorKind::invalid_input,
          "edge sets are over different node counts");
  ValidatedEdgeReport r;
  r.estimated_count = estimated.size();
  r.validated_count = estimated.intersection_size(reference);
  if (r.estimated_count > 0)
    r.proportion = static_cast<double>(r.validated_count) / static_cast<double>(r.estimated_count);
  return r;
}

}  // namespace ggmsel
