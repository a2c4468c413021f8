#include <gtest/gtest.h>

#include <cmath>

#include "ggmsel/metrics.hpp"
#include "ggmsel/rng.hpp"

using namespace ggmsel;

namespace {

EdgeSet random_edges(int d, Engine& e, double p) {
  std::vector<Edge> edges;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (uniform(e, 0.0, 1.0) < p) edges.push_back({i, j});
  return EdgeSet(d, edges);
}

}  // namespace

TEST(Confusion, HandExample) {
  // d = 8 gives 28 pairs: tp 3, fp 1, fn 2, tn 22.
  const EdgeSet truth(8, {{0, 1}, {0, 2}, {0, 3}, {4, 5}, {6, 7}});
  const EdgeSet est(8, {{0, 1}, {0, 2}, {0, 3}, {1, 2}});
  const auto c = confusion(est, truth);
  EXPECT_EQ(c, (ConfusionCounts{3, 1, 22, 2}));
  const auto m = metrics_from_confusion(c);
  EXPECT_EQ(m.fwer_indicator, 1);
  EXPECT_DOUBLE_EQ(*m.tpr, 0.6);
  EXPECT_DOUBLE_EQ(*m.fpr, 1.0 / 23.0);
  EXPECT_DOUBLE_EQ(m.jaccard, 0.5);
  EXPECT_NEAR(m.mcc, (3.0 * 22 - 1 * 2) / std::sqrt(4.0 * 5 * 23 * 24), 1e-15);
}

TEST(Confusion, EmptyAndFullSets) {
  const EdgeSet none(5, {});
  const auto m = metrics_from_confusion(confusion(none, none));
  EXPECT_EQ(m.jaccard, 1.0);
  EXPECT_EQ(m.mcc, 0.0);
  EXPECT_FALSE(m.tpr.has_value());
  EXPECT_DOUBLE_EQ(*m.fpr, 0.0);
  EXPECT_EQ(jaccard(none, none), 1.0);

  std::vector<Edge> all;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) all.push_back({i, j});
  const EdgeSet full(4, all);
  const auto f = metrics_from_confusion(confusion(full, full));
  EXPECT_FALSE(f.fpr.has_value());
  EXPECT_EQ(*f.tpr, 1.0);
  EXPECT_THROW(confusion(none, full), Error);
}

TEST(Confusion, MatchesEnumeration) {
  Engine e = make_engine(5);
  for (int trial = 0; trial < 500; ++trial) {
    const EdgeSet a = random_edges(6, e, 0.3);
    const EdgeSet b = random_edges(6, e, 0.3);
    ConfusionCounts expect;
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) {
        const bool in_a = a.contains(i, j), in_b = b.contains(i, j);
        if (in_a && in_b) ++expect.tp;
        else if (in_a) ++expect.fp;
        else if (in_b) ++expect.fn;
        else ++expect.tn;
      }
    EXPECT_EQ(confusion(a, b), expect);
    const auto m = metrics_from_confusion(expect);
    EXPECT_GE(m.mcc, -1.0);
    EXPECT_LE(m.mcc, 1.0);
  }
}

TEST(Jaccard, SymmetricAndRelabelInvariant) {
  Engine e = make_engine(6);
  for (int trial = 0; trial < 200; ++trial) {
    const EdgeSet a = random_edges(7, e, 0.4);
    const EdgeSet b = random_edges(7, e, 0.4);
    EXPECT_EQ(jaccard(a, b), jaccard(b, a));
    std::vector<int> perm{3, 6, 0, 1, 5, 2, 4};
    auto relabel = [&](const EdgeSet& s) {
      std::vector<Edge> out;
      for (const auto& ed : s) out.push_back({perm[ed.i], perm[ed.j]});
      return EdgeSet(7, out);
    };
    EXPECT_EQ(jaccard(relabel(a), relabel(b)), jaccard(a, b));
    EXPECT_EQ(jaccard(a, a), 1.0);
    EXPECT_DOUBLE_EQ(jaccard(a, b), metrics_from_confusion(confusion(a, b)).jaccard);
  }
}

TEST(ValidatedEdgeReport, CountsAndProportion) {
  const EdgeSet est(5, {{0, 1}, {1, 2}, {3, 4}});
  const EdgeSet ref(5, {{1, 0}, {3, 4}, {2, 4}});
  const auto r = validated_edge_report(est, ref);
  EXPECT_EQ(r.estimated_count, 3u);
  EXPECT_EQ(r.validated_count, 2u);
  EXPECT_DOUBLE_EQ(*r.proportion, 2.0 / 3.0);
  EXPECT_FALSE(validated_edge_report(EdgeSet(5, {}), ref).proportion.has_value());
}

TEST(ValidatedEdgeReport, LargeCount) {
  // 693 estimated edges over 40 nodes, 89 of them in the reference.
  std::vector<Edge> est, ref;
  int k = 0;
  for (int i = 0; i < 40 && k < 693; ++i)
    for (int j = i + 1; j < 40 && k < 693; ++j, ++k) {
      est.push_back({i, j});
      if (k < 89) ref.push_back({j, i});
    }
  ref.push_back({38, 39});
  const auto r = validated_edge_report(EdgeSet(40, est), EdgeSet(40, ref));
  EXPECT_EQ(r.estimated_count, 693u);
  EXPECT_EQ(r.validated_count, 89u);
  EXPECT_NEAR(*r.proportion, 0.1284, 5e-5);
}
