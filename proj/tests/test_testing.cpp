#include <gtest/gtest.h>

#include <cmath>

#include "ggmsel/simulation.hpp"
#include "ggmsel/testing.hpp"
#include "oracles.hpp"

using namespace ggmsel;

TEST(PartialCorrelations, IdentityAndTwoByTwo) {
  const auto r = partial_correlations(SymmetricMatrix::identity(4));
  EXPECT_LE(oracle::max_abs_diff(r.matrix(), Matrix::Identity(4, 4)), 0.0);
  for (double rho : {-0.8, -0.2, 0.0, 0.45, 0.9}) {
    Matrix a(2, 2);
    a << 1, rho, rho, 1;
    EXPECT_NEAR(partial_correlations(SymmetricMatrix(a))(0, 1), rho, 1e-14);
  }
}

TEST(PartialCorrelations, MatchesRegressionResiduals) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Engine e = make_engine(seed);
    const SymmetricMatrix a(oracle::random_spd(4, e));
    const auto r = partial_correlations(a);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) EXPECT_NEAR(r(i, j), oracle::partial_corr_residual(a.matrix(), i, j), 1e-12);
  }
}

TEST(PartialCorrelations, ScaleInvariant) {
  Engine e = make_engine(3);
  const SymmetricMatrix a(oracle::random_spd(5, e));
  Vector dscale(5);
  dscale << 0.1, 2, 3, 7, 0.5;
  const SymmetricMatrix scaled(Matrix(dscale.asDiagonal() * a.matrix() * dscale.asDiagonal()));
  EXPECT_LE(oracle::max_abs_diff(partial_correlations(a).matrix(), partial_correlations(scaled).matrix()), 1e-10);
}

TEST(PartialCorrelations, SingularIsError) {
  Matrix a = Matrix::Ones(3, 3);
  try {
    partial_correlations(SymmetricMatrix(a));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular_input);
  }
}

TEST(UnadjustedPvalues, ZeroCorrelationGivesOne) {
  const auto pv = unadjusted_pvalues(SymmetricMatrix::identity(3), 50, 3);
  for (double p : pv.unadjusted) EXPECT_EQ(p, 1.0);
}

TEST(UnadjustedPvalues, FivePercentBoundary) {
  const long n = 60;
  const int d = 3;
  Matrix r = Matrix::Identity(d, d);
  r(0, 1) = r(1, 0) = std::tanh(1.959963984540054 / std::sqrt(static_cast<double>(n - d - 1)));
  const auto pv = unadjusted_pvalues(SymmetricMatrix(r), n, d);
  EXPECT_NEAR(pv.unadjusted[pv.index(0, 1)], 0.05, 1e-6);
}

TEST(UnadjustedPvalues, MatchesHighPrecisionReference) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Engine e = make_engine(seed);
    const SymmetricMatrix a(oracle::random_spd(6, e));
    const auto r = partial_correlations(a);
    const long n = 40 + static_cast<long>(seed) * 10;
    const auto pv = unadjusted_pvalues(r, n, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j)
        EXPECT_NEAR(pv.unadjusted[pv.index(i, j)], oracle::pvalue_reference(r(i, j), n, 6), 1e-12);
  }
}

TEST(UnadjustedPvalues, NotApplicableAndDegenerate) {
  try {
    unadjusted_pvalues(SymmetricMatrix::identity(5), 6, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_applicable);
  }
  Matrix r = Matrix::Identity(3, 3);
  r(0, 2) = r(2, 0) = 1.0;
  const auto pv = unadjusted_pvalues(SymmetricMatrix(r), 20, 3);
  EXPECT_EQ(pv.unadjusted[pv.index(0, 2)], 0.0);
  ASSERT_EQ(pv.degenerate.size(), 1u);
  EXPECT_EQ(pv.degenerate[0], (Edge{0, 2}));
}

TEST(PValueMatrix, UpperTriangleIndex) {
  PValueMatrix pv;
  pv.d = 5;
  std::size_t expected = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      EXPECT_EQ(pv.index(i, j), expected);
      EXPECT_EQ(pv.index(j, i), expected);
      ++expected;
    }
}

TEST(HolmAdjust, HandExample) {
  const std::vector<double> p{0.01, 0.02, 0.5};
  const auto adj = holm_adjust(p);
  EXPECT_DOUBLE_EQ(adj[0], 0.03);
  EXPECT_DOUBLE_EQ(adj[1], 0.04);
  EXPECT_DOUBLE_EQ(adj[2], 0.5);
  const std::vector<double> ones(4, 1.0);
  EXPECT_EQ(holm_adjust(ones), ones);
  const std::vector<double> bad{0.1, 1.5};
  EXPECT_THROW(holm_adjust(bad), Error);
}

TEST(HolmAdjust, MatchesDefinitionAndStepDown) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Engine e = make_engine(seed);
    std::vector<double> p(10);
    for (auto& v : p) v = std::pow(uniform(e, 0, 1), 3.0);
    if (seed % 5 == 0) p[3] = p[7];  // ties
    const auto adj = holm_adjust(p);
    EXPECT_EQ(adj, oracle::holm_definition(p));
    for (double alpha : {0.01, 0.05, 0.2}) {
      const auto reject = oracle::holm_stepdown_reject(p, alpha);
      for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(adj[i] <= alpha, reject[i]);
    }
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), e);
    std::vector<double> permuted(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) permuted[i] = p[perm[i]];
    const auto adj_perm = holm_adjust(permuted);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(adj_perm[i], adj[perm[i]]);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j)
        if (p[i] <= p[j]) EXPECT_LE(adj[i], adj[j]);
  }
}

TEST(OtherAdjustments, BonferroniAndSidak) {
  const std::vector<double> p{0.001, 0.02, 0.4, 1.0};
  const auto bon = bonferroni_adjust(p);
  const auto sid = sidak_adjust(p);
  const auto holm = holm_adjust(p);
  EXPECT_DOUBLE_EQ(bon[0], 0.004);
  EXPECT_DOUBLE_EQ(bon[2], 1.0);
  EXPECT_NEAR(sid[1], 1.0 - std::pow(0.98, 4), 1e-15);
  EXPECT_EQ(sid[3], 1.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_GE(sid[i], p[i]);
    EXPECT_LE(sid[i], bon[i]);
    EXPECT_LE(holm[i], bon[i]);
  }
}

TEST(TestingSelect, SingleHypothesisAllMethodsAgree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Engine e = make_engine(seed);
    Matrix x = oracle::random_data(30, 2, e);
    x.col(1) += 0.4 * x.col(0);
    const DataMatrix data(x);
    const auto pv = unadjusted_pvalues(partial_correlations(empirical_covariance(data)), 30, 2);
    const bool raw = pv.unadjusted[0] <= 0.05;
    for (auto m : {Adjustment::holm, Adjustment::bonferroni, Adjustment::sidak})
      EXPECT_EQ(testing_select(data, 0.05, m).edges.size() == 1, raw);
  }
}

TEST(TestingSelect, BonferroniSubsetOfHolm) {
  const auto truth = generate_precision(15, 0.2, 4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = sample_gaussian(truth, 60 + 10 * static_cast<long>(seed), seed);
    for (double alpha : {0.01, 0.05, 0.2, 0.9}) {
      const auto holm = testing_select(data, alpha, Adjustment::holm);
      const auto bon = testing_select(data, alpha, Adjustment::bonferroni);
      EXPECT_TRUE(bon.edges.is_subset_of(holm.edges));
      EXPECT_FALSE(holm.precision.has_value());
    }
  }
}

TEST(TestingSelect, GlobalNullFwer) {
  const auto truth = identity_truth(10);
  int false_discoveries = 0;
  for (std::uint64_t r = 0; r < 100; ++r)
    if (!testing_select(sample_gaussian(truth, 500, r), 0.05, Adjustment::holm).edges.empty()) ++false_discoveries;
  EXPECT_LE(false_discoveries, 10);
}

TEST(TestingSelect, NotApplicableWhenNSmall) {
  const auto data = sample_gaussian(identity_truth(10), 11, 1);
  try {
    testing_select(data, 0.05, Adjustment::holm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_applicable);
  }
  EXPECT_EQ(parse_adjustment("sidak"), Adjustment::sidak);
  EXPECT_THROW(parse_adjustment("bh"), Error);
}
