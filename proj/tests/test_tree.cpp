#include <cmath>

#include <gtest/gtest.h>

#include "ckd/tree.hpp"
#include "oracles/classifier_oracles.hpp"
#include "test_support.hpp"

using namespace ckd;

namespace {

std::vector<int> random_labels(std::size_t n, Rng& rng) {
  std::vector<int> y(n);
  for (auto& v : y) v = static_cast<int>(rng.below(2));
  return y;
}

}  // namespace

TEST(SplitScore, PerfectSplitOfBalancedNodeGainsOneBit) {
  const std::vector<double> v{1, 2, 3, 4};
  const std::vector<int> y{1, 1, 0, 0};
  const auto s = split_score(v, y, SplitCriterion::InfoGain);
  ASSERT_TRUE(s.threshold);
  EXPECT_DOUBLE_EQ(*s.threshold, 2.5);
  EXPECT_DOUBLE_EQ(s.score, 1.0);
  // Gini drops from 0.5 to 0
  EXPECT_DOUBLE_EQ(split_score(v, y, SplitCriterion::Gini).score, 0.5);
}

TEST(SplitScore, ConstantColumnScoresZero) {
  const std::vector<double> v{3, 3, 3, 3};
  const std::vector<int> y{1, 0, 1, 0};
  const auto s = split_score(v, y, SplitCriterion::Gini);
  EXPECT_FALSE(s.threshold);
  EXPECT_EQ(s.score, 0.0);
}

TEST(SplitScore, TiesGoToTheLowestThreshold) {
  // splitting after the 1st or the 3rd value isolates one mismatched label either way
  const std::vector<double> v{1, 2, 3, 4};
  const std::vector<int> y{0, 1, 1, 0};
  const auto s = split_score(v, y, SplitCriterion::Gini);
  ASSERT_TRUE(s.threshold);
  EXPECT_DOUBLE_EQ(*s.threshold, 1.5);
}

TEST(SplitScore, EightPointColumnMatchesBruteForce) {
  Rng rng(8);
  std::vector<double> v(8);
  for (auto& x : v) x = rng.uniform(-5, 5);
  const auto y = random_labels(8, rng);
  for (bool entropy : {false, true}) {
    const auto got = split_score(v, y, entropy ? SplitCriterion::InfoGain : SplitCriterion::Gini);
    const auto want = oracle::best_split(v, y, entropy);
    ASSERT_TRUE(got.threshold);
    EXPECT_EQ(*got.threshold, *want.threshold);
    EXPECT_NEAR(got.score, want.score, 1e-12);
  }
}

TEST(SplitScore, TwoHundredColumnsMatchBruteForceIncludingTies) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Rng rng(seed);
    const std::size_t n = 2 + rng.below(30);
    std::vector<double> v(n);
    // small integer support forces repeated values and tied scores
    const bool coarse = seed % 2 == 0;
    for (auto& x : v) x = coarse ? static_cast<double>(rng.below(6)) : rng.uniform(-1, 1);
    const auto y = random_labels(n, rng);
    const std::size_t min_leaf = seed % 5 == 0 ? 2 : 1;
    for (bool entropy : {false, true}) {
      const auto got = split_score(v, y, entropy ? SplitCriterion::InfoGain : SplitCriterion::Gini, min_leaf);
      const auto want = oracle::best_split(v, y, entropy, min_leaf);
      ASSERT_EQ(got.threshold.has_value(), want.threshold.has_value()) << "seed " << seed;
      if (!want.threshold) continue;
      EXPECT_EQ(*got.threshold, *want.threshold) << "seed " << seed;
      EXPECT_NEAR(got.score, want.score, 1e-12) << "seed " << seed;
    }
  }
}

TEST(Tree, SingleClassTrainingSetIsOneLeaf) {
  const auto x = num::Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  const std::vector<int> y{0, 0, 0};
  const auto m = fit_tree(x, y);
  ASSERT_EQ(m.nodes.size(), 1u);
  EXPECT_TRUE(m.nodes[0].is_leaf());
  const double q[] = {100, -100};
  EXPECT_EQ(predict_tree(m, q), 0);
}

TEST(Tree, UnprunedTreeFitsConsistentTrainingDataExactly) {
  Rng rng(21);
  const auto x = testing_support::random_matrix(120, 5, rng);
  const auto y = random_labels(120, rng);
  for (auto crit : {SplitCriterion::Gini, SplitCriterion::InfoGain}) {
    const auto m = fit_tree(x, y, {crit, 1, std::nullopt});
    for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_EQ(predict_tree(m, x.row(i)), y[i]);
    for (const auto& n : m.nodes)
      if (n.is_leaf()) EXPECT_TRUE(n.counts[0] == 0 || n.counts[1] == 0);
  }
}

TEST(Tree, EveryInputReachesExactlyOneLeaf) {
  Rng rng(5);
  const auto x = testing_support::random_matrix(60, 3, rng);
  const auto y = random_labels(60, rng);
  const auto m = fit_tree(x, y);
  // children of internal nodes are distinct and each non-root node has one parent
  std::vector<int> parents(m.nodes.size(), 0);
  for (const auto& n : m.nodes) {
    if (n.is_leaf()) {
      EXPECT_EQ(n.left, -1);
      continue;
    }
    ASSERT_NE(n.left, n.right);
    ++parents[static_cast<std::size_t>(n.left)];
    ++parents[static_cast<std::size_t>(n.right)];
  }
  EXPECT_EQ(parents[0], 0);
  for (std::size_t i = 1; i < parents.size(); ++i) EXPECT_EQ(parents[i], 1);
  // counts add up down the tree
  for (const auto& n : m.nodes) {
    if (n.is_leaf()) continue;
    const auto& l = m.nodes[static_cast<std::size_t>(n.left)];
    const auto& r = m.nodes[static_cast<std::size_t>(n.right)];
    EXPECT_EQ(l.counts[0] + r.counts[0], n.counts[0]);
    EXPECT_EQ(l.counts[1] + r.counts[1], n.counts[1]);
  }
}

TEST(Tree, MaxDepthAndMinLeafAreHonoured) {
  Rng rng(6);
  const auto x = testing_support::random_matrix(200, 4, rng);
  const auto y = random_labels(200, rng);
  const auto shallow = fit_tree(x, y, {SplitCriterion::Gini, 1, 2});
  EXPECT_LE(shallow.depth(), 2u);
  const auto coarse = fit_tree(x, y, {SplitCriterion::Gini, 10, std::nullopt});
  for (const auto& n : coarse.nodes)
    if (n.is_leaf()) EXPECT_GE(n.counts[0] + n.counts[1], 10u);
}

TEST(Tree, LeafTieVotesPositive) {
  // identical rows with opposite labels cannot be split
  const auto x = num::Matrix::from_rows({{1}, {1}});
  const std::vector<int> y{0, 1};
  const auto m = fit_tree(x, y);
  const double q[] = {1};
  EXPECT_EQ(predict_tree(m, q), 1);
}

TEST(Tree, PredictionsInvariantUnderMonotoneFeatureTransform) {
  Rng rng(77);
  const std::size_t n = 80, d = 4;
  auto x = testing_support::random_matrix(n, d, rng, -2, 2);
  const auto y = random_labels(n, rng);
  // queries assembled from observed column values, so every query coordinate
  // has a well-defined image under the transform
  num::Matrix queries(200, d);
  for (std::size_t q = 0; q < queries.rows(); ++q)
    for (std::size_t j = 0; j < d; ++j) queries(q, j) = x(rng.below(n), j);

  auto transforms = std::vector<double (*)(double)>{[](double v) { return std::exp(v); },
                                                    [](double v) { return v * v * v + 3 * v; },
                                                    [](double v) { return 100.0 * v - 7.0; }};
  const auto base = fit_tree(x, y);
  for (std::size_t j = 0; j < d; ++j) {
    for (auto f : transforms) {
      auto xt = x;
      auto qt = queries;
      for (std::size_t i = 0; i < n; ++i) xt(i, j) = f(x(i, j));
      for (std::size_t i = 0; i < qt.rows(); ++i) qt(i, j) = f(queries(i, j));
      const auto m = fit_tree(xt, y);
      ASSERT_EQ(m.nodes.size(), base.nodes.size());
      for (std::size_t k = 0; k < m.nodes.size(); ++k) EXPECT_EQ(m.nodes[k].feature, base.nodes[k].feature);
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(predict_tree(m, xt.row(i)), predict_tree(base, x.row(i)));
      for (std::size_t i = 0; i < qt.rows(); ++i) EXPECT_EQ(predict_tree(m, qt.row(i)), predict_tree(base, queries.row(i)));
    }
  }
}

TEST(Tree, RejectsMismatchedInput) {
  const auto x = num::Matrix::from_rows({{1, 2}, {3, 4}});
  const std::vector<int> y{0, 1};
  const auto m = fit_tree(x, y);
  const double q[] = {1, 2, 3};
  EXPECT_THROW(predict_tree(m, q), Error);
  const std::vector<int> short_y{0};
  EXPECT_THROW(fit_tree(x, short_y), Error);
}
