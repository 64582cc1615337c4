#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "crl/core/error.hpp"
#include "crl/core/rng.hpp"
#include "crl/eval/cluster.hpp"
#include "crl/eval/metrics.hpp"
#include "test_support.hpp"

namespace crl::eval {
namespace {

std::int64_t assignment_value(const std::vector<std::int64_t>& c, std::size_t k, const std::vector<std::size_t>& p) {
  std::int64_t s = 0;
  for (std::size_t r = 0; r < k; ++r) s += c[r * k + p[r]];
  return s;
}

std::int64_t brute_force_best(const std::vector<std::int64_t>& c, std::size_t k) {
  std::vector<std::size_t> p(k);
  std::iota(p.begin(), p.end(), 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  do {
    best = std::max(best, assignment_value(c, k, p));
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

TEST(Hungarian, DiagonalAndAntiDiagonal) {
  EXPECT_EQ(hungarian_match(3, std::vector<std::int64_t>{5, 0, 0, 0, 5, 0, 0, 0, 5}),
            (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(hungarian_match(3, std::vector<std::int64_t>{0, 0, 5, 0, 5, 0, 5, 0, 0}),
            (std::vector<std::size_t>{2, 1, 0}));
}

TEST(Hungarian, MatchesExhaustiveSearch) {
  Rng rng(99);
  for (std::size_t k = 1; k <= 6; ++k) {
    for (int t = 0; t < 30; ++t) {
      std::vector<std::int64_t> c(k * k);
      for (auto& v : c) v = static_cast<std::int64_t>(rng.uniform_index(20));
      const auto p = hungarian_match(k, c);
      std::vector<std::size_t> sorted = p;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < k; ++i) ASSERT_EQ(sorted[i], i);
      EXPECT_EQ(assignment_value(c, k, p), brute_force_best(c, k));
    }
  }
}

std::vector<std::size_t> lexicographic_best(const std::vector<std::int64_t>& c, std::size_t k) {
  std::vector<std::size_t> p(k);
  std::iota(p.begin(), p.end(), 0);
  const std::int64_t best = brute_force_best(c, k);
  do {
    if (assignment_value(c, k, p) == best) return p;
  } while (std::next_permutation(p.begin(), p.end()));
  return {};
}

TEST(Hungarian, TiesResolveToLexicographicallySmallest) {
  Rng rng(7);
  for (std::size_t k = 1; k <= 6; ++k) {
    for (int t = 0; t < 60; ++t) {
      // Few distinct values so optimal assignments are often tied.
      std::vector<std::int64_t> c(k * k);
      for (auto& v : c) v = static_cast<std::int64_t>(rng.uniform_index(3));
      EXPECT_EQ(hungarian_match(k, c), lexicographic_best(c, k));
    }
  }
  EXPECT_EQ(hungarian_match(3, std::vector<std::int64_t>(9, 1)), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Hungarian, NonSquareIsShapeError) {
  EXPECT_THROW(hungarian_match(2, std::vector<std::int64_t>{1, 2, 3}), ShapeError);
}

TEST(Metrics, PerfectAndRelabeled) {
  std::vector<int> truth(30);
  for (int i = 0; i < 30; ++i) truth[i] = i % 3;
  std::vector<int> relabeled(30);
  for (int i = 0; i < 30; ++i) relabeled[i] = (truth[i] + 2) % 3;
  for (const auto* pred : {&truth, &relabeled}) {
    EXPECT_DOUBLE_EQ(acc(*pred, truth), 1.0);
    EXPECT_NEAR(nmi(*pred, truth), 1.0, 1e-12);
    EXPECT_NEAR(ari(*pred, truth), 1.0, 1e-12);
  }
}

TEST(Metrics, PairCountingCase) {
  const std::vector<int> pred{0, 0, 1, 1};
  const std::vector<int> truth{0, 1, 0, 1};
  EXPECT_NEAR(ari(pred, truth), -0.5, 1e-12);
  EXPECT_NEAR(nmi(pred, truth), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(acc(pred, truth), 0.5);
}

TEST(Metrics, LengthMismatchIsShapeError) {
  const std::vector<int> a{0, 1};
  const std::vector<int> b{0};
  EXPECT_THROW(acc(a, b), ShapeError);
  EXPECT_THROW(nmi(a, b), ShapeError);
  EXPECT_THROW(ari(a, b), ShapeError);
}

TEST(Metrics, MoreClustersThanClasses) {
  const std::vector<int> pred{0, 1, 2, 3};
  const std::vector<int> truth{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(acc(pred, truth), 0.5);
  const auto c = confusion(pred, truth);
  EXPECT_EQ(c.size, 4u);
}

TEST(Metrics, ShuffledLabelsGiveNearZeroNmi) {
  std::vector<int> truth(1000);
  for (int i = 0; i < 1000; ++i) truth[i] = i % 4;
  std::vector<int> pred = truth;
  Rng rng(5);
  rng.shuffle(std::span<int>(pred));
  EXPECT_LT(std::abs(nmi(pred, truth)), 0.05);
  EXPECT_LT(std::abs(ari(pred, truth)), 0.05);
}

EmbeddingMatrix blobs(std::vector<int>* labels) {
  Rng rng(3);
  std::vector<float> data;
  for (int i = 0; i < 40; ++i) {
    const float c = i < 20 ? 0.0f : 10.0f;
    data.push_back(c + static_cast<float>(0.1 * rng.normal()));
    data.push_back(c + static_cast<float>(0.1 * rng.normal()));
    labels->push_back(i < 20 ? 0 : 1);
  }
  return EmbeddingMatrix(40, 2, data);
}

TEST(KMeans, SeparatesBlobs) {
  std::vector<int> labels;
  const auto x = blobs(&labels);
  ClusterConfig cfg;
  cfg.k = 2;
  const auto r = kmeans(x, cfg, 0);
  EXPECT_DOUBLE_EQ(acc(r.assignments, labels), 1.0);
}

TEST(KMeans, SingleClusterInertiaIsTotalScatter) {
  const auto x = testing::random_matrix(25, 3, 4);
  ClusterConfig cfg;
  cfg.k = 1;
  const auto r = kmeans(x, cfg, 0);
  double total = 0;
  for (std::size_t d = 0; d < 3; ++d) {
    double mean = 0;
    for (std::size_t i = 0; i < 25; ++i) mean += x.at(i, d);
    mean /= 25;
    for (std::size_t i = 0; i < 25; ++i) total += (x.at(i, d) - mean) * (x.at(i, d) - mean);
  }
  EXPECT_NEAR(r.inertia, total, 1e-6 * total);
  for (int a : r.assignments) EXPECT_EQ(a, 0);
}

TEST(KMeans, KEqualsRows) {
  const auto x = testing::random_matrix(6, 2, 5);
  ClusterConfig cfg;
  cfg.k = 6;
  const auto r = kmeans(x, cfg, 0);
  EXPECT_NEAR(r.inertia, 0.0, 1e-12);
  auto a = r.assignments;
  std::sort(a.begin(), a.end());
  EXPECT_EQ(std::unique(a.begin(), a.end()) - a.begin(), 6);
}

TEST(KMeans, TooFewRows) {
  ClusterConfig cfg;
  cfg.k = 5;
  try {
    kmeans(testing::random_matrix(3, 2, 1), cfg, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
  }
}

TEST(KMeans, InertiaNeverIncreases) {
  for (auto init : {KMeansInit::kmeans_plus_plus, KMeansInit::random}) {
    ClusterConfig cfg;
    cfg.k = 5;
    cfg.init = init;
    for (std::size_t trial = 0; trial < 5; ++trial) {
      const auto r = kmeans(testing::random_matrix(200, 4, 10 + trial), cfg, trial);
      ASSERT_FALSE(r.inertia_history.empty());
      for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
        EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1] * (1 + 1e-12));
      }
    }
  }
}

TEST(ClusteringEval, SeparableDataAndDeterminism) {
  Rng rng(8);
  std::vector<float> data;
  std::vector<int> labels;
  for (int i = 0; i < 120; ++i) {
    const int c = i % 3;
    for (int d = 0; d < 3; ++d) data.push_back((d == c ? 5.0f : 0.0f) + static_cast<float>(0.3 * rng.normal()));
    labels.push_back(c);
  }
  const EmbeddingMatrix x(120, 3, data);
  ClusterConfig cfg;
  cfg.k = 3;
  cfg.trials = 10;
  cfg.base_seed = 4;
  const auto a = run_clustering_eval(x, labels, cfg);
  EXPECT_GE(a.acc_summary.mean, 0.95);
  EXPECT_EQ(a.acc.size(), 10u);
  cfg.threads = 1;
  const auto b = run_clustering_eval(x, labels, cfg);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.nmi, b.nmi);
}

TEST(ClusteringEval, DegenerateDataSameMeanAcrossTrialCounts) {
  const EmbeddingMatrix x(8, 1, std::vector<float>(8, 1.0f));
  const std::vector<int> labels{0, 0, 0, 0, 1, 1, 1, 1};
  ClusterConfig cfg;
  cfg.k = 2;
  cfg.trials = 1;
  const auto one = run_clustering_eval(x, labels, cfg);
  cfg.trials = 20;
  const auto twenty = run_clustering_eval(x, labels, cfg);
  EXPECT_DOUBLE_EQ(one.acc_summary.mean, twenty.acc_summary.mean);
  EXPECT_DOUBLE_EQ(twenty.acc_summary.stddev, 0.0);
}

TEST(Summarize, PopulationStd) {
  const auto s = summarize({1.0, 3.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.stddev, 1.0);
}

}  // namespace
}  // namespace crl::eval
