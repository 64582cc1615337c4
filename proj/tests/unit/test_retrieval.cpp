#include <gtest/gtest.h>

#include <cmath>

#include "crl/core/error.hpp"
#include "crl/core/rng.hpp"
#include "crl/eval/retrieval.hpp"
#include "crl/eval/triplet.hpp"
#include "test_support.hpp"

namespace crl::eval {
namespace {

TEST(CombinedScore, Arithmetic) {
  EXPECT_NEAR(combined_score(0.2, 0.05), 0.7, 1e-12);
  EXPECT_DOUBLE_EQ(combined_score(0.37, 0.0), 0.37);
  CombinedScoreConfig cfg;
  cfg.alpha = 2.0;
  EXPECT_DOUBLE_EQ(combined_score(1.0, 0.5, cfg), 2.0);
}

// Every candidate scores identically, so the rank is the gallery position.
testing::SimilarityWorld tied_world(const std::vector<std::size_t>& target_positions) {
  testing::SimilarityWorld w;
  std::vector<std::string> ids{"g0", "g1", "g2", "g3", "g4", "q"};
  w.raw_images = EmbeddingMatrix(6, 2, std::vector<float>(12, 1.0f)).with_ids(ids);
  w.condition_embeddings = EmbeddingMatrix(1, 2, {1.0f, 1.0f}).with_ids({"red"});
  w.conditional = {EmbeddingMatrix(6, 2, std::vector<float>(12, 0.5f)).with_ids(ids), "fp", "color"};
  for (std::size_t i = 0; i < target_positions.size(); ++i) {
    w.instances.push_back({"q", "red", {"g0", "g1", "g2", "g3", "g4"}, "g" + std::to_string(target_positions[i])});
  }
  return w;
}

RecallTable eval(const testing::SimilarityWorld& w, CombinedScoreConfig cfg = {}) {
  return run_similarity_eval(w.instances, w.raw_images, w.condition_embeddings, w.conditional, cfg);
}

TEST(SimilarityEval, HandPlacedRanks) {
  const auto t = eval(tied_world({0, 0, 1, 2, 3}));
  EXPECT_EQ(t.target_ranks, (std::vector<std::size_t>{1, 1, 2, 3, 4}));
  EXPECT_DOUBLE_EQ(t.at(1), 0.4);
  EXPECT_DOUBLE_EQ(t.at(2), 0.6);
  EXPECT_DOUBLE_EQ(t.at(3), 0.8);
}

TEST(SimilarityEval, TiesKeepGalleryOrder) {
  CombinedScoreConfig cfg;
  cfg.ks = {1, 2, 3, 4, 5};
  const auto t = eval(tied_world({4}), cfg);
  EXPECT_EQ(t.target_ranks[0], 5u);
  EXPECT_DOUBLE_EQ(t.at(4), 0.0);
  EXPECT_DOUBLE_EQ(t.at(5), 1.0);
}

TEST(SimilarityEval, ConditionalTwinWinsWithLargeAlpha) {
  CombinedScoreConfig cfg;
  cfg.alpha = 1e3;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto w = testing::random_similarity_world(1, 8, seed);
    const auto& inst = w.instances[0];
    const auto& m = w.conditional.matrix;
    std::vector<float> cond(m.data().begin(), m.data().end());
    const auto q = m.index_of(inst.query_id), t = m.index_of(inst.target_id);
    for (std::size_t d = 0; d < m.dims(); ++d) cond[t * m.dims() + d] = cond[q * m.dims() + d];
    w.conditional.matrix = EmbeddingMatrix(m.rows(), m.dims(), cond).with_ids(m.ids());
    EXPECT_DOUBLE_EQ(eval(w, cfg).at(1), 1.0) << seed;
  }
}

TEST(SimilarityEval, MatchesBruteForce) {
  const auto w = testing::random_similarity_world(50, 10, 11);
  for (double alpha : {0.0, 0.5, 10.0}) {
    CombinedScoreConfig cfg;
    cfg.alpha = alpha;
    EXPECT_EQ(eval(w, cfg).target_ranks, testing::brute_force_ranks(w, alpha)) << alpha;
  }
}

TEST(SimilarityEval, AlphaExtremesFollowEachTerm) {
  const auto w = testing::random_similarity_world(30, 10, 12);
  CombinedScoreConfig s1_only;
  s1_only.alpha = 0.0;
  EXPECT_EQ(eval(w, s1_only).target_ranks, testing::brute_force_ranks(w, 0.0));

  // With a huge alpha the ordering is the S2 ordering.
  CombinedScoreConfig big;
  big.alpha = 1e9;
  auto s2_world = w;
  s2_world.condition_embeddings = EmbeddingMatrix(w.condition_embeddings.rows(), w.condition_embeddings.dims(),
                                                  std::vector<float>(w.condition_embeddings.data().size(), 0.0f))
                                      .with_ids(w.condition_embeddings.ids());
  EXPECT_EQ(eval(w, big).target_ranks, eval(s2_world, big).target_ranks);
}

TEST(SimilarityEval, MissingIdIsConsistencyError) {
  auto w = tied_world({0});
  w.instances[0].query_id = "nobody";
  try {
    eval(w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::consistency);
  }
  w = tied_world({0});
  w.instances[0].condition_text = "blue";
  EXPECT_THROW(eval(w), Error);
}

TEST(SimilarityEval, ReadsInstances) {
  testing::TempDir dir;
  testing::write_file(dir / "i.jsonl",
                      "{\"query_id\":\"q\",\"condition_text\":\"red\",\"gallery\":[\"a\",\"b\"],\"target_id\":\"b\"}\n\n");
  const auto inst = read_similarity_instances(dir / "i.jsonl");
  ASSERT_EQ(inst.size(), 1u);
  EXPECT_EQ(inst[0].gallery[1], "b");
  testing::write_file(dir / "bad.jsonl", "{\"query_id\":1}\n");
  EXPECT_THROW(read_similarity_instances(dir / "bad.jsonl"), ParseError);
}

TEST(AveragePrecision, DirectFormula) {
  EXPECT_DOUBLE_EQ(average_precision({true}), 1.0);
  EXPECT_NEAR(average_precision({true, false, true}), (1.0 + 2.0 / 3.0) / 2.0, 1e-12);
  EXPECT_NEAR(average_precision({false, false, true}), 1.0 / 3.0, 1e-12);
  try {
    average_precision({false, false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::undefined_ap);
  }
}

LabeledDataset fashion_dataset(const EmbeddingMatrix& x, std::vector<int> labels, std::size_t classes) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < classes; ++c) names.push_back("v" + std::to_string(c));
  return LabeledDataset(x, {{"texture", std::move(labels)}}, {{"texture", names}});
}

const RepresentationFn identity_rep = [](const EmbeddingMatrix& m) { return m; };

TEST(FashionEval, ConstructedNeighborsGivePerfectMap) {
  std::vector<float> data;
  std::vector<int> labels;
  for (int i = 0; i < 12; ++i) {
    const int c = i % 3;
    for (int d = 0; d < 3; ++d) data.push_back(d == c ? 1.0f : 0.01f * static_cast<float>(i));
    labels.push_back(c);
  }
  const auto ds = fashion_dataset(EmbeddingMatrix(12, 3, data, index_ids(12)), labels, 3);
  std::vector<FashionQuery> q;
  for (int i = 0; i < 12; ++i) q.push_back({ds.embeddings().id(i), "texture", ""});
  const auto r = run_fashion_eval(q, ds, identity_rep);
  EXPECT_DOUBLE_EQ(r.map, 1.0);
  EXPECT_EQ(r.evaluated, 12u);
}

TEST(FashionEval, SingleQueryPattern) {
  // Gallery order by similarity to q: a (same), b (other), c (same).
  const auto x = EmbeddingMatrix::from_rows({{1, 0}, {1, 0.1f}, {1, 0.5f}, {1, 1.2f}}).with_ids({"q", "a", "b", "c"});
  const auto ds = fashion_dataset(x, {0, 0, 1, 0}, 2);
  const auto r = run_fashion_eval({{"q", "texture", ""}}, ds, identity_rep);
  EXPECT_NEAR(r.map, 0.8333333333333334, 1e-12);
}

TEST(FashionEval, ExplicitValueAndSkipped) {
  const auto x = EmbeddingMatrix::from_rows({{1, 0}, {1, 0.1f}, {1, 0.5f}}).with_ids({"q", "a", "b"});
  const auto ds = fashion_dataset(x, {0, 1, 1}, 3);
  const auto r = run_fashion_eval({{"q", "texture", "v1"}, {"q", "texture", "v2"}}, ds, identity_rep);
  EXPECT_EQ(r.evaluated, 1u);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_DOUBLE_EQ(r.map, 1.0);
}

TEST(FashionEval, RandomRepresentationsNearRelevantFraction) {
  const std::size_t n = 500;
  const auto x = testing::random_matrix(n, 16, 31).with_ids(index_ids(n));
  std::vector<int> labels(n);
  Rng rng(2);
  for (auto& l : labels) l = static_cast<int>(rng.uniform_index(4));
  const auto ds = fashion_dataset(x, labels, 4);
  std::vector<FashionQuery> q;
  for (std::size_t i = 0; i < n; i += 5) q.push_back({x.id(i), "texture", ""});
  const auto r = run_fashion_eval(q, ds, identity_rep);
  EXPECT_NEAR(r.map, 0.25, 0.05);
}

TEST(TripletLoss, HandCases) {
  const std::vector<double> a{1, 0}, n{0, 1};
  EXPECT_DOUBLE_EQ(triplet_loss(a, a, n, 0.3), 0.0);
  EXPECT_NEAR(triplet_loss(a, n, n, 0.3), 0.3, 1e-12);
  const std::vector<double> wide{1, 0, 0};
  EXPECT_THROW(triplet_loss(a, a, wide, 0.3), ShapeError);
}

TEST(TripletLoss, GradientMatchesFiniteDifferences) {
  Rng rng(17);
  int checked = 0;
  for (int t = 0; t < 40 && checked < 20; ++t) {
    std::vector<double> v[3];
    for (auto& x : v) {
      x.resize(6);
      for (auto& e : x) e = rng.normal();
    }
    const double margin = 0.3;
    const auto g = triplet_loss_grad(v[0], v[1], v[2], margin);
    // Skip instances near the hinge kink.
    const double pre = triplet_loss(v[0], v[1], v[2], 100.0) - 100.0 + margin;
    if (std::abs(pre) < 1e-3) continue;
    ++checked;
    const std::vector<double>* grads[3] = {&g.anchor, &g.positive, &g.negative};
    for (int which = 0; which < 3; ++which) {
      for (std::size_t i = 0; i < 6; ++i) {
        auto hi = v[which], lo = v[which];
        hi[i] += 1e-6;
        lo[i] -= 1e-6;
        auto f = [&](const std::vector<double>& x) {
          return triplet_loss(which == 0 ? x : v[0], which == 1 ? x : v[1], which == 2 ? x : v[2], margin);
        };
        const double fd = (f(hi) - f(lo)) / 2e-6;
        EXPECT_LT(std::abs(fd - (*grads[which])[i]), 1e-6);
      }
    }
  }
  EXPECT_EQ(checked, 20);
}

// Class lives in the first two dims; the rest is larger nuisance noise.
struct TripletData {
  EmbeddingMatrix x;
  std::vector<Triplet> triplets;
};

TripletData recoverable_triplets(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 120, dims = 8;
  std::vector<float> data;
  std::vector<int> label(n);
  for (std::size_t i = 0; i < n; ++i) {
    label[i] = static_cast<int>(i % 2);
    for (std::size_t d = 0; d < dims; ++d) {
      float v = static_cast<float>(rng.normal());
      if (d == 0) v = 0.3f * v + (label[i] ? 1.0f : -1.0f);
      if (d >= 2) v *= 2.0f;
      data.push_back(v);
    }
  }
  TripletData out{EmbeddingMatrix(n, dims, data), {}};
  while (out.triplets.size() < count) {
    const std::size_t a = rng.uniform_index(n), p = rng.uniform_index(n), q = rng.uniform_index(n);
    if (a != p && label[a] == label[p] && label[a] != label[q]) out.triplets.push_back({a, p, q});
  }
  return out;
}

TEST(TrainMlp, LearnsRecoverableStructure) {
  const auto data = recoverable_triplets(200, 5);
  TripletTrainConfig cfg;
  cfg.lr = 3e-3;
  cfg.epochs = 300;
  cfg.decay_step = 100;
  const auto r = train_projection_mlp(data.x, data.triplets, cfg);
  EXPECT_GT(r.initial_loss, 0.0);
  EXPECT_LT(r.final_loss, 0.01 * r.initial_loss) << r.initial_loss << " -> " << r.final_loss;
  EXPECT_EQ(r.loss_curve.size(), 300u);
  double early = 0, late = 0;
  for (int i = 0; i < 20; ++i) {
    early += r.loss_curve[i];
    late += r.loss_curve[r.loss_curve.size() - 1 - i];
  }
  EXPECT_LT(late, early);
}

TEST(TrainMlp, ZeroLearningRateLeavesParameters) {
  const auto data = recoverable_triplets(50, 6);
  TripletTrainConfig cfg;
  cfg.lr = 0.0;
  cfg.epochs = 5;
  cfg.seed = 9;
  const auto r = train_projection_mlp(data.x, data.triplets, cfg);
  const auto init = Mlp::init(8, 8, 8, 9);
  EXPECT_EQ(r.mlp.w1, init.w1);
  EXPECT_EQ(r.mlp.w2, init.w2);
  EXPECT_EQ(r.mlp.b1, init.b1);
  EXPECT_EQ(r.mlp.b2, init.b2);
}

TEST(TrainMlp, DeterministicForSeed) {
  const auto data = recoverable_triplets(64, 7);
  TripletTrainConfig cfg;
  cfg.lr = 1e-3;
  cfg.epochs = 10;
  const auto a = train_projection_mlp(data.x, data.triplets, cfg);
  const auto b = train_projection_mlp(data.x, data.triplets, cfg);
  EXPECT_EQ(a.mlp.w1, b.mlp.w1);
  EXPECT_EQ(a.loss_curve, b.loss_curve);
}

TEST(TrainMlp, DivergenceReportsEpoch) {
  const auto data = recoverable_triplets(50, 8);
  TripletTrainConfig cfg;
  cfg.lr = 1e308;
  cfg.epochs = 50;
  try {
    train_projection_mlp(data.x, data.triplets, cfg);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::divergence);
    EXPECT_LT(e.epoch(), 50u);
  }
}

TEST(Mlp, ApplyChecksWidth) {
  const auto m = Mlp::init(4, 6, 3, 1);
  EXPECT_EQ(m.parameter_count(), 4u * 6 + 6 + 6 * 3 + 3);
  EXPECT_EQ(m.apply(testing::random_matrix(5, 4, 1)).dims(), 3u);
  EXPECT_THROW(m.apply(testing::random_matrix(5, 3, 1)), ShapeError);
}

}  // namespace
}  // namespace crl::eval
