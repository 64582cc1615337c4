#include <gtest/gtest.h>

#include <cmath>

#include "crl/core/error.hpp"
#include "crl/core/linalg.hpp"
#include "crl/transform/transform.hpp"
#include "test_support.hpp"

namespace crl::transform {
namespace {

using testing::random_matrix;

TextBasis make_basis(const EmbeddingMatrix& rows, std::string name = "color") {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < rows.rows(); ++i) names.push_back(name + std::to_string(i));
  return TextBasis(make_criterion(std::move(name)), names, rows, false, "test");
}

TextBasis unit_basis(const EmbeddingMatrix& rows) {
  const auto n = l2_normalize_rows(rows).matrix;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n.rows(); ++i) names.push_back("d" + std::to_string(i));
  return TextBasis(make_criterion("color"), names, n, true, "test");
}

TEST(Project, ReadsDegreesOfEachDescriptor) {
  const TextBasis basis(make_criterion("color"), {"red", "green", "blue"}, EmbeddingMatrix::identity(3), true,
                        "test");
  const auto images = EmbeddingMatrix::from_rows({{0.6f, 0.8f, 0.0f}});
  const auto r = project(images, basis).representation;
  ASSERT_EQ(r.matrix.dims(), 3u);
  EXPECT_NEAR(r.matrix.at(0, 0), 0.6, 1e-7);
  EXPECT_NEAR(r.matrix.at(0, 1), 0.8, 1e-7);
  EXPECT_NEAR(r.matrix.at(0, 2), 0.0, 1e-7);
  EXPECT_EQ(r.basis_fingerprint, basis.fingerprint());
  EXPECT_EQ(r.criterion_name, "color");
}

TEST(Project, SelfSimilarityIsOne) {
  const auto img = l2_normalize_rows(random_matrix(1, 9, 4)).matrix;
  const auto r = project(img, make_basis(img)).representation;
  ASSERT_EQ(r.matrix.dims(), 1u);
  EXPECT_NEAR(r.matrix.at(0, 0), 1.0, 1e-6);
}

TEST(Project, MatchesTripleLoop) {
  const auto images = random_matrix(50, 16, 8);
  const auto basis = unit_basis(random_matrix(7, 16, 9));
  TransformOptions opts;
  opts.normalize_images_first = false;
  const auto r = project(images, basis, opts).representation.matrix;
  for (std::size_t k = 0; k < 50; ++k) {
    for (std::size_t j = 0; j < 7; ++j) {
      double s = 0;
      for (std::size_t d = 0; d < 16; ++d) s += double(images.at(k, d)) * basis.vectors().at(j, d);
      EXPECT_NEAR(r.at(k, j), s, 1e-6);
    }
  }
}

TEST(Project, NormalizesImagesFirstByDefault) {
  const auto images = EmbeddingMatrix::from_rows({{3, 4, 0}, {0, 0, 0}});
  const auto p = project(images, make_basis(EmbeddingMatrix::identity(3)));
  EXPECT_NEAR(p.representation.matrix.at(0, 1), 0.8, 1e-7);
  EXPECT_EQ(p.zero_image_rows, std::vector<std::size_t>{1});
  EXPECT_EQ(p.representation.matrix.at(1, 0), 0.0f);
}

TEST(Project, KeepsImageIds) {
  const auto images = random_matrix(2, 3, 1).with_ids({"x", "y"});
  const auto r = project(images, make_basis(EmbeddingMatrix::identity(3))).representation;
  EXPECT_EQ(r.matrix.id(1), "y");
}

TEST(Project, DimensionMismatchIsShapeError) {
  try {
    project(random_matrix(2, 5, 1), make_basis(EmbeddingMatrix::identity(4)));
    FAIL();
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("2x5"), std::string::npos) << what;
    EXPECT_NE(what.find("4x4"), std::string::npos) << what;
  }
}

TEST(Project, BasisRowOrderPermutesColumns) {
  const auto images = random_matrix(10, 6, 3);
  const auto rows = random_matrix(4, 6, 5);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  const auto a = project(images, unit_basis(rows)).representation.matrix;
  const auto b = project(images, unit_basis(rows.select_rows(perm))).representation.matrix;
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(b.at(i, j), a.at(i, perm[j]));
  }
}

TEST(Project, ScalingBasisRowsBeforeNormalizationIsInvisible) {
  const auto images = random_matrix(12, 8, 6);
  const auto rows = random_matrix(5, 8, 7);
  std::vector<float> scaled(rows.data().begin(), rows.data().end());
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::size_t d = 0; d < 8; ++d) scaled[j * 8 + d] *= static_cast<float>(0.25 + 3.0 * j);
  }
  const auto a = project(images, unit_basis(rows)).representation.matrix;
  const auto b = project(images, unit_basis(EmbeddingMatrix(5, 8, scaled))).representation.matrix;
  for (std::size_t i = 0; i < a.data().size(); ++i) EXPECT_NEAR(a.data()[i], b.data()[i], 1e-6);
}

TEST(Project, StandardizeOutputOption) {
  TransformOptions opts;
  opts.standardize_output = true;
  const auto r = project(random_matrix(30, 5, 2), unit_basis(random_matrix(3, 5, 3)), opts).representation.matrix;
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0;
    for (std::size_t i = 0; i < 30; ++i) mean += r.at(i, j);
    EXPECT_NEAR(mean / 30, 0.0, 1e-6);
  }
}

ConditionalRepresentation rep(EmbeddingMatrix m) { return {std::move(m), "fp", "c"}; }

TEST(Standardize, TwoPoints) {
  const auto s = standardize_columns(rep(EmbeddingMatrix::from_rows({{1}, {3}})));
  EXPECT_NEAR(s.representation.matrix.at(0, 0), -1.0, 1e-7);
  EXPECT_NEAR(s.representation.matrix.at(1, 0), 1.0, 1e-7);
  EXPECT_TRUE(s.constant_columns.empty());
  EXPECT_EQ(s.representation.basis_fingerprint, "fp");
}

TEST(Standardize, ConstantColumnOnlyCentered) {
  const auto s = standardize_columns(rep(EmbeddingMatrix::from_rows({{5, 1}, {5, 2}, {5, 3}})));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s.representation.matrix.at(i, 0), 0.0f);
  EXPECT_EQ(s.constant_columns, std::vector<std::size_t>{0});
}

void expect_moments(const EmbeddingMatrix& m) {
  for (std::size_t j = 0; j < m.dims(); ++j) {
    double mean = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) mean += m.at(i, j);
    mean /= m.rows();
    double var = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) var += (m.at(i, j) - mean) * (m.at(i, j) - mean);
    EXPECT_LT(std::abs(mean), 1e-6);
    EXPECT_NEAR(std::sqrt(var / m.rows()), 1.0, 1e-5);
  }
}

TEST(Standardize, RandomMoments) {
  const auto s = standardize_columns(rep(random_matrix(100, 10, 11, 4.0)));
  expect_moments(s.representation.matrix);
}

TEST(Standardize, Idempotent) {
  const auto once = standardize_columns(rep(random_matrix(40, 6, 12))).representation;
  const auto twice = standardize_columns(once).representation;
  for (std::size_t i = 0; i < once.matrix.data().size(); ++i) {
    EXPECT_NEAR(once.matrix.data()[i], twice.matrix.data()[i], 1e-5);
  }
}

TEST(Standardize, NeedsTwoRows) {
  try {
    standardize_columns(rep(random_matrix(1, 3, 1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
  }
}

TEST(ColumnStats, FitOnSubsetAppliesToAll) {
  const auto m = EmbeddingMatrix::from_rows({{0}, {2}, {10}});
  const std::vector<std::size_t> rows{0, 1};
  const auto stats = ColumnStats::fit(m, rows);
  EXPECT_DOUBLE_EQ(stats.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(stats.stddev[0], 1.0);
  EXPECT_FLOAT_EQ(stats.apply(m, 1e-8).at(2, 0), 9.0f);
}

TEST(Cosine, IdentityOrthogonalAndOracle) {
  const auto u = l2_normalize_rows(random_matrix(3, 4, 2)).matrix;
  const auto self = cosine_similarity_matrix(u, u).matrix;
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(self.at(i, i), 1.0, 1e-6);

  const auto e = EmbeddingMatrix::identity(3);
  const auto ortho = cosine_similarity_matrix(e, e).matrix;
  EXPECT_EQ(ortho.at(0, 1), 0.0f);
  EXPECT_EQ(ortho.at(2, 0), 0.0f);

  const auto a = random_matrix(6, 5, 3, 2.0);
  const auto b = random_matrix(4, 5, 4, 0.5);
  const auto c = cosine_similarity_matrix(a, b).matrix;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      double ab = 0, aa = 0, bb = 0;
      for (std::size_t d = 0; d < 5; ++d) {
        ab += double(a.at(i, d)) * b.at(j, d);
        aa += double(a.at(i, d)) * a.at(i, d);
        bb += double(b.at(j, d)) * b.at(j, d);
      }
      EXPECT_NEAR(c.at(i, j), ab / std::sqrt(aa * bb), 1e-6);
    }
  }
}

TEST(Cosine, ZeroRowsGiveZero) {
  const auto a = EmbeddingMatrix::from_rows({{0, 0}, {1, 0}});
  const auto s = cosine_similarity_matrix(a, a);
  EXPECT_EQ(s.matrix.at(0, 1), 0.0f);
  EXPECT_EQ(s.zero_rows_a, std::vector<std::size_t>{0});
  EXPECT_THROW(cosine_similarity_matrix(a, random_matrix(1, 3, 1)), ShapeError);
}

}  // namespace
}  // namespace crl::transform
