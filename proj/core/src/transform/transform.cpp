#include "crl/transform/transform.hpp"

#include <cmath>

#include "crl/core/error.hpp"
#include "crl/core/linalg.hpp"

namespace crl::transform {

void TransformOptions::validate() const {
  if (!(standardize_epsilon > 0.0)) throw Error(ErrorKind::config, "standardize_epsilon must be positive");
}

Projection project(const EmbeddingMatrix& images, const TextBasis& basis, const TransformOptions& options) {
  options.validate();
  const EmbeddingMatrix& t = basis.vectors();
  if (images.dims() != t.dims()) {
    throw ShapeError("image embeddings " + images.shape_string() + " do not match basis " + t.shape_string(),
                     {{"images", images.shape_string()}, {"basis", t.shape_string()}});
  }
  Projection out;
  EmbeddingMatrix r;
  if (options.normalize_images_first) {
    auto normalized = l2_normalize_rows(images);
    out.zero_image_rows = std::move(normalized.zero_rows);
    r = matmul_transpose(normalized.matrix, t);
  } else {
    r = matmul_transpose(images, t);
  }
  out.representation = {std::move(r), basis.fingerprint(), basis.criterion().name};
  if (options.standardize_output) {
    auto standardized = standardize_columns(out.representation, options.standardize_epsilon);
    out.representation = std::move(standardized.representation);
    out.constant_columns = std::move(standardized.constant_columns);
  }
  return out;
}

ColumnStats ColumnStats::fit(const EmbeddingMatrix& m, std::span<const std::size_t> rows) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(m.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    rows = all;
  }
  if (rows.empty()) throw Error(ErrorKind::insufficient_data, "cannot fit column statistics on zero rows");
  ColumnStats s;
  s.mean.assign(m.dims(), 0.0);
  s.stddev.assign(m.dims(), 0.0);
  const double n = static_cast<double>(rows.size());
  for (std::size_t r : rows) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.dims(); ++c) s.mean[c] += row[c];
  }
  for (double& v : s.mean) v /= n;
  for (std::size_t r : rows) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.dims(); ++c) {
      const double d = row[c] - s.mean[c];
      s.stddev[c] += d * d;
    }
  }
  for (double& v : s.stddev) v = std::sqrt(v / n);
  return s;
}

EmbeddingMatrix ColumnStats::apply(const EmbeddingMatrix& m, double eps) const {
  if (m.dims() != mean.size()) {
    throw ShapeError("column statistics for " + std::to_string(mean.size()) + " columns applied to " +
                     m.shape_string());
  }
  std::vector<float> out(m.data().begin(), m.data().end());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.dims(); ++c) {
      double v = out[r * m.dims() + c] - mean[c];
      if (stddev[c] >= eps) v /= stddev[c];
      out[r * m.dims() + c] = static_cast<float>(v);
    }
  }
  return EmbeddingMatrix(m.rows(), m.dims(), std::move(out), m.ids());
}

std::vector<std::size_t> ColumnStats::constant_columns(double eps) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < stddev.size(); ++c) {
    if (stddev[c] < eps) out.push_back(c);
  }
  return out;
}

Standardized standardize_columns(const ConditionalRepresentation& r, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::config, "standardize epsilon must be positive");
  if (r.matrix.rows() < 2) {
    throw Error(ErrorKind::insufficient_data,
                "standardization needs at least 2 rows, got " + std::to_string(r.matrix.rows()));
  }
  const ColumnStats stats = ColumnStats::fit(r.matrix);
  return {{stats.apply(r.matrix, eps), r.basis_fingerprint, r.criterion_name}, stats.constant_columns(eps)};
}

Similarities cosine_similarity_matrix(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.dims() != b.dims()) {
    throw ShapeError("cannot compare " + a.shape_string() + " with " + b.shape_string(),
                     {{"lhs", a.shape_string()}, {"rhs", b.shape_string()}});
  }
  auto na = l2_normalize_rows(a);
  auto nb = l2_normalize_rows(b);
  return {matmul_transpose(na.matrix, nb.matrix), std::move(na.zero_rows), std::move(nb.zero_rows)};
}

}  // namespace crl::transform
