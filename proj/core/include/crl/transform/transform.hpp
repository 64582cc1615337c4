#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crl/core/matrix.hpp"
#include "crl/core/types.hpp"

namespace crl::transform {

struct TransformOptions {
  /// L2-normalize image rows before projecting, making entries cosines.
  bool normalize_images_first = true;
  bool standardize_output = false;
  double standardize_epsilon = 1e-8;

  void validate() const;
};

struct Projection {
  ConditionalRepresentation representation;
  std::vector<std::size_t> zero_image_rows;
  std::vector<std::size_t> constant_columns;
};

/// R = I T^T: entry (k, j) is the similarity of image k to descriptor j.
Projection project(const EmbeddingMatrix& images, const TextBasis& basis,
                   const TransformOptions& options = {});

/// Per-column mean and population standard deviation.
struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  /// Fits on the given rows (all rows when empty).
  static ColumnStats fit(const EmbeddingMatrix& m, std::span<const std::size_t> rows = {});
  /// (x - mean) / std, or x - mean for columns with std < eps.
  EmbeddingMatrix apply(const EmbeddingMatrix& m, double eps) const;
  std::vector<std::size_t> constant_columns(double eps) const;
};

struct Standardized {
  ConditionalRepresentation representation;
  std::vector<std::size_t> constant_columns;
};

/// Zero mean, unit population variance per column. Columns whose std is
/// below eps are only centered. Throws InsufficientData for < 2 rows.
Standardized standardize_columns(const ConditionalRepresentation& r, double eps = 1e-8);

struct Similarities {
  EmbeddingMatrix matrix;
  std::vector<std::size_t> zero_rows_a;
  std::vector<std::size_t> zero_rows_b;
};

/// Entry (i, j) = cos(a_i, b_j); rows with zero norm give 0.
Similarities cosine_similarity_matrix(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

}  // namespace crl::transform
