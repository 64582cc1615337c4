#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crl/core/matrix.hpp"

namespace crl {

inline constexpr double kZeroNormEpsilon = 1e-12;

/// Dot product accumulated in double, left to right over dims.
double dot(std::span<const float> a, std::span<const float> b) noexcept;
double l2_norm(std::span<const float> a) noexcept;

struct NormalizedRows {
  EmbeddingMatrix matrix;
  /// Rows whose norm was <= kZeroNormEpsilon; left untouched.
  std::vector<std::size_t> zero_rows;
};

NormalizedRows l2_normalize_rows(const EmbeddingMatrix& m);

/// Entry (k, j) = dot(a_k, b_j). Result keeps a's row ids.
EmbeddingMatrix matmul_transpose(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

}  // namespace crl
