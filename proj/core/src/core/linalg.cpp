#include "crl/core/linalg.hpp"

#include <cmath>

#include "crl/core/error.hpp"

namespace crl {

double dot(std::span<const float> a, std::span<const float> b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

double l2_norm(std::span<const float> a) noexcept { return std::sqrt(dot(a, a)); }

NormalizedRows l2_normalize_rows(const EmbeddingMatrix& m) {
  std::vector<float> out(m.data().begin(), m.data().end());
  std::vector<std::size_t> zero_rows;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double norm = l2_norm(m.row(r));
    if (norm <= kZeroNormEpsilon) {
      zero_rows.push_back(r);
      continue;
    }
    float* dst = out.data() + r * m.dims();
    for (std::size_t c = 0; c < m.dims(); ++c) {
      dst[c] = static_cast<float>(static_cast<double>(dst[c]) / norm);
    }
  }
  return {EmbeddingMatrix(m.rows(), m.dims(), std::move(out), m.ids()), std::move(zero_rows)};
}

EmbeddingMatrix matmul_transpose(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.dims() != b.dims()) {
    throw ShapeError("cannot multiply " + a.shape_string() + " by transpose of " +
                         b.shape_string() + ": inner dimensions differ",
                     {{"lhs", a.shape_string()}, {"rhs", b.shape_string()}});
  }
  std::vector<float> out(a.rows() * b.rows());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto ak = a.row(k);
    float* dst = out.data() + k * b.rows();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      dst[j] = static_cast<float>(dot(ak, b.row(j)));
    }
  }
  return EmbeddingMatrix(a.rows(), b.rows(), std::move(out), a.ids());
}

}  // namespace crl
