#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace crl::eval {

/// Square count matrix, row-major: counts[row * size + col].
struct ConfusionMatrix {
  std::size_t size = 0;
  std::vector<std::int64_t> counts;

  std::int64_t at(std::size_t r, std::size_t c) const { return counts[r * size + c]; }
};

/// Rows index predicted clusters, columns index true classes; padded to the
/// larger label range so it is always square.
ConfusionMatrix confusion(std::span<const int> pred, std::span<const int> truth);

/// Assignment perm[row] = col maximizing sum counts(row, perm[row]).
/// Among optimal assignments the lexicographically smallest is returned.
/// Throws ShapeError when `counts.size() != rows * rows`.
std::vector<std::size_t> hungarian_match(std::size_t rows, std::span<const std::int64_t> counts);
std::vector<std::size_t> hungarian_match(const ConfusionMatrix& m);

/// Clustering accuracy under the optimal one-to-one cluster/class mapping.
double acc(std::span<const int> pred, std::span<const int> truth);
/// Mutual information normalized by the arithmetic mean of the entropies.
double nmi(std::span<const int> pred, std::span<const int> truth);
/// Adjusted Rand index (pair counting).
double ari(std::span<const int> pred, std::span<const int> truth);

}  // namespace crl::eval
