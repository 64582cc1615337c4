#include "crl/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "crl/core/error.hpp"

namespace crl::eval {
namespace {

void check_lengths(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) {
    throw ShapeError("prediction length " + std::to_string(pred.size()) + " differs from truth length " +
                     std::to_string(truth.size()));
  }
  if (pred.empty()) throw ShapeError("metrics need at least one sample");
}

// Maps arbitrary labels to 0..k-1 in ascending label order.
std::vector<std::size_t> densify(std::span<const int> labels, std::size_t& k) {
  std::map<int, std::size_t> index;
  for (int l : labels) index.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [_, v] : index) v = next++;
  k = next;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = index[labels[i]];
  return out;
}

struct Contingency {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cells;
  std::vector<double> row_sums;
  std::vector<double> col_sums;
  double n = 0;
};

Contingency contingency(std::span<const int> pred, std::span<const int> truth) {
  Contingency c;
  const auto p = densify(pred, c.rows);
  const auto t = densify(truth, c.cols);
  c.cells.assign(c.rows * c.cols, 0.0);
  c.row_sums.assign(c.rows, 0.0);
  c.col_sums.assign(c.cols, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    c.cells[p[i] * c.cols + t[i]] += 1.0;
    c.row_sums[p[i]] += 1.0;
    c.col_sums[t[i]] += 1.0;
  }
  c.n = static_cast<double>(p.size());
  return c;
}

double entropy(const std::vector<double>& sums, double n) {
  double h = 0.0;
  for (double s : sums) {
    if (s > 0) h -= (s / n) * std::log(s / n);
  }
  return h;
}

double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

ConfusionMatrix confusion(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth);
  std::size_t kp = 0, kt = 0;
  const auto p = densify(pred, kp);
  const auto t = densify(truth, kt);
  ConfusionMatrix m;
  m.size = std::max(kp, kt);
  m.counts.assign(m.size * m.size, 0);
  for (std::size_t i = 0; i < p.size(); ++i) ++m.counts[p[i] * m.size + t[i]];
  return m;
}

double acc(std::span<const int> pred, std::span<const int> truth) {
  const ConfusionMatrix m = confusion(pred, truth);
  const auto perm = hungarian_match(m);
  std::int64_t matched = 0;
  for (std::size_t r = 0; r < m.size; ++r) matched += m.at(r, perm[r]);
  return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth);
  const Contingency c = contingency(pred, truth);
  // Both partitions trivial (a single block each): identical by definition.
  if (c.rows == 1 && c.cols == 1) return 1.0;
  double mi = 0.0;
  for (std::size_t r = 0; r < c.rows; ++r) {
    for (std::size_t k = 0; k < c.cols; ++k) {
      const double nij = c.cells[r * c.cols + k];
      if (nij > 0) mi += (nij / c.n) * std::log(c.n * nij / (c.row_sums[r] * c.col_sums[k]));
    }
  }
  const double denom = 0.5 * (entropy(c.row_sums, c.n) + entropy(c.col_sums, c.n));
  if (denom <= 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

double ari(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth);
  const Contingency c = contingency(pred, truth);
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (double v : c.cells) sum_cells += comb2(v);
  for (double v : c.row_sums) sum_rows += comb2(v);
  for (double v : c.col_sums) sum_cols += comb2(v);
  const double total = comb2(c.n);
  if (total == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // Equal max and expectation only when both partitions are all-in-one or
  // all-singletons, i.e. identical.
  if (max_index == expected) return 1.0;
  return (sum_cells - expected) / (max_index - expected);
}

}  // namespace crl::eval
