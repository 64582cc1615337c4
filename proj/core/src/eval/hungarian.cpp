#include <algorithm>
#include <limits>

#include "crl/core/error.hpp"
#include "crl/eval/metrics.hpp"

namespace crl::eval {
namespace {

using Cost = std::int64_t;
constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;

// Minimum-cost perfect assignment on an n x n matrix (potentials method).
// `assign[row]` receives the chosen column; `u`/`v` the optimal row/column
// potentials (1-based), so cost(i, j) - u[i+1] - v[j+1] >= 0 with equality
// on every edge of every optimal assignment.
void min_cost_assignment(std::size_t n, const std::vector<Cost>& cost, std::vector<std::size_t>& assign,
                         std::vector<Cost>& u, std::vector<Cost>& v) {
  u.assign(n + 1, 0);
  v.assign(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<Cost> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      Cost delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Cost cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  assign.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) assign[p[j] - 1] = j - 1;
  }
}

}  // namespace

std::vector<std::size_t> hungarian_match(std::size_t rows, std::span<const std::int64_t> counts) {
  if (counts.size() != rows * rows) {
    throw ShapeError("assignment needs a square matrix; got " + std::to_string(counts.size()) +
                     " entries for " + std::to_string(rows) + " rows");
  }
  const std::size_t n = rows;
  if (n == 0) return {};
  for (auto c : counts) {
    if (c < 0) throw Error(ErrorKind::invalid_value, "confusion counts must be nonnegative");
  }
  std::vector<Cost> cost(counts.begin(), counts.end());
  for (auto& c : cost) c = -c;

  std::vector<std::size_t> match;
  std::vector<Cost> u, v;
  min_cost_assignment(n, cost, match, u, v);
  auto tight = [&](std::size_t r, std::size_t c) { return cost[r * n + c] - u[r + 1] - v[c + 1] == 0; };

  // Lexicographic tie-break over the optimal set: fix rows in order, each
  // taking the smallest tight column reachable by an alternating cycle.
  std::vector<std::size_t> owner(n);
  for (std::size_t r = 0; r < n; ++r) owner[match[r]] = r;
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> next(n);
  std::vector<std::size_t> queue;
  for (std::size_t row = 0; row < n; ++row) {
    // Rows that can hand their column along a chain ending at `row`.
    std::fill(next.begin() + static_cast<std::ptrdiff_t>(row), next.end(), kNone);
    next[row] = row;
    queue.assign(1, row);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t col = match[queue[q]];
      for (std::size_t r = row + 1; r < n; ++r) {
        if (next[r] == kNone && tight(r, col)) {
          next[r] = queue[q];
          queue.push_back(r);
        }
      }
    }
    for (std::size_t col = 0; col < match[row]; ++col) {
      const std::size_t first = owner[col];
      if (first <= row || next[first] == kNone || !tight(row, col)) continue;
      std::vector<std::size_t> chain{row};
      for (std::size_t r = first; r != row; r = next[r]) chain.push_back(r);
      const std::size_t freed = match[row];
      // Ascending order reads each successor's column before it moves.
      for (std::size_t k = 1; k < chain.size(); ++k) {
        const std::size_t target = next[chain[k]] == row ? freed : match[next[chain[k]]];
        match[chain[k]] = target;
        owner[target] = chain[k];
      }
      match[row] = col;
      owner[col] = row;
      break;
    }
  }
  std::vector<std::size_t> perm = match;
  return perm;
}

std::vector<std::size_t> hungarian_match(const ConfusionMatrix& m) { return hungarian_match(m.size, m.counts); }

}  // namespace crl::eval
