#include <cmath>
#include <limits>

#include "crl/core/error.hpp"
#include "crl/core/rng.hpp"
#include "crl/eval/cluster.hpp"

namespace crl::eval {
namespace {

// Salt separating k-means streams from other protocols sharing a seed.
constexpr std::uint64_t kKMeansSalt = 0x6b6d65616e73ULL;

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

struct Workspace {
  std::size_t n;
  std::size_t d;
  std::size_t k;
  std::vector<double> points;
  std::vector<double> centroids;

  const double* point(std::size_t i) const { return points.data() + i * d; }
  double* centroid(std::size_t c) { return centroids.data() + c * d; }
  const double* centroid(std::size_t c) const { return centroids.data() + c * d; }
};

void seed_plus_plus(Workspace& w, Rng& rng) {
  std::vector<double> nearest(w.n, std::numeric_limits<double>::infinity());
  std::size_t chosen = rng.uniform_index(w.n);
  for (std::size_t c = 0; c < w.k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double v : nearest) total += v;
      if (total <= 0.0) {
        chosen = rng.uniform_index(w.n);
      } else {
        double target = rng.uniform() * total;
        chosen = w.n - 1;
        for (std::size_t i = 0; i < w.n; ++i) {
          target -= nearest[i];
          if (target < 0.0) {
            chosen = i;
            break;
          }
        }
      }
    }
    std::copy_n(w.point(chosen), w.d, w.centroid(c));
    for (std::size_t i = 0; i < w.n; ++i) {
      nearest[i] = std::min(nearest[i], sq_dist(w.point(i), w.centroid(c), w.d));
    }
  }
}

void seed_random(Workspace& w, Rng& rng) {
  std::vector<std::size_t> order(w.n);
  for (std::size_t i = 0; i < w.n; ++i) order[i] = i;
  // Partial Fisher-Yates: first k entries are a uniform sample.
  for (std::size_t c = 0; c < w.k; ++c) {
    std::swap(order[c], order[c + rng.uniform_index(w.n - c)]);
    std::copy_n(w.point(order[c]), w.d, w.centroid(c));
  }
}

double assign(const Workspace& w, std::vector<int>& labels, std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < w.n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (std::size_t c = 0; c < w.k; ++c) {
      const double dd = sq_dist(w.point(i), w.centroid(c), w.d);
      if (dd < best) {
        best = dd;
        best_c = static_cast<int>(c);
      }
    }
    labels[i] = best_c;
    dist[i] = best;
    inertia += best;
  }
  return inertia;
}

}  // namespace

KMeansResult kmeans(const EmbeddingMatrix& x, const ClusterConfig& config, std::size_t trial) {
  config.validate();
  if (x.rows() < config.k) {
    throw Error(ErrorKind::insufficient_data,
                "k-means needs at least k=" + std::to_string(config.k) + " rows, got " + std::to_string(x.rows()),
                {{"rows", static_cast<std::int64_t>(x.rows())}, {"k", static_cast<std::int64_t>(config.k)}});
  }
  Workspace w{x.rows(), x.dims(), config.k, std::vector<double>(x.data().begin(), x.data().end()),
              std::vector<double>(config.k * x.dims(), 0.0)};
  Rng rng(RunSeed{config.base_seed, trial}, kKMeansSalt);
  if (config.init == KMeansInit::kmeans_plus_plus) {
    seed_plus_plus(w, rng);
  } else {
    seed_random(w, rng);
  }

  KMeansResult result;
  result.assignments.assign(w.n, 0);
  std::vector<double> dist(w.n, 0.0);
  std::vector<double> sums(w.k * w.d);
  std::vector<std::size_t> counts(w.k);

  double inertia = assign(w, result.assignments, dist);
  result.inertia_history.push_back(inertia);
  for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
    result.iterations = iter + 1;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < w.n; ++i) {
      const auto c = static_cast<std::size_t>(result.assignments[i]);
      ++counts[c];
      const double* p = w.point(i);
      for (std::size_t j = 0; j < w.d; ++j) sums[c * w.d + j] += p[j];
    }
    double max_shift = 0.0;
    std::vector<bool> taken(w.n, false);
    for (std::size_t c = 0; c < w.k; ++c) {
      std::vector<double> next(w.d);
      if (counts[c] > 0) {
        for (std::size_t j = 0; j < w.d; ++j) next[j] = sums[c * w.d + j] / static_cast<double>(counts[c]);
      } else {
        // Empty cluster: move it onto the worst-served point.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < w.n; ++i) {
          if (!taken[i] && dist[i] > far_d) {
            far_d = dist[i];
            far = i;
          }
        }
        taken[far] = true;
        dist[far] = 0.0;
        std::copy_n(w.point(far), w.d, next.begin());
      }
      max_shift = std::max(max_shift, std::sqrt(sq_dist(next.data(), w.centroid(c), w.d)));
      std::copy(next.begin(), next.end(), w.centroid(c));
    }
    inertia = assign(w, result.assignments, dist);
    result.inertia_history.push_back(inertia);
    if (max_shift < config.tol) break;
  }
  result.inertia = inertia;
  return result;
}

}  // namespace crl::eval
