#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "crl/core/matrix.hpp"
#include "crl/core/types.hpp"

namespace crl::eval {

enum class KMeansInit { kmeans_plus_plus, random };

struct ClusterConfig {
  std::size_t k = 2;
  std::size_t trials = 20;
  std::size_t max_iters = 300;
  double tol = 1e-6;
  KMeansInit init = KMeansInit::kmeans_plus_plus;
  std::uint64_t base_seed = 0;
  /// L2-normalize rows before clustering.
  bool normalize_rows = false;
  /// 0 = hardware concurrency.
  std::size_t threads = 0;

  void validate() const;
};

struct KMeansResult {
  std::vector<int> assignments;
  double inertia = 0.0;
  std::size_t iterations = 0;
  /// Inertia after every assignment step; non-increasing.
  std::vector<double> inertia_history;
};

/// Lloyd iterations from k-means++ (or uniform) seeding on the trial's RNG
/// stream. Stops when no centroid moves more than `tol` or after max_iters.
/// Empty clusters are re-seeded with the point farthest from its centroid.
KMeansResult kmeans(const EmbeddingMatrix& x, const ClusterConfig& config, std::size_t trial);

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;
};

struct ClusterResult {
  std::vector<std::vector<int>> assignments;
  std::vector<double> nmi;
  std::vector<double> acc;
  std::vector<double> ari;
  MetricSummary nmi_summary;
  MetricSummary acc_summary;
  MetricSummary ari_summary;
};

/// Mean and population standard deviation.
MetricSummary summarize(const std::vector<double>& values);

/// `config.trials` independent k-means runs scored against `labels`.
ClusterResult run_clustering_eval(const EmbeddingMatrix& features, const std::vector<int>& labels,
                                  const ClusterConfig& config);
ClusterResult run_clustering_eval(const ConditionalRepresentation& r, const std::vector<int>& labels,
                                  const ClusterConfig& config);

}  // namespace crl::eval
