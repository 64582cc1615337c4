#include <cmath>

#include "crl/core/error.hpp"
#include "crl/core/linalg.hpp"
#include "crl/core/parallel.hpp"
#include "crl/eval/cluster.hpp"
#include "crl/eval/metrics.hpp"

namespace crl::eval {

void ClusterConfig::validate() const {
  if (k < 1) throw Error(ErrorKind::config, "cluster count k must be at least 1");
  if (trials < 1) throw Error(ErrorKind::config, "trials must be at least 1");
  if (!(tol >= 0.0)) throw Error(ErrorKind::config, "tol must be nonnegative");
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

ClusterResult run_clustering_eval(const EmbeddingMatrix& features, const std::vector<int>& labels,
                                  const ClusterConfig& config) {
  config.validate();
  if (labels.size() != features.rows()) {
    throw ShapeError("have " + std::to_string(labels.size()) + " labels for " + std::to_string(features.rows()) +
                     " feature rows");
  }
  const EmbeddingMatrix x = config.normalize_rows ? l2_normalize_rows(features).matrix : features;

  ClusterResult result;
  result.assignments.resize(config.trials);
  result.nmi.resize(config.trials);
  result.acc.resize(config.trials);
  result.ari.resize(config.trials);
  parallel_for(
      config.trials,
      [&](std::size_t t) {
        auto km = kmeans(x, config, t);
        result.nmi[t] = nmi(km.assignments, labels);
        result.acc[t] = acc(km.assignments, labels);
        result.ari[t] = ari(km.assignments, labels);
        result.assignments[t] = std::move(km.assignments);
      },
      config.threads);
  result.nmi_summary = summarize(result.nmi);
  result.acc_summary = summarize(result.acc);
  result.ari_summary = summarize(result.ari);
  return result;
}

ClusterResult run_clustering_eval(const ConditionalRepresentation& r, const std::vector<int>& labels,
                                  const ClusterConfig& config) {
  return run_clustering_eval(r.matrix, labels, config);
}

}  // namespace crl::eval
