#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "crl/core/matrix.hpp"
#include "crl/core/types.hpp"

namespace crl::eval {

struct SimilarityRetrievalInstance {
  std::string query_id;
  std::string condition_text;
  std::vector<std::string> gallery;
  std::string target_id;

  void validate() const;
};

struct CombinedScoreConfig {
  /// Weight of the conditional (S2) term.
  double alpha = 10.0;
  std::vector<std::size_t> ks = {1, 2, 3};
};

/// S = s1 + alpha * s2.
double combined_score(double s1, double s2, const CombinedScoreConfig& config = {});

struct RecallTable {
  std::vector<std::size_t> ks;
  std::vector<double> recall;  // aligned with ks
  /// 1-based rank of each instance's target.
  std::vector<std::size_t> target_ranks;
  std::size_t instances = 0;

  double at(std::size_t k) const;
};

/// Ranks each instance's gallery by S1 + alpha * S2 where
///   S1 = cos(condition-text embedding, raw candidate embedding)
///   S2 = cos(query conditional rep, candidate conditional rep).
/// Ties keep gallery order. `condition_embeddings` rows are looked up by the
/// condition text itself. Throws ConsistencyError on unknown ids.
RecallTable run_similarity_eval(const std::vector<SimilarityRetrievalInstance>& instances,
                                const EmbeddingMatrix& raw_images, const EmbeddingMatrix& condition_embeddings,
                                const ConditionalRepresentation& conditional, const CombinedScoreConfig& config = {});

/// Mean over relevant positions i of (relevant in top i) / i.
/// Throws UndefinedAp when nothing is relevant.
double average_precision(const std::vector<bool>& ranked_relevance);

struct FashionQuery {
  std::string query_id;
  std::string criterion;
  /// Class name under the criterion; empty means "use the query's label".
  std::string value;
};

struct MapReport {
  double map = 0.0;
  std::size_t evaluated = 0;
  /// Queries with no relevant gallery item; excluded from the mean.
  std::size_t skipped = 0;
  std::vector<double> per_query;
};

using RepresentationFn = std::function<EmbeddingMatrix(const EmbeddingMatrix&)>;

/// For each query, ranks gallery rows (all dataset rows except the query,
/// unless `gallery_ids` is given) by cosine similarity of `represent(x)`
/// and scores relevance as "same class under the criterion".
MapReport run_fashion_eval(const std::vector<FashionQuery>& queries, const LabeledDataset& dataset,
                           const RepresentationFn& represent, const std::vector<std::string>& gallery_ids = {});

std::vector<SimilarityRetrievalInstance> read_similarity_instances(const std::filesystem::path& path);
std::vector<FashionQuery> read_fashion_queries(const std::filesystem::path& path);

}  // namespace crl::eval
