#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "crl/core/error.hpp"
#include "crl/core/linalg.hpp"
#include "crl/core/parallel.hpp"
#include "crl/eval/retrieval.hpp"

namespace crl::eval {
namespace {

double cosine(std::span<const float> a, std::span<const float> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na <= kZeroNormEpsilon || nb <= kZeroNormEpsilon) return 0.0;
  return dot(a, b) / (na * nb);
}

std::size_t lookup(const EmbeddingMatrix& m, const std::string& id, const char* what) {
  if (auto idx = m.find(id)) return *idx;
  throw Error(ErrorKind::consistency, std::string("id '") + id + "' missing from " + what, {{"id", id}});
}

}  // namespace

void SimilarityRetrievalInstance::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& g : gallery) {
    if (!seen.insert(g).second) {
      throw Error(ErrorKind::consistency, "duplicate gallery id '" + g + "' for query '" + query_id + "'");
    }
  }
  if (!seen.count(target_id)) {
    throw Error(ErrorKind::consistency, "target '" + target_id + "' absent from gallery of query '" + query_id + "'");
  }
}

double combined_score(double s1, double s2, const CombinedScoreConfig& config) { return s1 + config.alpha * s2; }

double RecallTable::at(std::size_t k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return recall[i];
  }
  throw Error(ErrorKind::invalid_value, "recall@" + std::to_string(k) + " was not computed");
}

RecallTable run_similarity_eval(const std::vector<SimilarityRetrievalInstance>& instances,
                                const EmbeddingMatrix& raw_images, const EmbeddingMatrix& condition_embeddings,
                                const ConditionalRepresentation& conditional, const CombinedScoreConfig& config) {
  if (!std::isfinite(config.alpha)) throw Error(ErrorKind::config, "alpha must be finite");
  if (raw_images.dims() != condition_embeddings.dims()) {
    throw ShapeError("image embeddings " + raw_images.shape_string() + " and condition embeddings " +
                     condition_embeddings.shape_string() + " differ in width");
  }
  const EmbeddingMatrix& cond = conditional.matrix;
  RecallTable table;
  table.ks = config.ks;
  table.instances = instances.size();
  table.target_ranks.assign(instances.size(), 0);

  for (const auto& inst : instances) {
    inst.validate();
    lookup(condition_embeddings, inst.condition_text, "condition embeddings");
    lookup(cond, inst.query_id, "conditional representations");
    for (const auto& g : inst.gallery) {
      lookup(raw_images, g, "raw image embeddings");
      lookup(cond, g, "conditional representations");
    }
  }

  parallel_for(instances.size(), [&](std::size_t q) {
    const auto& inst = instances[q];
    const auto text = condition_embeddings.row(lookup(condition_embeddings, inst.condition_text, ""));
    const auto query = cond.row(lookup(cond, inst.query_id, ""));
    std::vector<double> scores(inst.gallery.size());
    for (std::size_t g = 0; g < inst.gallery.size(); ++g) {
      const double s1 = cosine(text, raw_images.row(lookup(raw_images, inst.gallery[g], "")));
      const double s2 = cosine(query, cond.row(lookup(cond, inst.gallery[g], "")));
      scores[g] = combined_score(s1, s2, config);
    }
    std::vector<std::size_t> order(inst.gallery.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (inst.gallery[order[r]] == inst.target_id) {
        table.target_ranks[q] = r + 1;
        break;
      }
    }
  });

  for (std::size_t k : table.ks) {
    std::size_t hits = 0;
    for (std::size_t rank : table.target_ranks) hits += rank <= k;
    table.recall.push_back(instances.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(instances.size()));
  }
  return table;
}

std::vector<SimilarityRetrievalInstance> read_similarity_instances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open instances file " + path.string());
  std::vector<SimilarityRetrievalInstance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SimilarityRetrievalInstance inst{j.at("query_id").get<std::string>(), j.at("condition_text").get<std::string>(),
                                       j.at("gallery").get<std::vector<std::string>>(),
                                       j.at("target_id").get<std::string>()};
      inst.validate();
      out.push_back(std::move(inst));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad similarity instance: ") + e.what(), line.substr(0, 200));
    }
  }
  return out;
}

}  // namespace crl::eval
