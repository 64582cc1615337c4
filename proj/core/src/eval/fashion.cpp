#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>

#include "crl/core/error.hpp"
#include "crl/core/parallel.hpp"
#include "crl/eval/retrieval.hpp"
#include "crl/core/linalg.hpp"

namespace crl::eval {

double average_precision(const std::vector<bool>& ranked_relevance) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked_relevance.size(); ++i) {
    if (ranked_relevance[i]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  if (hits == 0) throw Error(ErrorKind::undefined_ap, "average precision undefined without relevant items");
  return sum / static_cast<double>(hits);
}

MapReport run_fashion_eval(const std::vector<FashionQuery>& queries, const LabeledDataset& dataset,
                           const RepresentationFn& represent, const std::vector<std::string>& gallery_ids) {
  const EmbeddingMatrix& all = dataset.embeddings();
  const EmbeddingMatrix reps = represent ? represent(all) : all;
  if (reps.rows() != all.rows()) {
    throw ShapeError("representation function changed the row count from " + std::to_string(all.rows()) + " to " +
                     std::to_string(reps.rows()));
  }
  std::vector<std::size_t> gallery;
  if (gallery_ids.empty()) {
    gallery.resize(all.rows());
    std::iota(gallery.begin(), gallery.end(), 0);
  } else {
    for (const auto& id : gallery_ids) gallery.push_back(all.index_of(id));
  }

  struct Resolved {
    std::size_t row;
    const std::vector<int>* labels;
    int value;
  };
  std::vector<Resolved> resolved;
  resolved.reserve(queries.size());
  for (const auto& q : queries) {
    const std::size_t row = all.index_of(q.query_id);
    const auto& labels = dataset.labels(q.criterion);
    int value = labels[row];
    if (!q.value.empty()) {
      const auto& names = dataset.class_names(q.criterion);
      const auto it = std::find(names.begin(), names.end(), q.value);
      if (it == names.end()) {
        throw Error(ErrorKind::consistency, "value '" + q.value + "' is not a class of criterion '" + q.criterion + "'",
                    {{"criterion", q.criterion}, {"value", q.value}});
      }
      value = static_cast<int>(it - names.begin());
    }
    resolved.push_back({row, &labels, value});
  }

  const EmbeddingMatrix unit = l2_normalize_rows(reps).matrix;

  MapReport report;
  report.per_query.assign(queries.size(), -1.0);
  parallel_for(queries.size(), [&](std::size_t q) {
    const auto& r = resolved[q];
    std::vector<std::size_t> order;
    std::vector<double> row(gallery.size(), 0.0);
    const auto query = unit.row(r.row);
    for (std::size_t g = 0; g < gallery.size(); ++g) {
      if (gallery[g] == r.row) continue;
      order.push_back(g);
      row[g] = dot(query, unit.row(gallery[g]));
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    std::vector<bool> relevance(order.size());
    bool any = false;
    for (std::size_t i = 0; i < order.size(); ++i) {
      relevance[i] = (*r.labels)[gallery[order[i]]] == r.value;
      any = any || relevance[i];
    }
    if (any) report.per_query[q] = average_precision(relevance);
  });

  double sum = 0.0;
  for (double ap : report.per_query) {
    if (ap < 0.0) {
      ++report.skipped;
    } else {
      ++report.evaluated;
      sum += ap;
    }
  }
  report.map = report.evaluated ? sum / static_cast<double>(report.evaluated) : 0.0;
  return report;
}

std::vector<FashionQuery> read_fashion_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open query file " + path.string());
  std::vector<FashionQuery> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("query_id").get<std::string>(), j.at("criterion").get<std::string>(),
                     j.value("value", std::string())});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad fashion query: ") + e.what(), line.substr(0, 200));
    }
  }
  return out;
}

}  // namespace crl::eval
