#include "crl/eval/reports.hpp"

#include <nlohmann/json.hpp>

namespace crl::eval {
namespace {

using Json = nlohmann::ordered_json;

Json summary_json(const MetricSummary& s) { return Json{{"mean", s.mean}, {"std", s.stddev}}; }

std::string finish(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string cluster_report(const std::string& criterion, const ClusterConfig& config, const ClusterResult& result) {
  Json j;
  j["protocol"] = "cluster";
  j["criterion"] = criterion;
  j["k"] = config.k;
  j["trials"] = config.trials;
  j["seed"] = config.base_seed;
  j["metrics"] = Json{{"nmi", summary_json(result.nmi_summary)},
                      {"acc", summary_json(result.acc_summary)},
                      {"ari", summary_json(result.ari_summary)}};
  j["per_trial"] = Json{{"nmi", result.nmi}, {"acc", result.acc}, {"ari", result.ari}};
  j["config"] = Json{{"max_iters", config.max_iters},
                     {"tol", config.tol},
                     {"init", config.init == KMeansInit::kmeans_plus_plus ? "kmeans++" : "random"},
                     {"normalize_rows", config.normalize_rows}};
  return finish(j);
}

std::string fewshot_report(const std::string& criterion, const FewShotConfig& config, const FewShotResult& result) {
  Json j;
  j["protocol"] = "fewshot";
  j["criterion"] = criterion;
  Json shots = Json::object();
  for (const auto& s : result.per_shot) {
    shots[std::to_string(s.shots)] = summary_json(s.summary);
  }
  j["shots"] = shots;
  j["draws"] = config.draws;
  j["seed"] = config.base_seed;
  j["config"] = Json{{"l2_strength", config.l2_strength},
                     {"max_iters", config.max_iters},
                     {"lr", config.lr},
                     {"grad_tol", config.grad_tol}};
  return finish(j);
}

std::string recall_report(const std::string& criterion, const CombinedScoreConfig& config, const RecallTable& table) {
  Json j;
  j["protocol"] = "sim-retrieval";
  j["criterion"] = criterion;
  j["instances"] = table.instances;
  Json recall = Json::object();
  for (std::size_t i = 0; i < table.ks.size(); ++i) recall[std::to_string(table.ks[i])] = table.recall[i];
  j["recall"] = recall;
  j["config"] = Json{{"alpha", config.alpha}};
  return finish(j);
}

std::string map_report(const std::string& criterion, const MapReport& report, const FashionReportExtras& extras) {
  Json j;
  j["protocol"] = "fashion-retrieval";
  j["criterion"] = criterion;
  j["map"] = report.map;
  j["evaluated"] = report.evaluated;
  j["skipped"] = report.skipped;
  if (extras.trained_mlp) {
    const auto& t = extras.triplet;
    j["mlp"] = Json{{"margin", t.margin},         {"epochs", t.epochs},
                    {"lr", t.lr},                 {"lr_decay", t.lr_decay},
                    {"decay_step", t.decay_step}, {"hidden_dim", t.hidden_dim},
                    {"batch_size", t.batch_size}, {"seed", t.seed},
                    {"initial_loss", extras.initial_loss}, {"final_loss", extras.final_loss}};
  }
  return finish(j);
}

}  // namespace crl::eval
