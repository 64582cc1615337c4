#pragma once

#include <cstdint>
#include <string>

#include "crl/eval/cluster.hpp"
#include "crl/eval/fewshot.hpp"
#include "crl/eval/retrieval.hpp"
#include "crl/eval/triplet.hpp"

namespace crl::eval {

// Reports are pretty-printed JSON with a fixed key order and a trailing
// newline, so identical inputs give byte-identical files.

std::string cluster_report(const std::string& criterion, const ClusterConfig& config, const ClusterResult& result);
std::string fewshot_report(const std::string& criterion, const FewShotConfig& config, const FewShotResult& result);
std::string recall_report(const std::string& criterion, const CombinedScoreConfig& config, const RecallTable& table);

struct FashionReportExtras {
  bool trained_mlp = false;
  TripletTrainConfig triplet;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

std::string map_report(const std::string& criterion, const MapReport& report, const FashionReportExtras& extras = {});

}  // namespace crl::eval
