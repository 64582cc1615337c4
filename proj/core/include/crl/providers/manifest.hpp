#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crl/core/types.hpp"

namespace crl::providers {

struct CriterionLabels {
  std::vector<int> labels;
  std::vector<std::string> classes;
};

/// Present when the CRLE next to the manifest holds a text basis.
struct BasisInfo {
  std::string criterion;
  std::string subject_noun = "Objects";
  std::string fingerprint;
  bool normalized = true;
};

/// JSON sidecar for a CRLE file:
/// {ids, criteria: {name: {labels, classes}}, provider, source[, basis]}.
struct Manifest {
  std::vector<std::string> ids;
  std::map<std::string, CriterionLabels> criteria;
  std::string provider;
  std::string source;
  std::optional<BasisInfo> basis;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text);
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// `<stem>.manifest.json` next to `crle_path`.
std::filesystem::path default_manifest_path(const std::filesystem::path& crle_path);

/// Joins a CRLE file and its manifest. Throws ConsistencyError naming both
/// counts when ids and rows disagree.
LabeledDataset load_labeled_dataset(const std::filesystem::path& crle_path,
                                    const std::filesystem::path& manifest_path);
LabeledDataset make_labeled_dataset(EmbeddingMatrix embeddings, const Manifest& manifest);
Manifest manifest_for(const LabeledDataset& dataset, std::string provider, std::string source);

void save_basis(const TextBasis& basis, const std::filesystem::path& crle_path,
                const std::filesystem::path& manifest_path, const std::string& source = {});
TextBasis load_basis(const std::filesystem::path& crle_path,
                     const std::filesystem::path& manifest_path);

}  // namespace crl::providers
