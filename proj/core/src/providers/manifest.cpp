#include "crl/providers/manifest.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iterator>

#include "crl/core/error.hpp"
#include "crl/providers/crle.hpp"

namespace crl::providers {

using nlohmann::ordered_json;

std::string manifest_to_json(const Manifest& manifest) {
  ordered_json j;
  j["ids"] = manifest.ids;
  ordered_json criteria = ordered_json::object();
  for (const auto& [name, column] : manifest.criteria) {
    criteria[name] = {{"labels", column.labels}, {"classes", column.classes}};
  }
  j["criteria"] = std::move(criteria);
  j["provider"] = manifest.provider;
  j["source"] = manifest.source;
  if (manifest.basis) {
    j["basis"] = {{"criterion", manifest.basis->criterion},
                  {"subject_noun", manifest.basis->subject_noun},
                  {"fingerprint", manifest.basis->fingerprint},
                  {"normalized", manifest.basis->normalized}};
  }
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Manifest m;
    m.ids = j.at("ids").get<std::vector<std::string>>();
    if (j.contains("criteria")) {
      for (const auto& [name, col] : j.at("criteria").items()) {
        CriterionLabels labels;
        labels.labels = col.at("labels").get<std::vector<int>>();
        labels.classes = col.at("classes").get<std::vector<std::string>>();
        m.criteria.emplace(name, std::move(labels));
      }
    }
    m.provider = j.value("provider", "");
    m.source = j.value("source", "");
    if (j.contains("basis")) {
      const auto& b = j.at("basis");
      BasisInfo info;
      info.criterion = b.at("criterion").get<std::string>();
      info.subject_noun = b.value("subject_noun", "Objects");
      info.fingerprint = b.value("fingerprint", "");
      info.normalized = b.value("normalized", true);
      m.basis = std::move(info);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what(), text.substr(0, 200));
  }
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open manifest " + path.string());
  return manifest_from_json({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << manifest_to_json(manifest);
}

std::filesystem::path default_manifest_path(const std::filesystem::path& crle_path) {
  auto p = crle_path;
  p.replace_extension(".manifest.json");
  return p;
}

LabeledDataset make_labeled_dataset(EmbeddingMatrix embeddings, const Manifest& manifest) {
  if (manifest.ids.size() != embeddings.rows()) {
    throw Error(ErrorKind::consistency,
                "manifest lists " + std::to_string(manifest.ids.size()) + " ids but CRLE has " +
                    std::to_string(embeddings.rows()) + " rows",
                {{"manifest_ids", static_cast<std::int64_t>(manifest.ids.size())},
                 {"crle_rows", static_cast<std::int64_t>(embeddings.rows())}});
  }
  std::map<std::string, std::vector<int>> labels;
  std::map<std::string, std::vector<std::string>> classes;
  for (const auto& [name, column] : manifest.criteria) {
    labels[name] = column.labels;
    classes[name] = column.classes;
  }
  return LabeledDataset(embeddings.with_ids(manifest.ids), std::move(labels), std::move(classes));
}

LabeledDataset load_labeled_dataset(const std::filesystem::path& crle_path,
                                    const std::filesystem::path& manifest_path) {
  return make_labeled_dataset(read_crle(crle_path), read_manifest(manifest_path));
}

Manifest manifest_for(const LabeledDataset& dataset, std::string provider, std::string source) {
  Manifest m;
  m.ids = dataset.embeddings().ids();
  for (const auto& name : dataset.criteria()) {
    m.criteria[name] = {dataset.labels(name), dataset.class_names(name)};
  }
  m.provider = std::move(provider);
  m.source = std::move(source);
  return m;
}

void save_basis(const TextBasis& basis, const std::filesystem::path& crle_path,
                const std::filesystem::path& manifest_path, const std::string& source) {
  write_crle(basis.vectors(), crle_path);
  Manifest m;
  m.ids = basis.descriptors();
  m.provider = basis.provider_id();
  m.source = source;
  m.basis = BasisInfo{basis.criterion().name, basis.criterion().subject_noun, basis.fingerprint(),
                      basis.normalized()};
  write_manifest(m, manifest_path);
}

TextBasis load_basis(const std::filesystem::path& crle_path,
                     const std::filesystem::path& manifest_path) {
  const EmbeddingMatrix vectors = read_crle(crle_path);
  const Manifest m = read_manifest(manifest_path);
  if (!m.basis) {
    throw Error(ErrorKind::consistency, "manifest " + manifest_path.string() + " does not describe a basis");
  }
  if (m.ids.size() != vectors.rows()) {
    throw Error(ErrorKind::consistency,
                "basis manifest lists " + std::to_string(m.ids.size()) + " descriptors but CRLE has " +
                    std::to_string(vectors.rows()) + " rows",
                {{"manifest_ids", static_cast<std::int64_t>(m.ids.size())},
                 {"crle_rows", static_cast<std::int64_t>(vectors.rows())}});
  }
  Criterion c = make_criterion(m.basis->criterion, m.basis->subject_noun);
  TextBasis basis(std::move(c), m.ids, vectors, m.basis->normalized, m.provider);
  if (!m.basis->fingerprint.empty() && m.basis->fingerprint != basis.fingerprint()) {
    throw Error(ErrorKind::consistency, "basis fingerprint mismatch for " + crle_path.string());
  }
  return basis;
}

}  // namespace crl::providers
