#include "crl/core/types.hpp"

#include <cctype>
#include <cmath>
#include <unordered_set>

#include "crl/core/error.hpp"
#include "crl/core/hash.hpp"
#include "crl/core/linalg.hpp"

namespace crl {

void Criterion::validate() const {
  if (name.empty()) throw Error(ErrorKind::config, "criterion name must be nonempty");
  if (subject_noun.empty()) throw Error(ErrorKind::config, "criterion subject noun must be nonempty");
}

Criterion make_criterion(std::string name, std::string subject_noun) {
  Criterion c;
  c.name = std::move(name);
  c.subject_noun = std::move(subject_noun);
  c.validate();
  return c;
}

std::string fold_key(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  std::string out(text.substr(begin, end - begin));
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string basis_fingerprint(const Criterion& criterion,
                              const std::vector<std::string>& descriptors,
                              std::string_view provider_id) {
  Sha256 h;
  h.field("crl-basis-v1").field(criterion.name).field(criterion.subject_noun).field(provider_id);
  h.field(std::to_string(descriptors.size()));
  for (const auto& d : descriptors) h.field(d);
  return h.hex_digest();
}

TextBasis::TextBasis(Criterion criterion, std::vector<std::string> descriptors,
                     EmbeddingMatrix vectors, bool normalized, std::string provider_id)
    : criterion_(std::move(criterion)),
      descriptors_(std::move(descriptors)),
      vectors_(std::move(vectors)),
      normalized_(normalized),
      provider_id_(std::move(provider_id)) {
  criterion_.validate();
  if (vectors_.rows() != descriptors_.size()) {
    throw ShapeError("basis has " + std::to_string(descriptors_.size()) + " descriptors but " +
                     std::to_string(vectors_.rows()) + " vectors");
  }
  std::unordered_set<std::string> seen;
  for (const auto& d : descriptors_) {
    if (!seen.insert(fold_key(d)).second) {
      throw Error(ErrorKind::consistency, "duplicate descriptor '" + d + "' in basis",
                  {{"descriptor", d}});
    }
  }
  if (normalized_) {
    for (std::size_t r = 0; r < vectors_.rows(); ++r) {
      const double n = l2_norm(vectors_.row(r));
      // Zero rows are kept so descriptor/row alignment survives.
      if (n > kZeroNormEpsilon && std::abs(n - 1.0) > 1e-5) {
        throw Error(ErrorKind::invalid_value,
                    "basis row " + std::to_string(r) + " flagged normalized but has norm " +
                        std::to_string(n));
      }
    }
  }
  fingerprint_ = basis_fingerprint(criterion_, descriptors_, provider_id_);
}

TextBasis TextBasis::subset(const std::vector<std::size_t>& rows) const {
  std::vector<std::string> descriptors;
  descriptors.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= descriptors_.size()) throw ShapeError("basis row " + std::to_string(r) + " out of range");
    descriptors.push_back(descriptors_[r]);
  }
  return TextBasis(criterion_, std::move(descriptors),
                   vectors_.select_rows(rows).with_ids(index_ids(rows.size())), normalized_,
                   provider_id_);
}

LabeledDataset::LabeledDataset(EmbeddingMatrix embeddings,
                               std::map<std::string, std::vector<int>> labels,
                               std::map<std::string, std::vector<std::string>> class_names)
    : embeddings_(std::move(embeddings)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
  for (const auto& [name, column] : labels_) {
    auto names = class_names_.find(name);
    if (names == class_names_.end()) {
      throw Error(ErrorKind::consistency, "criterion '" + name + "' has labels but no classes",
                  {{"criterion", name}});
    }
    if (column.size() != embeddings_.rows()) {
      throw Error(ErrorKind::consistency,
                  "criterion '" + name + "' has " + std::to_string(column.size()) +
                      " labels for " + std::to_string(embeddings_.rows()) + " rows",
                  {{"criterion", name},
                   {"labels", static_cast<std::int64_t>(column.size())},
                   {"rows", static_cast<std::int64_t>(embeddings_.rows())}});
    }
    const auto k = static_cast<int>(names->second.size());
    for (std::size_t i = 0; i < column.size(); ++i) {
      if (column[i] < 0 || column[i] >= k) {
        throw Error(ErrorKind::consistency,
                    "criterion '" + name + "' label " + std::to_string(column[i]) + " at row " +
                        std::to_string(i) + " outside [0, " + std::to_string(k) + ")",
                    {{"criterion", name}, {"row", static_cast<std::int64_t>(i)}});
      }
    }
    class_counts_[name] = names->second.size();
  }
}

bool LabeledDataset::has_criterion(std::string_view name) const {
  return labels_.find(std::string(name)) != labels_.end();
}

const std::vector<int>& LabeledDataset::labels(std::string_view name) const {
  auto it = labels_.find(std::string(name));
  if (it == labels_.end()) {
    throw Error(ErrorKind::consistency, "missing label column for criterion '" + std::string(name) + "'",
                {{"criterion", std::string(name)}});
  }
  return it->second;
}

std::size_t LabeledDataset::class_count(std::string_view name) const {
  labels(name);
  return class_counts_.at(std::string(name));
}

const std::vector<std::string>& LabeledDataset::class_names(std::string_view name) const {
  labels(name);
  return class_names_.at(std::string(name));
}

std::vector<std::string> LabeledDataset::criteria() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : labels_) out.push_back(name);
  return out;
}

}  // namespace crl
