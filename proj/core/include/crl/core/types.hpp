#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crl/core/matrix.hpp"

namespace crl {

/// A user-specified semantic axis such as "color" or "scene".
struct Criterion {
  std::string name;
  /// Subject of the text-encoder prompt ("Objects", "A photo", ...).
  std::string subject_noun = "Objects";
  std::optional<std::string> notes;
  /// Synonym hint shown to the LLM; empty means "use built-in defaults, if any".
  std::vector<std::string> synonym_examples;

  void validate() const;
};

Criterion make_criterion(std::string name, std::string subject_noun = "Objects");

/// Trimmed, ASCII case-folded form used for descriptor identity.
std::string fold_key(std::string_view text);

/// Ordered descriptors and their encoded vectors; row i encodes descriptor i.
class TextBasis {
public:
  TextBasis(Criterion criterion, std::vector<std::string> descriptors, EmbeddingMatrix vectors,
            bool normalized, std::string provider_id);

  const Criterion& criterion() const noexcept { return criterion_; }
  const std::vector<std::string>& descriptors() const noexcept { return descriptors_; }
  const EmbeddingMatrix& vectors() const noexcept { return vectors_; }
  bool normalized() const noexcept { return normalized_; }
  const std::string& provider_id() const noexcept { return provider_id_; }
  /// Content hash over criterion, descriptors and provider id.
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  std::size_t size() const noexcept { return descriptors_.size(); }

  /// Basis made of the given rows, in order.
  TextBasis subset(const std::vector<std::size_t>& rows) const;

private:
  Criterion criterion_;
  std::vector<std::string> descriptors_;
  EmbeddingMatrix vectors_;
  bool normalized_;
  std::string provider_id_;
  std::string fingerprint_;
};

std::string basis_fingerprint(const Criterion& criterion,
                              const std::vector<std::string>& descriptors,
                              std::string_view provider_id);

/// Images re-expressed as similarities to a basis: R = I T^T.
struct ConditionalRepresentation {
  EmbeddingMatrix matrix;
  std::string basis_fingerprint;
  std::string criterion_name;
};

/// Embeddings joined with per-criterion ground-truth label columns.
class LabeledDataset {
public:
  LabeledDataset(EmbeddingMatrix embeddings, std::map<std::string, std::vector<int>> labels,
                 std::map<std::string, std::vector<std::string>> class_names);

  const EmbeddingMatrix& embeddings() const noexcept { return embeddings_; }
  bool has_criterion(std::string_view name) const;
  /// Throws ConsistencyError naming the criterion when the column is absent.
  const std::vector<int>& labels(std::string_view name) const;
  std::size_t class_count(std::string_view name) const;
  const std::vector<std::string>& class_names(std::string_view name) const;
  std::vector<std::string> criteria() const;
  const std::map<std::string, std::size_t>& class_counts() const noexcept { return class_counts_; }
  const std::map<std::string, std::vector<int>>& label_columns() const noexcept { return labels_; }

private:
  EmbeddingMatrix embeddings_;
  std::map<std::string, std::vector<int>> labels_;
  std::map<std::string, std::vector<std::string>> class_names_;
  std::map<std::string, std::size_t> class_counts_;
};

}  // namespace crl
