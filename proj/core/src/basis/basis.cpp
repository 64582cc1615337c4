#include "crl/basis/basis.hpp"

#include <unordered_set>

#include "crl/core/error.hpp"
#include "crl/core/linalg.hpp"

namespace crl::basis {

TextBasis build_basis(const Criterion& criterion, const std::vector<std::string>& descriptors,
                      providers::TextEmbedder& embedder, const VlmPromptTemplate& tmpl) {
  std::unordered_set<std::string> seen;
  for (const auto& d : descriptors) {
    if (!seen.insert(fold_key(d)).second) {
      throw Error(ErrorKind::consistency, "duplicate descriptor '" + d + "'", {{"descriptor", d}});
    }
  }
  const auto prompts = render_vlm_prompts(criterion, descriptors, tmpl);
  const EmbeddingMatrix raw = embedder.embed(prompts);
  if (raw.rows() != prompts.size()) {
    throw Error(ErrorKind::provider_contract,
                "embedder returned " + std::to_string(raw.rows()) + " rows for " +
                    std::to_string(prompts.size()) + " prompts",
                {{"expected", static_cast<std::int64_t>(prompts.size())},
                 {"received", static_cast<std::int64_t>(raw.rows())}});
  }
  auto normalized = l2_normalize_rows(raw);
  return TextBasis(criterion, descriptors, std::move(normalized.matrix), true, embedder.provider_id());
}

}  // namespace crl::basis
