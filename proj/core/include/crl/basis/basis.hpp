#pragma once

#include <string>
#include <vector>

#include "crl/basis/prompts.hpp"
#include "crl/core/types.hpp"
#include "crl/providers/embed_client.hpp"

namespace crl::basis {

/// Renders one text-encoder prompt per descriptor, encodes them and
/// L2-normalizes the rows. Row i of the result encodes descriptors[i].
///
/// Throws ProviderContract when the embedder returns the wrong row count and
/// ConsistencyError on duplicate descriptors.
TextBasis build_basis(const Criterion& criterion, const std::vector<std::string>& descriptors,
                      providers::TextEmbedder& embedder, const VlmPromptTemplate& tmpl = {});

}  // namespace crl::basis
