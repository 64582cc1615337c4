#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crl/core/types.hpp"

namespace crl::basis {

/// Prompt asking an LLM for criterion descriptors.
///
/// Placeholders: `{criterion}` (required), `{synonym_examples}` (optional;
/// the sentence holding it is dropped when no examples are known) and
/// `{count}` (fixed-count mode only).
struct LlmPromptTemplate {
  std::string template_id = "default";
  std::string body;
  /// Empty means open-ended ("as many as possible").
  std::optional<std::size_t> fixed_count;

  static LlmPromptTemplate standard();
  static LlmPromptTemplate fixed(std::size_t count);
  /// Alternative phrasings used for prompt ablations, index in [1, 5].
  static LlmPromptTemplate variant(int index);
  /// "default", "fixed-<n>" or "variant-<i>".
  static LlmPromptTemplate by_id(std::string_view id);

  void validate() const;
};

/// Prompt fed to the text encoder for each descriptor.
struct VlmPromptTemplate {
  std::string body = "{subject} with the {criterion} of {descriptor}.";

  static VlmPromptTemplate standard() { return {}; }
  /// "... with a {criterion} of ..." phrasing.
  static VlmPromptTemplate indefinite() {
    return {"{subject} with a {criterion} of {descriptor}."};
  }

  void validate() const;
};

/// Synonym hint for well-known criteria; empty for anything else.
std::vector<std::string> default_synonym_examples(std::string_view criterion);

std::string render_llm_prompt(const Criterion& criterion, const LlmPromptTemplate& tmpl);

std::vector<std::string> render_vlm_prompts(const Criterion& criterion,
                                            const std::vector<std::string>& descriptors,
                                            const VlmPromptTemplate& tmpl = {});

/// Replaces every `{key}` occurrence.
std::string replace_all(std::string text, std::string_view key, std::string_view value);

}  // namespace crl::basis
