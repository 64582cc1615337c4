#include "crl/basis/prompts.hpp"

#include <array>
#include <charconv>

#include "crl/core/error.hpp"

namespace crl::basis {
namespace {

constexpr std::string_view kFormatInstructions =
    "formatted as: [\"...\", \"...\", \"...\"]. Ensure all items are unique and written in a "
    "single line, without any nested lists or additional formatting. You may describe the same "
    "{criterion} in different ways, such as {synonym_examples}. Only generate the list, and do "
    "not include any additional information.";

constexpr std::array<std::string_view, 5> kVariantQuestions = {
    "Generate common expressions to describe the {criterion}.",
    "List a wide variety of typical phrases used to characterize the {criterion}.",
    "Enumerate familiar terms or expressions people often use when referring to the {criterion}.",
    "Identify and list expressions frequently used to convey the concept of the {criterion}.",
    "How do people usually talk about the {criterion}?",
};

std::string quote_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += items.size() > 2 ? ", " : " ";
    if (i + 1 == items.size() && items.size() > 1) out += "or ";
    out += '"' + items[i] + '"';
  }
  return out;
}

// Removes the sentence that contains `placeholder`.
std::string drop_sentence_with(std::string text, std::string_view placeholder) {
  const auto pos = text.find(placeholder);
  if (pos == std::string::npos) return text;
  const auto prev = text.rfind(". ", pos);
  const std::size_t begin = prev == std::string::npos ? 0 : prev + 2;
  auto next = text.find(". ", pos);
  const std::size_t end = next == std::string::npos ? text.size() : next + 2;
  text.erase(begin, end - begin);
  return text;
}

}  // namespace

std::string replace_all(std::string text, std::string_view key, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
  return text;
}

LlmPromptTemplate LlmPromptTemplate::standard() {
  return {"default",
          "Please generate common expressions to describe the {criterion}, as many as possible, " +
              std::string(kFormatInstructions),
          std::nullopt};
}

LlmPromptTemplate LlmPromptTemplate::fixed(std::size_t count) {
  return {"fixed-" + std::to_string(count),
          "Please generate {count} expressions to describe the {criterion}, " +
              std::string(kFormatInstructions),
          count};
}

LlmPromptTemplate LlmPromptTemplate::variant(int index) {
  if (index < 1 || index > static_cast<int>(kVariantQuestions.size())) {
    throw Error(ErrorKind::config, "prompt variant must be in [1, 5], got " + std::to_string(index));
  }
  return {"variant-" + std::to_string(index),
          std::string(kVariantQuestions[static_cast<std::size_t>(index - 1)]) +
              " Answer with a list " + std::string(kFormatInstructions),
          std::nullopt};
}

LlmPromptTemplate LlmPromptTemplate::by_id(std::string_view id) {
  auto parse_suffix = [&](std::string_view prefix) -> std::optional<long> {
    if (id.substr(0, prefix.size()) != prefix) return std::nullopt;
    long value = 0;
    auto rest = id.substr(prefix.size());
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
    if (ec != std::errc{} || ptr != rest.data() + rest.size()) return std::nullopt;
    return value;
  };
  if (id == "default") return standard();
  if (auto n = parse_suffix("fixed-"); n && *n >= 1) return fixed(static_cast<std::size_t>(*n));
  if (auto n = parse_suffix("variant-")) return variant(static_cast<int>(*n));
  throw Error(ErrorKind::config, "unknown LLM prompt template '" + std::string(id) + "'");
}

void LlmPromptTemplate::validate() const {
  if (body.find("{criterion}") == std::string::npos) {
    throw Error(ErrorKind::config, "LLM prompt template '" + template_id + "' lacks {criterion}");
  }
  if (fixed_count && *fixed_count < 1) {
    throw Error(ErrorKind::config, "fixed descriptor count must be at least 1");
  }
}

void VlmPromptTemplate::validate() const {
  for (std::string_view key : {"{subject}", "{criterion}", "{descriptor}"}) {
    if (body.find(key) == std::string::npos) {
      throw Error(ErrorKind::config, "VLM prompt template lacks " + std::string(key));
    }
  }
}

std::vector<std::string> default_synonym_examples(std::string_view criterion) {
  if (criterion == "color") return {"red", "crimson", "scarlet"};
  if (criterion == "scene") {
    return {"a cozy living room", "a snug lounge", "a warm and inviting sitting area"};
  }
  if (criterion == "texture") return {"baroque", "ornate", "luxurious"};
  return {};
}

std::string render_llm_prompt(const Criterion& criterion, const LlmPromptTemplate& tmpl) {
  criterion.validate();
  tmpl.validate();
  auto synonyms = criterion.synonym_examples.empty() ? default_synonym_examples(criterion.name)
                                                     : criterion.synonym_examples;
  std::string text = tmpl.body;
  if (synonyms.empty()) {
    text = drop_sentence_with(std::move(text), "{synonym_examples}");
  } else {
    text = replace_all(std::move(text), "{synonym_examples}", quote_list(synonyms));
  }
  if (tmpl.fixed_count) text = replace_all(std::move(text), "{count}", std::to_string(*tmpl.fixed_count));
  return replace_all(std::move(text), "{criterion}", criterion.name);
}

std::vector<std::string> render_vlm_prompts(const Criterion& criterion,
                                            const std::vector<std::string>& descriptors,
                                            const VlmPromptTemplate& tmpl) {
  criterion.validate();
  tmpl.validate();
  if (descriptors.empty()) throw Error(ErrorKind::invalid_value, "no descriptors to render");
  const std::string head = replace_all(replace_all(tmpl.body, "{subject}", criterion.subject_noun),
                                       "{criterion}", criterion.name);
  std::vector<std::string> prompts;
  prompts.reserve(descriptors.size());
  for (const auto& d : descriptors) prompts.push_back(replace_all(head, "{descriptor}", d));
  return prompts;
}

}  // namespace crl::basis
