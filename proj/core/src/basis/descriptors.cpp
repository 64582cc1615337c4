#include "crl/basis/descriptors.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <optional>
#include <unordered_set>

#include "crl/core/error.hpp"
#include "crl/core/types.hpp"

namespace crl::basis {
namespace {

void skip_space(std::string_view s, std::size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

// Reads a JSON string literal starting at s[i] == '"'; advances i past it.
std::optional<std::string> read_string(std::string_view s, std::size_t& i) {
  const std::size_t start = i++;
  while (i < s.size()) {
    if (s[i] == '\\') {
      i += 2;
      continue;
    }
    if (s[i] == '"') {
      ++i;
      try {
        return nlohmann::json::parse(s.substr(start, i - start)).get<std::string>();
      } catch (const nlohmann::json::exception&) {
        return std::nullopt;
      }
    }
    if (s[i] == '\n') return std::nullopt;
    ++i;
  }
  return std::nullopt;
}

// Tries to read `[ "a", "b", ... ]` starting at s[i] == '['.
std::optional<std::vector<std::string>> read_list(std::string_view s, std::size_t i) {
  ++i;
  std::vector<std::string> items;
  skip_space(s, i);
  while (i < s.size()) {
    if (s[i] != '"') return std::nullopt;
    auto item = read_string(s, i);
    if (!item) return std::nullopt;
    items.push_back(std::move(*item));
    skip_space(s, i);
    if (i >= s.size()) return std::nullopt;
    if (s[i] == ']') return items;
    if (s[i] != ',') return std::nullopt;
    ++i;
    skip_space(s, i);
    // Tolerate a trailing comma.
    if (i < s.size() && s[i] == ']') return items;
  }
  return std::nullopt;
}

}  // namespace

std::size_t merge_unique(std::vector<std::string>& into, const std::vector<std::string>& incoming) {
  std::unordered_set<std::string> seen;
  for (const auto& d : into) seen.insert(fold_key(d));
  std::size_t added = 0;
  for (const auto& raw : incoming) {
    std::string key = fold_key(raw);
    if (key.empty() || !seen.insert(key).second) continue;
    // fold_key also trims; keep the original casing of the trimmed item.
    const auto first = raw.find_first_not_of(" \t\r\n\f\v");
    const auto last = raw.find_last_not_of(" \t\r\n\f\v");
    into.push_back(raw.substr(first, last - first + 1));
    ++added;
  }
  return added;
}

std::vector<std::string> parse_descriptor_list(std::string_view raw) {
  for (std::size_t pos = raw.find('['); pos != std::string_view::npos; pos = raw.find('[', pos + 1)) {
    if (auto items = read_list(raw, pos); items && !items->empty()) {
      std::vector<std::string> out;
      merge_unique(out, *items);
      if (!out.empty()) return out;
    }
  }
  throw ParseError("no bracketed list of quoted strings found in LLM response",
                   std::string(raw.substr(0, 200)));
}

}  // namespace crl::basis
