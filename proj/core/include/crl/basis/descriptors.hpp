#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace crl::basis {

/// Extracts the first bracketed list of double-quoted strings from raw LLM
/// output. Items are trimmed; empty items and case-fold duplicates are
/// dropped, first occurrence wins. Throws ParseError (with a 200-char
/// excerpt) when no such list exists.
std::vector<std::string> parse_descriptor_list(std::string_view raw);

/// Appends the items of `incoming` whose fold key is not yet in `into`.
/// Returns the number appended.
std::size_t merge_unique(std::vector<std::string>& into, const std::vector<std::string>& incoming);

}  // namespace crl::basis
