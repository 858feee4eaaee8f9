#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace toolseek {

// Shared text normalization for indexing, lexicon lookup and query parsing:
// lowercase, fold Latin diacritics to base letters, split on anything that is
// not a letter or digit. Deterministic and locale-independent.
std::vector<std::string> normalize_tokens(std::string_view text);

// Tokens joined with single spaces; the lexicon key form of a surface.
std::string normalize_key(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens, std::string_view sep = " ");

std::string ascii_lower(std::string_view text);

}  // namespace toolseek
