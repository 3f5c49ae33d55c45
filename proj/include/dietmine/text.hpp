#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dietmine::text {

/// Splits on non-word characters ([^A-Za-z0-9_]) and lowercases. Every
/// resulting token is non-empty; nothing else is filtered here.
std::vector<std::string> split_words(std::string_view s);

bool all_alpha(std::string_view s);

/// Diary-token rules: split on non-word characters, lowercase, keep only
/// tokens of length >= 3 made of a-z exclusively.
std::vector<std::string> tokenize(std::string_view s);

/// Rule-based English singularizer. Lowercase input expected; tokens of
/// length <= 3 are returned unchanged. The suffix rules are applied until a
/// fixed point so the map is idempotent.
std::string lemmatize(std::string_view token);

/// Trims and collapses internal whitespace runs to single spaces.
std::string normalize_ws(std::string_view s);

} // namespace dietmine::text
