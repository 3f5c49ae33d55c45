#include "dietmine/text.hpp"

#include <array>
#include <cctype>
#include <unordered_map>

namespace dietmine::text {

namespace {

inline bool word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
}

inline char lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : char(c);
}

bool ends_with(std::string_view s, std::string_view suf) {
    return s.size() >= suf.size() &&
           s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

// Irregular forms the suffix rules cannot reach: irregular plurals plus the
// cooking participles that show up constantly in diary entries (so that
// "grilled" folds onto the entity "grill", etc.). Targets are fixed points
// of lemmatize.
const std::unordered_map<std::string_view, std::string_view>& irregulars() {
    static const std::unordered_map<std::string_view, std::string_view> map = {
        {"leaves", "leaf"},     {"loaves", "loaf"},    {"halves", "half"},
        {"knives", "knife"},    {"tomatoes", "tomato"}, {"potatoes", "potato"},
        {"mangoes", "mango"},   {"pies", "pie"},        {"ties", "tie"},
        {"feet", "foot"},       {"teeth", "tooth"},     {"geese", "goose"},
        {"children", "child"},  {"people", "person"},
        {"grilled", "grill"},   {"fried", "fry"},       {"baked", "bake"},
        {"roasted", "roast"},   {"steamed", "steam"},   {"boiled", "boil"},
        {"scrambled", "scramble"}, {"toasted", "toast"}, {"smoked", "smoke"},
        {"mashed", "mash"},     {"poached", "poach"},   {"grated", "grate"},
    };
    return map;
}

// One pass of the singularization rules; returns the input unchanged when no
// rule applies.
std::string lemma_step(std::string_view t) {
    if (t.size() <= 3) return std::string(t);
    if (auto it = irregulars().find(t); it != irregulars().end())
        return std::string(it->second);
    if (ends_with(t, "ies")) return std::string(t.substr(0, t.size() - 3)) + "y";
    if (ends_with(t, "sses")) return std::string(t.substr(0, t.size() - 2));
    if (ends_with(t, "es")) {
        std::string_view stem = t.substr(0, t.size() - 2);
        if (ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") ||
            ends_with(stem, "ch") || ends_with(stem, "sh"))
            return std::string(stem);
    }
    if (ends_with(t, "s") && !ends_with(t, "ss") && !ends_with(t, "us") &&
        !ends_with(t, "is"))
        return std::string(t.substr(0, t.size() - 1));
    return std::string(t);
}

} // namespace

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (word_char(c)) {
            cur.push_back(lower(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool all_alpha(std::string_view s) {
    for (unsigned char c : s)
        if (c < 'a' || c > 'z') return false;
    return !s.empty();
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    for (auto& w : split_words(s))
        if (w.size() >= 3 && all_alpha(w)) out.push_back(std::move(w));
    return out;
}

std::string lemmatize(std::string_view token) {
    std::string cur(token);
    for (;;) {
        std::string next = lemma_step(cur);
        if (next == cur) return cur;
        cur = std::move(next);
    }
}

std::string normalize_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true; // leading whitespace dropped
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            in_space = false;
            out.push_back(char(c));
        }
    }
    return out;
}

} // namespace dietmine::text
