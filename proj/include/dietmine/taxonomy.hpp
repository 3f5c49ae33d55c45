#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dietmine/corpus.hpp"

namespace dietmine::taxonomy {

/// One node path: main category, optional subcategory, optional entity.
struct CategoryPath {
    std::string main;
    std::string sub;    // empty when the path stops at the main level
    std::string entity; // empty for pure category paths

    auto operator<=>(const CategoryPath&) const = default;
};

/// Non-empty levels joined with ':', e.g. "Meats:Poultry:Chicken".
std::string path_str(const CategoryPath& p);

using Annotation = std::set<CategoryPath>;

struct Entity {
    std::string main;
    std::string sub; // may be empty (entity sits directly under main)
    std::string name;
    std::vector<std::string> lemmas; // pre-lemmatized name tokens
};

struct Taxonomy {
    std::vector<Entity> entities;
    std::size_t main_count = 0;
    std::size_t sub_count = 0;

    // first lemma of an entity name -> entity indices, for matching
    std::unordered_map<std::string, std::vector<std::uint32_t>> first_lemma;
};

struct TaxonomyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Loads `main<TAB>sub<TAB>entity` lines; sub/entity may be empty to declare
/// bare categories, `#` starts a comment. A `# counts: M S E` comment, when
/// present, is validated against the loaded main/sub/entity totals. Throws
/// TaxonomyError on duplicate entities under one subcategory, rows whose main
/// category is missing, or count mismatches.
Taxonomy load_taxonomy(const std::string& path);

/// Lemma token sequence of a text for matching: alphabetic tokens are
/// lemmatized, tokens containing digits become unmatchable boundary markers.
std::vector<std::string> match_tokens(const std::string& text);

/// Matches every entity whose lemma sequence occurs contiguously in the
/// text's lemma sequence; within each main category, matches whose span is
/// strictly contained in another match's span are suppressed. Surviving
/// entities contribute their full path plus all ancestor paths.
Annotation annotate(const std::string& text, const Taxonomy& tax);

/// Fraction of unique entry texts (after whitespace normalization) with a
/// non-empty annotation. Empty corpus yields 0.
double coverage_report(const corpus::Corpus& corpus, const Taxonomy& tax);

/// Annotations for every distinct normalized entry text in a corpus.
struct AnnotationIndex {
    std::unordered_map<std::string, Annotation> by_text; // key: normalized text

    const Annotation* find(const std::string& raw_text) const;
};

AnnotationIndex annotate_corpus(const corpus::Corpus& corpus, const Taxonomy& tax,
                                unsigned jobs = 1);

} // namespace dietmine::taxonomy
