#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dietmine/corpus.hpp"
#include "dietmine/taxonomy.hpp"

namespace dietmine::features {

enum class Space { token, category };

std::string space_name(Space s);
Space parse_space(const std::string& name);

struct FeatureVocabulary {
    Space space = Space::token;
    std::vector<std::string> names;            // feature id -> name, lexicographic
    std::vector<std::size_t> support;          // feature id -> distinct-user support
    std::map<std::string, std::uint32_t> ids;  // name -> feature id

    std::size_t size() const { return names.size(); }
};

struct FeatureVector {
    std::string user_id;
    Space space = Space::token;
    std::map<std::uint32_t, double> values; // feature id -> distinct-day count
    bool normalized = false;
};

/// Diary tokens: split on non-word characters, lowercase, drop tokens shorter
/// than 3 characters or containing a non-letter (wraps text::tokenize).
std::vector<std::string> tokenize(const std::string& text);

/// Per-entry feature names for a space: tokens, or annotation path strings.
/// Category space requires `ann` (the entry's annotation, may be null).
std::vector<std::string> entry_features(const corpus::FoodEntry& entry, Space space,
                                        const taxonomy::Annotation* ann);

/// Retains every feature strictly more than `support_threshold` distinct
/// users used at least once, over all days of all users (no day or user
/// eligibility filters). Feature ids follow lexicographic name order.
FeatureVocabulary build_vocabulary(const corpus::Corpus& corpus, Space space,
                                   std::size_t support_threshold,
                                   const taxonomy::AnnotationIndex* index = nullptr,
                                   unsigned jobs = 1);

/// Distinct-day counts over qualifying days (actual >= min_day_kcal) for
/// in-vocabulary features of one user.
FeatureVector featurize(const corpus::UserDiary& diary, const FeatureVocabulary& vocab,
                        const taxonomy::AnnotationIndex* index, long min_day_kcal = 100);

std::vector<FeatureVector> featurize_corpus(const corpus::Corpus& corpus,
                                            const FeatureVocabulary& vocab,
                                            const taxonomy::AnnotationIndex* index,
                                            long min_day_kcal = 100, unsigned jobs = 1);

/// Scales values to unit Euclidean norm; an empty vector is returned
/// unchanged apart from the normalized flag.
FeatureVector normalize(FeatureVector v);

/// Users with at least `min_days` days that have actual >= min_day_kcal and
/// at least one in-vocabulary feature. Sorted by user id.
std::vector<std::string> eligible_users(const corpus::Corpus& corpus,
                                        const FeatureVocabulary& vocab,
                                        const taxonomy::AnnotationIndex* index,
                                        std::size_t min_days = 30,
                                        long min_day_kcal = 100);

/// Tab-separated `feature_name, support_count, feature_id` lines.
void save_vocabulary(const FeatureVocabulary& vocab, const std::string& path);
FeatureVocabulary load_vocabulary(const std::string& path, Space space);

/// One user per line: user_id then `feature_id:value` pairs sorted by id.
void save_vectors(const std::vector<FeatureVector>& vectors, const std::string& path);

} // namespace dietmine::features
