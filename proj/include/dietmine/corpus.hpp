#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dietmine/date.hpp"

namespace dietmine::corpus {

/// One logged food item.
struct FoodEntry {
    std::string user_id;
    Date date;
    std::string meal_name;
    std::string text;    // raw description, non-empty after trim
    long calories = 0;   // kcal, >= 0
};

/// All entries of one user on one date. `actual` is always the entry sum.
struct DayRecord {
    std::string user_id;
    Date date;
    std::vector<FoodEntry> entries;
    long goal = 0;   // kcal, > 0
    long actual = 0; // kcal, == sum of entry calories
};

/// Per-user diary, days strictly ascending by date.
struct UserDiary {
    std::string user_id;
    std::vector<DayRecord> days;
};

using Corpus = std::vector<UserDiary>;

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Loads a tab-separated diary file (see save_corpus for the format). Records
/// are grouped by user and date; users sorted by id, days ascending. Throws
/// CorpusError with the offending line number on malformed input, duplicate
/// (user, date, meal, text) tuples, negative calories, or conflicting goals
/// declared for the same day.
Corpus load_corpus(const std::string& path);

/// Writes the canonical record file: a `user_id<TAB>date<TAB>meal_name<TAB>
/// entry_text<TAB>calories<TAB>goal_kcal` header line, then one entry per
/// line. Loading the result reproduces the corpus structure exactly.
void save_corpus(const Corpus& corpus, const std::string& path);

struct CorpusStats {
    std::size_t users = 0;
    std::size_t total_days = 0;
    std::size_t median_days_per_user = 0; // lower median
    std::size_t total_entries = 0;
};

CorpusStats corpus_stats(const Corpus& corpus);

const UserDiary* find_user(const Corpus& corpus, const std::string& user_id);

} // namespace dietmine::corpus
