#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dietmine/corpus.hpp"

namespace dietmine::labeling {

enum class DayLabel : int { Below = 0, OnTarget = 1, Above = 2 };

const char* label_name(DayLabel l);

struct LabelPolicy {
    double below_margin = 0.2;
    bool symmetric = false;
    long min_day_kcal = 100;
    // tie priority over modal classes, first wins
    std::array<DayLabel, 3> tie_priority{DayLabel::Above, DayLabel::Below,
                                         DayLabel::OnTarget};
};

/// Labels one day; returns nullopt when the day is skipped (actual below
/// policy.min_day_kcal). Throws std::invalid_argument when goal <= 0.
/// Asymmetric mode: Above iff actual > goal, Below iff (goal - actual)/goal
/// strictly exceeds below_margin, otherwise OnTarget. Symmetric mode labels
/// Above only when (actual - goal)/goal strictly exceeds the margin.
std::optional<DayLabel> label_day(long goal, long actual, const LabelPolicy& policy);

struct LabeledDay {
    Date date;
    long goal = 0;
    long actual = 0;
    DayLabel label = DayLabel::OnTarget;
};

/// Non-skipped days of a diary, in date order.
std::vector<LabeledDay> label_days(const corpus::UserDiary& diary,
                                   const LabelPolicy& policy);

struct UserLabel {
    std::string user_id;
    DayLabel modal = DayLabel::OnTarget;
    std::array<std::size_t, 3> day_counts{}; // indexed by DayLabel value
    double modal_fraction = 0;
};

/// Modal label over non-skipped days; ties broken by policy.tie_priority.
/// Throws std::invalid_argument when no day is labelable.
UserLabel label_user(const corpus::UserDiary& diary, const LabelPolicy& policy);

/// Labels every user with at least one labelable day (others skipped).
std::vector<UserLabel> label_corpus(const corpus::Corpus& corpus,
                                    const LabelPolicy& policy);

struct WeekdayRow {
    int weekday = 0; // ISO: 1 = Monday .. 7 = Sunday
    std::size_t total = 0;
    std::array<std::size_t, 3> counts{};

    double percent(DayLabel l) const;
};

/// Per-weekday label distribution over all non-skipped days, Monday first.
std::array<WeekdayRow, 7> weekly_trend(const corpus::Corpus& corpus,
                                       const LabelPolicy& policy);

struct BucketRow {
    std::size_t bucket = 0;
    std::size_t users = 0;
    std::array<double, 3> fraction{}; // macro-averaged across users
};

/// Splits each user's labeled days chronologically into `bucket_count` ranges
/// (remainder days landing in the earliest buckets) and macro-averages the
/// per-bucket label distribution across users. Users with fewer labeled days
/// than bucket_count are skipped.
std::vector<BucketRow> lifetime_buckets(const corpus::Corpus& corpus,
                                        const LabelPolicy& policy,
                                        std::size_t bucket_count = 10);

struct ClassCounts {
    std::array<std::size_t, 3> counts{};
    std::vector<std::string> above_users; // sorted by id
    std::vector<std::string> below_users; // sorted by id
};

ClassCounts class_counts(const std::vector<UserLabel>& labels);

/// `user_id, date, weekday, goal, actual, label` lines for all labeled days.
void save_labeled_days(const corpus::Corpus& corpus, const LabelPolicy& policy,
                       const std::string& path);

void save_user_labels(const std::vector<UserLabel>& labels, const std::string& path);

std::vector<UserLabel> load_user_labels(const std::string& path);

} // namespace dietmine::labeling
