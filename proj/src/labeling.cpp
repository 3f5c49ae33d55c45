#include "dietmine/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "dietmine/io.hpp"

namespace dietmine::labeling {

const char* label_name(DayLabel l) {
    switch (l) {
        case DayLabel::Below: return "below";
        case DayLabel::OnTarget: return "on-target";
        case DayLabel::Above: return "above";
    }
    return "?";
}

std::optional<DayLabel> label_day(long goal, long actual, const LabelPolicy& policy) {
    if (goal <= 0) throw std::invalid_argument("goal must be positive");
    if (actual < policy.min_day_kcal) return std::nullopt;
    double g = static_cast<double>(goal);
    if (policy.symmetric) {
        if ((static_cast<double>(actual) - g) / g > policy.below_margin)
            return DayLabel::Above;
    } else {
        if (actual > goal) return DayLabel::Above;
    }
    if ((g - static_cast<double>(actual)) / g > policy.below_margin)
        return DayLabel::Below;
    return DayLabel::OnTarget;
}

std::vector<LabeledDay> label_days(const corpus::UserDiary& diary,
                                   const LabelPolicy& policy) {
    std::vector<LabeledDay> out;
    out.reserve(diary.days.size());
    for (const auto& day : diary.days) {
        auto label = label_day(day.goal, day.actual, policy);
        if (!label) continue;
        out.push_back({day.date, day.goal, day.actual, *label});
    }
    return out;
}

UserLabel label_user(const corpus::UserDiary& diary, const LabelPolicy& policy) {
    UserLabel ul;
    ul.user_id = diary.user_id;
    auto days = label_days(diary, policy);
    if (days.empty())
        throw std::invalid_argument("user " + diary.user_id + " has no labelable day");
    for (const auto& d : days) ++ul.day_counts[static_cast<int>(d.label)];
    std::size_t best = *std::max_element(ul.day_counts.begin(), ul.day_counts.end());
    for (DayLabel l : policy.tie_priority)
        if (ul.day_counts[static_cast<int>(l)] == best) {
            ul.modal = l;
            break;
        }
    ul.modal_fraction = static_cast<double>(best) / static_cast<double>(days.size());
    return ul;
}

std::vector<UserLabel> label_corpus(const corpus::Corpus& corpus,
                                    const LabelPolicy& policy) {
    std::vector<UserLabel> out;
    out.reserve(corpus.size());
    for (const auto& diary : corpus) {
        bool any = false;
        for (const auto& day : diary.days)
            if (label_day(day.goal, day.actual, policy)) {
                any = true;
                break;
            }
        if (any) out.push_back(label_user(diary, policy));
    }
    return out;
}

double WeekdayRow::percent(DayLabel l) const {
    if (total == 0) return 0;
    return 100.0 * static_cast<double>(counts[static_cast<int>(l)]) /
           static_cast<double>(total);
}

std::array<WeekdayRow, 7> weekly_trend(const corpus::Corpus& corpus,
                                       const LabelPolicy& policy) {
    std::array<WeekdayRow, 7> rows{};
    for (int i = 0; i < 7; ++i) rows[i].weekday = i + 1;
    for (const auto& diary : corpus)
        for (const auto& d : label_days(diary, policy)) {
            auto& row = rows[d.date.weekday_iso() - 1];
            ++row.total;
            ++row.counts[static_cast<int>(d.label)];
        }
    return rows;
}

std::vector<BucketRow> lifetime_buckets(const corpus::Corpus& corpus,
                                        const LabelPolicy& policy,
                                        std::size_t bucket_count) {
    if (bucket_count == 0) throw std::invalid_argument("bucket_count must be positive");
    std::vector<BucketRow> rows(bucket_count);
    for (std::size_t b = 0; b < bucket_count; ++b) rows[b].bucket = b;

    for (const auto& diary : corpus) {
        auto days = label_days(diary, policy);
        std::size_t n = days.size();
        if (n < bucket_count) continue;
        std::size_t base = n / bucket_count;
        std::size_t rem = n % bucket_count;
        std::size_t pos = 0;
        for (std::size_t b = 0; b < bucket_count; ++b) {
            std::size_t len = base + (b < rem ? 1 : 0);
            std::array<std::size_t, 3> counts{};
            for (std::size_t i = 0; i < len; ++i)
                ++counts[static_cast<int>(days[pos + i].label)];
            pos += len;
            auto& row = rows[b];
            ++row.users;
            for (int c = 0; c < 3; ++c)
                row.fraction[c] += static_cast<double>(counts[c]) / static_cast<double>(len);
        }
    }
    for (auto& row : rows)
        if (row.users > 0)
            for (auto& f : row.fraction) f /= static_cast<double>(row.users);
    return rows;
}

ClassCounts class_counts(const std::vector<UserLabel>& labels) {
    ClassCounts cc;
    for (const auto& ul : labels) {
        ++cc.counts[static_cast<int>(ul.modal)];
        if (ul.modal == DayLabel::Above) cc.above_users.push_back(ul.user_id);
        if (ul.modal == DayLabel::Below) cc.below_users.push_back(ul.user_id);
    }
    std::sort(cc.above_users.begin(), cc.above_users.end());
    std::sort(cc.below_users.begin(), cc.below_users.end());
    return cc;
}

void save_labeled_days(const corpus::Corpus& corpus, const LabelPolicy& policy,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "user_id\tdate\tweekday\tgoal\tactual\tlabel\n";
    for (const auto& diary : corpus)
        for (const auto& d : label_days(diary, policy))
            out << diary.user_id << '\t' << d.date.str() << '\t' << d.date.weekday_iso()
                << '\t' << d.goal << '\t' << d.actual << '\t' << label_name(d.label)
                << '\n';
    if (!out) throw std::runtime_error(path + ": write failed");
}

void save_user_labels(const std::vector<UserLabel>& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "user_id\tmodal\tbelow_days\tontarget_days\tabove_days\tmodal_fraction\n";
    for (const auto& ul : labels)
        out << ul.user_id << '\t' << label_name(ul.modal) << '\t' << ul.day_counts[0]
            << '\t' << ul.day_counts[1] << '\t' << ul.day_counts[2] << '\t'
            << io::fmt_double(ul.modal_fraction) << '\n';
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<UserLabel> load_user_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::vector<UserLabel> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.rfind("user_id\t", 0) == 0) continue;
        auto fields = io::split_tsv(line);
        if (fields.size() != 6)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 6 fields");
        UserLabel ul;
        ul.user_id = fields[0];
        if (fields[1] == "below") ul.modal = DayLabel::Below;
        else if (fields[1] == "on-target") ul.modal = DayLabel::OnTarget;
        else if (fields[1] == "above") ul.modal = DayLabel::Above;
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown label '" + fields[1] + "'");
        for (int c = 0; c < 3; ++c) ul.day_counts[c] = std::stoul(fields[2 + c]);
        ul.modal_fraction = std::stod(fields[5]);
        out.push_back(std::move(ul));
    }
    return out;
}

} // namespace dietmine::labeling
