#include "dietmine/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dietmine/io.hpp"

namespace dietmine::corpus {

namespace {

const char* kHeader = "user_id\tdate\tmeal_name\tentry_text\tcalories\tgoal_kcal";

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
    throw CorpusError(path + ":" + std::to_string(line) + ": " + what);
}

long parse_long(const std::string& s, const std::string& path, std::size_t line,
                const char* field) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(path, line, std::string("bad ") + field + " value '" + s + "'");
    return v;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError(path + ": cannot open");

    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;

    // user -> date -> day, assembled before the sorted flatten
    std::map<std::string, std::map<Date, DayRecord>> acc;
    std::set<std::tuple<std::string, Date, std::string, std::string>> seen;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        if (!saw_header) {
            if (line != kHeader)
                fail(path, lineno, "expected header '" + std::string(kHeader) + "'");
            saw_header = true;
            continue;
        }
        auto fields = io::split_tsv(line);
        if (fields.size() != 6)
            fail(path, lineno, "expected 6 tab-separated fields, got " +
                                   std::to_string(fields.size()));
        FoodEntry e;
        e.user_id = trim(fields[0]);
        if (e.user_id.empty()) fail(path, lineno, "empty user_id");
        try {
            e.date = Date::parse(trim(fields[1]));
        } catch (const std::exception& ex) {
            fail(path, lineno, ex.what());
        }
        e.meal_name = trim(fields[2]);
        if (e.meal_name.empty()) fail(path, lineno, "empty meal_name");
        e.text = trim(fields[3]);
        if (e.text.empty()) fail(path, lineno, "empty entry_text");
        e.calories = parse_long(trim(fields[4]), path, lineno, "calories");
        if (e.calories < 0) fail(path, lineno, "negative calories");
        long goal = parse_long(trim(fields[5]), path, lineno, "goal_kcal");
        if (goal <= 0) fail(path, lineno, "goal_kcal must be positive");

        auto key = std::make_tuple(e.user_id, e.date, e.meal_name, e.text);
        if (!seen.insert(key).second)
            fail(path, lineno, "duplicate entry (same user, date, meal, text)");

        auto& day = acc[e.user_id][e.date];
        if (day.entries.empty()) {
            day.user_id = e.user_id;
            day.date = e.date;
            day.goal = goal;
        } else if (day.goal != goal) {
            fail(path, lineno, "conflicting goal_kcal for " + e.user_id + " on " +
                                   e.date.str() + " (" + std::to_string(day.goal) +
                                   " vs " + std::to_string(goal) + ")");
        }
        day.actual += e.calories;
        day.entries.push_back(std::move(e));
    }
    if (!saw_header) fail(path, lineno, "missing header line");

    Corpus corpus;
    corpus.reserve(acc.size());
    for (auto& [uid, days] : acc) {
        UserDiary diary;
        diary.user_id = uid;
        diary.days.reserve(days.size());
        for (auto& [date, day] : days) diary.days.push_back(std::move(day));
        corpus.push_back(std::move(diary));
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CorpusError(path + ": cannot open for writing");
    out << kHeader << '\n';
    for (const auto& diary : corpus)
        for (const auto& day : diary.days)
            for (const auto& e : day.entries)
                out << e.user_id << '\t' << e.date.str() << '\t' << e.meal_name
                    << '\t' << e.text << '\t' << e.calories << '\t' << day.goal
                    << '\n';
    if (!out) throw CorpusError(path + ": write failed");
}

CorpusStats corpus_stats(const Corpus& corpus) {
    CorpusStats st;
    st.users = corpus.size();
    std::vector<std::size_t> per_user;
    per_user.reserve(corpus.size());
    for (const auto& diary : corpus) {
        per_user.push_back(diary.days.size());
        st.total_days += diary.days.size();
        for (const auto& day : diary.days) st.total_entries += day.entries.size();
    }
    if (!per_user.empty()) {
        std::sort(per_user.begin(), per_user.end());
        st.median_days_per_user = per_user[(per_user.size() - 1) / 2];
    }
    return st;
}

const UserDiary* find_user(const Corpus& corpus, const std::string& user_id) {
    auto it = std::lower_bound(
        corpus.begin(), corpus.end(), user_id,
        [](const UserDiary& d, const std::string& id) { return d.user_id < id; });
    if (it != corpus.end() && it->user_id == user_id) return &*it;
    return nullptr;
}

} // namespace dietmine::corpus
