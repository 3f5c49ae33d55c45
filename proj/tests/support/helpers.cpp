#include "helpers.hpp"

#include <cstdlib>
#include <filesystem>
#include <map>
#include <stdexcept>

#include "dietmine/text.hpp"

namespace testsupport {

namespace fs = std::filesystem;

std::string data_dir() {
    const char* env = std::getenv("DIETMINE_DATA");
    if (!env || !*env) throw std::runtime_error("DIETMINE_DATA is not set");
    return env;
}

TempDir::TempDir() {
    auto tmpl = (fs::temp_directory_path() / "dietmine-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string TempDir::file(const std::string& name) const {
    return (fs::path(path_) / name).string();
}

double adjusted_rand(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("label vectors differ in size");
    auto n = a.size();
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> cont;
    std::map<std::size_t, std::size_t> row_sum, col_sum;
    for (std::size_t i = 0; i < n; ++i) {
        ++cont[{a[i], b[i]}];
        ++row_sum[a[i]];
        ++col_sum[b[i]];
    }
    auto choose2 = [](std::size_t m) {
        return static_cast<double>(m) * static_cast<double>(m ? m - 1 : 0) / 2.0;
    };
    double sum_ij = 0, sum_a = 0, sum_b = 0;
    for (const auto& [key, c] : cont) sum_ij += choose2(c);
    for (const auto& [key, c] : row_sum) sum_a += choose2(c);
    for (const auto& [key, c] : col_sum) sum_b += choose2(c);
    double total = choose2(n);
    double expected = sum_a * sum_b / total;
    double max_index = (sum_a + sum_b) / 2.0;
    if (max_index == expected) return 1.0;
    return (sum_ij - expected) / (max_index - expected);
}

dietmine::taxonomy::Annotation oracle_annotate(const std::string& text,
                                               const dietmine::taxonomy::Taxonomy& tax) {
    using dietmine::text::all_alpha;
    using dietmine::text::lemmatize;
    using dietmine::text::split_words;

    std::vector<std::string> lemmas;
    for (auto& w : split_words(text))
        lemmas.push_back(all_alpha(w) ? lemmatize(w) : std::string());

    struct Match {
        std::size_t begin, end;
        const dietmine::taxonomy::Entity* entity;
    };
    std::map<std::string, std::vector<Match>> by_main;

    for (const auto& ent : tax.entities) {
        std::vector<std::string> ent_lemmas;
        bool matchable = true;
        for (auto& w : split_words(ent.name)) {
            if (!all_alpha(w)) {
                matchable = false;
                break;
            }
            ent_lemmas.push_back(lemmatize(w));
        }
        if (!matchable || ent_lemmas.empty()) continue;
        for (std::size_t i = 0; i + ent_lemmas.size() <= lemmas.size(); ++i) {
            bool hit = true;
            for (std::size_t k = 0; k < ent_lemmas.size(); ++k)
                if (lemmas[i + k].empty() || lemmas[i + k] != ent_lemmas[k]) {
                    hit = false;
                    break;
                }
            if (hit) by_main[ent.main].push_back({i, i + ent_lemmas.size(), &ent});
        }
    }

    dietmine::taxonomy::Annotation ann;
    for (const auto& [main, matches] : by_main) {
        for (std::size_t x = 0; x < matches.size(); ++x) {
            bool contained = false;
            for (std::size_t y = 0; y < matches.size(); ++y) {
                if (x == y) continue;
                if (matches[y].begin <= matches[x].begin &&
                    matches[x].end <= matches[y].end &&
                    (matches[y].begin < matches[x].begin ||
                     matches[x].end < matches[y].end)) {
                    contained = true;
                    break;
                }
            }
            if (contained) continue;
            const auto* ent = matches[x].entity;
            ann.insert({ent->main, "", ""});
            if (!ent->sub.empty()) ann.insert({ent->main, ent->sub, ""});
            ann.insert({ent->main, ent->sub, ent->name});
        }
    }
    return ann;
}

dietmine::corpus::UserDiary make_diary(const std::string& user, dietmine::Date start,
                                       const std::vector<long>& actuals, long goal,
                                       const std::string& text) {
    dietmine::corpus::UserDiary diary;
    diary.user_id = user;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        dietmine::corpus::DayRecord day;
        day.user_id = user;
        day.date = start.plus_days(static_cast<long>(i));
        day.goal = goal;
        day.actual = actuals[i];
        dietmine::corpus::FoodEntry e;
        e.user_id = user;
        e.date = day.date;
        e.meal_name = "Lunch";
        e.text = text;
        e.calories = actuals[i];
        day.entries.push_back(std::move(e));
        diary.days.push_back(std::move(day));
    }
    return diary;
}

} // namespace testsupport
