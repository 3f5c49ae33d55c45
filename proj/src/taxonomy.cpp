#include "dietmine/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "dietmine/io.hpp"
#include "dietmine/text.hpp"

namespace dietmine::taxonomy {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
    throw TaxonomyError(path + ":" + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::string path_str(const CategoryPath& p) {
    std::string out = p.main;
    if (!p.sub.empty()) out += ":" + p.sub;
    if (!p.entity.empty()) out += ":" + p.entity;
    return out;
}

std::vector<std::string> match_tokens(const std::string& text) {
    auto words = text::split_words(text);
    std::vector<std::string> lemmas;
    lemmas.reserve(words.size());
    for (auto& w : words) {
        if (text::all_alpha(w))
            lemmas.push_back(text::lemmatize(w));
        else
            lemmas.emplace_back(); // boundary, matches no entity lemma
    }
    return lemmas;
}

Taxonomy load_taxonomy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TaxonomyError(path + ": cannot open");

    Taxonomy tax;
    std::string line;
    std::size_t lineno = 0;
    bool have_expected = false;
    std::size_t exp_mains = 0, exp_subs = 0, exp_entities = 0;

    std::set<std::string> mains;
    std::set<std::pair<std::string, std::string>> subs;
    std::set<std::tuple<std::string, std::string, std::string>> entity_keys;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        if (stripped[0] == '#') {
            std::istringstream ss(stripped.substr(1));
            std::string word;
            if (ss >> word && word == "counts:") {
                if (!(ss >> exp_mains >> exp_subs >> exp_entities))
                    fail(path, lineno, "malformed counts directive");
                have_expected = true;
            }
            continue;
        }
        auto fields = io::split_tsv(line);
        if (fields.size() > 3)
            fail(path, lineno, "expected at most 3 tab-separated fields");
        fields.resize(3);
        std::string main = trim(fields[0]);
        std::string sub = trim(fields[1]);
        std::string name = trim(fields[2]);
        if (main.empty())
            fail(path, lineno, "row without a main category");
        mains.insert(main);
        if (!sub.empty()) subs.insert({main, sub});
        if (name.empty()) continue; // bare category declaration
        if (!entity_keys.insert({main, sub, name}).second)
            fail(path, lineno, "duplicate entity '" + name + "' under '" + main +
                                   (sub.empty() ? "" : ":" + sub) + "'");
        Entity e;
        e.main = main;
        e.sub = sub;
        e.name = name;
        bool matchable = true;
        for (auto& w : text::split_words(name)) {
            if (!text::all_alpha(w)) {
                matchable = false;
                break;
            }
            e.lemmas.push_back(text::lemmatize(w));
        }
        if (e.lemmas.empty()) matchable = false;
        auto id = static_cast<std::uint32_t>(tax.entities.size());
        if (matchable) tax.first_lemma[e.lemmas.front()].push_back(id);
        tax.entities.push_back(std::move(e));
    }

    tax.main_count = mains.size();
    tax.sub_count = subs.size();
    if (have_expected) {
        if (tax.main_count != exp_mains || tax.sub_count != exp_subs ||
            tax.entities.size() != exp_entities) {
            std::ostringstream msg;
            msg << path << ": counts directive mismatch: declared " << exp_mains << "/"
                << exp_subs << "/" << exp_entities << ", loaded " << tax.main_count
                << "/" << tax.sub_count << "/" << tax.entities.size();
            throw TaxonomyError(msg.str());
        }
    }
    return tax;
}

Annotation annotate(const std::string& text, const Taxonomy& tax) {
    auto lemmas = match_tokens(text);

    struct Match {
        std::size_t begin, end;
        std::uint32_t entity;
    };
    std::map<std::string, std::vector<Match>> by_main;

    for (std::size_t i = 0; i < lemmas.size(); ++i) {
        if (lemmas[i].empty()) continue;
        auto it = tax.first_lemma.find(lemmas[i]);
        if (it == tax.first_lemma.end()) continue;
        for (auto id : it->second) {
            const auto& ent = tax.entities[id];
            std::size_t m = ent.lemmas.size();
            if (i + m > lemmas.size()) continue;
            bool hit = true;
            for (std::size_t k = 1; k < m; ++k)
                if (lemmas[i + k] != ent.lemmas[k]) {
                    hit = false;
                    break;
                }
            if (hit) by_main[ent.main].push_back({i, i + m, id});
        }
    }

    Annotation ann;
    for (auto& [main, matches] : by_main) {
        for (std::size_t a = 0; a < matches.size(); ++a) {
            bool contained = false;
            for (std::size_t b = 0; b < matches.size() && !contained; ++b) {
                if (b == a) continue;
                const auto& ma = matches[a];
                const auto& mb = matches[b];
                if (mb.begin <= ma.begin && ma.end <= mb.end &&
                    (mb.begin < ma.begin || ma.end < mb.end))
                    contained = true;
            }
            if (contained) continue;
            const auto& ent = tax.entities[matches[a].entity];
            ann.insert({ent.main, "", ""});
            if (!ent.sub.empty()) ann.insert({ent.main, ent.sub, ""});
            ann.insert({ent.main, ent.sub, ent.name});
        }
    }
    return ann;
}

double coverage_report(const corpus::Corpus& corpus, const Taxonomy& tax) {
    std::set<std::string> unique_texts;
    for (const auto& diary : corpus)
        for (const auto& day : diary.days)
            for (const auto& e : day.entries)
                unique_texts.insert(text::normalize_ws(e.text));
    if (unique_texts.empty()) return 0.0;
    std::size_t matched = 0;
    for (const auto& t : unique_texts)
        if (!annotate(t, tax).empty()) ++matched;
    return static_cast<double>(matched) / static_cast<double>(unique_texts.size());
}

const Annotation* AnnotationIndex::find(const std::string& raw_text) const {
    auto it = by_text.find(text::normalize_ws(raw_text));
    if (it == by_text.end()) return nullptr;
    return &it->second;
}

AnnotationIndex annotate_corpus(const corpus::Corpus& corpus, const Taxonomy& tax,
                                unsigned jobs) {
    std::set<std::string> unique_texts;
    for (const auto& diary : corpus)
        for (const auto& day : diary.days)
            for (const auto& e : day.entries)
                unique_texts.insert(text::normalize_ws(e.text));

    std::vector<std::string> texts(unique_texts.begin(), unique_texts.end());
    std::vector<Annotation> results(texts.size());
    io::parallel_for(texts.size(), jobs,
                     [&](std::size_t i) { results[i] = annotate(texts[i], tax); });

    AnnotationIndex index;
    index.by_text.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i)
        index.by_text.emplace(std::move(texts[i]), std::move(results[i]));
    return index;
}

} // namespace dietmine::taxonomy
