#include "dietmine/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dietmine/io.hpp"
#include "dietmine/text.hpp"

namespace dietmine::features {

std::string space_name(Space s) { return s == Space::token ? "token" : "category"; }

Space parse_space(const std::string& name) {
    if (name == "token") return Space::token;
    if (name == "category") return Space::category;
    throw std::invalid_argument("unknown feature space '" + name + "'");
}

std::vector<std::string> tokenize(const std::string& text) { return text::tokenize(text); }

std::vector<std::string> entry_features(const corpus::FoodEntry& entry, Space space,
                                        const taxonomy::Annotation* ann) {
    if (space == Space::token) return tokenize(entry.text);
    std::vector<std::string> out;
    if (ann)
        for (const auto& p : *ann) out.push_back(taxonomy::path_str(p));
    return out;
}

namespace {

const taxonomy::Annotation* lookup(const taxonomy::AnnotationIndex* index,
                                   const corpus::FoodEntry& entry, Space space) {
    if (space != Space::category) return nullptr;
    if (!index)
        throw std::invalid_argument("category space requires a precomputed annotation index");
    return index->find(entry.text);
}

std::set<std::string> day_features(const corpus::DayRecord& day, Space space,
                                   const taxonomy::AnnotationIndex* index) {
    std::set<std::string> names;
    for (const auto& e : day.entries)
        for (auto& f : entry_features(e, space, lookup(index, e, space)))
            names.insert(std::move(f));
    return names;
}

} // namespace

FeatureVocabulary build_vocabulary(const corpus::Corpus& corpus, Space space,
                                   std::size_t support_threshold,
                                   const taxonomy::AnnotationIndex* index, unsigned jobs) {
    std::vector<std::set<std::string>> per_user(corpus.size());
    io::parallel_for(corpus.size(), jobs, [&](std::size_t u) {
        for (const auto& day : corpus[u].days) {
            auto names = day_features(day, space, index);
            per_user[u].merge(names);
        }
    });

    std::map<std::string, std::size_t> supports;
    for (const auto& names : per_user)
        for (const auto& n : names) ++supports[n];

    FeatureVocabulary vocab;
    vocab.space = space;
    for (const auto& [name, support] : supports) {
        if (support > support_threshold) {
            vocab.ids.emplace(name, static_cast<std::uint32_t>(vocab.names.size()));
            vocab.names.push_back(name);
            vocab.support.push_back(support);
        }
    }
    return vocab;
}

FeatureVector featurize(const corpus::UserDiary& diary, const FeatureVocabulary& vocab,
                        const taxonomy::AnnotationIndex* index, long min_day_kcal) {
    FeatureVector v;
    v.user_id = diary.user_id;
    v.space = vocab.space;
    for (const auto& day : diary.days) {
        if (day.actual < min_day_kcal) continue;
        std::set<std::uint32_t> present;
        for (const auto& name : day_features(day, vocab.space, index)) {
            auto it = vocab.ids.find(name);
            if (it != vocab.ids.end()) present.insert(it->second);
        }
        for (auto id : present) v.values[id] += 1.0;
    }
    return v;
}

std::vector<FeatureVector> featurize_corpus(const corpus::Corpus& corpus,
                                            const FeatureVocabulary& vocab,
                                            const taxonomy::AnnotationIndex* index,
                                            long min_day_kcal, unsigned jobs) {
    std::vector<FeatureVector> out(corpus.size());
    io::parallel_for(corpus.size(), jobs, [&](std::size_t u) {
        out[u] = featurize(corpus[u], vocab, index, min_day_kcal);
    });
    return out;
}

FeatureVector normalize(FeatureVector v) {
    double sq = 0;
    for (const auto& [id, val] : v.values) sq += val * val;
    if (sq > 0) {
        double norm = std::sqrt(sq);
        for (auto& [id, val] : v.values) val /= norm;
    }
    v.normalized = true;
    return v;
}

std::vector<std::string> eligible_users(const corpus::Corpus& corpus,
                                        const FeatureVocabulary& vocab,
                                        const taxonomy::AnnotationIndex* index,
                                        std::size_t min_days, long min_day_kcal) {
    std::vector<std::string> out;
    for (const auto& diary : corpus) {
        std::size_t qualifying = 0;
        for (const auto& day : diary.days) {
            if (day.actual < min_day_kcal) continue;
            bool any = false;
            for (const auto& name : day_features(day, vocab.space, index))
                if (vocab.ids.count(name)) {
                    any = true;
                    break;
                }
            if (any) ++qualifying;
        }
        if (qualifying >= min_days) out.push_back(diary.user_id);
    }
    return out;
}

void save_vocabulary(const FeatureVocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "feature_name\tsupport_count\tfeature_id\n";
    for (std::size_t i = 0; i < vocab.names.size(); ++i)
        out << vocab.names[i] << '\t' << vocab.support[i] << '\t' << i << '\n';
    if (!out) throw std::runtime_error(path + ": write failed");
}

FeatureVocabulary load_vocabulary(const std::string& path, Space space) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    FeatureVocabulary vocab;
    vocab.space = space;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.rfind("feature_name\t", 0) == 0) continue;
        auto fields = io::split_tsv(line);
        if (fields.size() != 3)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 3 fields");
        auto id = static_cast<std::uint32_t>(std::stoul(fields[2]));
        if (id != vocab.names.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": feature ids must be dense and ordered");
        vocab.ids.emplace(fields[0], id);
        vocab.names.push_back(fields[0]);
        vocab.support.push_back(std::stoul(fields[1]));
    }
    if (vocab.ids.size() != vocab.names.size())
        throw std::runtime_error(path + ": duplicate feature names");
    return vocab;
}

void save_vectors(const std::vector<FeatureVector>& vectors, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    for (const auto& v : vectors) {
        out << v.user_id;
        for (const auto& [id, val] : v.values) out << '\t' << id << ':' << io::fmt_double(val);
        out << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace dietmine::features
