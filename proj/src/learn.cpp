#include "dietmine/learn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "dietmine/io.hpp"
#include "dietmine/rng.hpp"
#include "dietmine/text.hpp"

namespace dietmine::learn {

Dataset make_dataset(const std::vector<features::FeatureVector>& vectors,
                     const std::vector<labeling::UserLabel>& labels,
                     std::size_t feature_count) {
    std::unordered_map<std::string, labeling::DayLabel> modal;
    modal.reserve(labels.size());
    for (const auto& ul : labels) modal.emplace(ul.user_id, ul.modal);

    std::vector<const features::FeatureVector*> rows;
    for (const auto& v : vectors) {
        auto it = modal.find(v.user_id);
        if (it == modal.end()) continue;
        if (it->second == labeling::DayLabel::OnTarget) continue;
        rows.push_back(&v);
    }

    Dataset data;
    data.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                   static_cast<Eigen::Index>(feature_count));
    data.y = Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()));
    data.users.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& v = *rows[i];
        for (const auto& [id, val] : v.values)
            data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(id)) = val;
        data.y(static_cast<Eigen::Index>(i)) =
            modal.at(v.user_id) == labeling::DayLabel::Above ? 1.0 : -1.0;
        data.users.push_back(v.user_id);
    }
    return data;
}

namespace {

Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.X = Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), data.X.cols());
    out.y = Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()));
    out.users.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) =
            data.X.row(static_cast<Eigen::Index>(rows[i]));
        out.y(static_cast<Eigen::Index>(i)) = data.y(static_cast<Eigen::Index>(rows[i]));
        out.users.push_back(data.users[rows[i]]);
    }
    return out;
}

} // namespace

Dataset balance(const Dataset& data, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (Eigen::Index i = 0; i < data.y.size(); ++i)
        (data.y(i) > 0 ? pos : neg).push_back(static_cast<std::size_t>(i));
    if (pos.empty() || neg.empty())
        throw std::invalid_argument("balance requires both classes non-empty");

    rng::Engine eng(rng::mix_seed(seed, "balance"));
    std::vector<std::size_t> rows;
    if (pos.size() == neg.size()) {
        rows = pos;
        rows.insert(rows.end(), neg.begin(), neg.end());
    } else {
        auto& minority = pos.size() < neg.size() ? pos : neg;
        auto& majority = pos.size() < neg.size() ? neg : pos;
        rows = minority;
        for (auto k : rng::sample_indices(eng, majority.size(), minority.size()))
            rows.push_back(majority[k]);
    }
    rng::shuffle(rows, eng);
    return take_rows(data, rows);
}

double svm_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C,
                     const Eigen::VectorXd& w, double bias) {
    Eigen::VectorXd scores = (X * w).array() + bias;
    Eigen::ArrayXd margins = y.cwiseProduct(scores).array();
    double hinge = (1.0 - margins).max(0.0).sum();
    return 0.5 * w.squaredNorm() + C * hinge;
}

std::pair<Eigen::VectorXd, double> svm_subgradient(const Eigen::MatrixXd& X,
                                                   const Eigen::VectorXd& y, double C,
                                                   const Eigen::VectorXd& w, double bias) {
    auto n = static_cast<double>(X.rows());
    double lambda = 1.0 / (n * C);
    Eigen::VectorXd scores = X * w;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        if (y(i) * (scores(i) + bias) < 1.0) v(i) = y(i);
    Eigen::VectorXd grad_w = lambda * w - (X.transpose() * v) / n;
    double grad_b = -v.sum() / n;
    return {std::move(grad_w), grad_b};
}

LinearModel train(const Dataset& data, const TrainOptions& opts) {
    if (data.X.rows() == 0) throw std::invalid_argument("empty training sample");
    if (!data.X.allFinite() || !data.y.allFinite())
        throw std::invalid_argument("non-finite values in training sample");
    if (opts.C <= 0) throw std::invalid_argument("C must be positive");

    auto n = static_cast<double>(data.X.rows());
    double lambda = 1.0 / (n * opts.C);
    double radius = 1.0 / std::sqrt(lambda);

    Eigen::VectorXd w = Eigen::VectorXd::Zero(data.X.cols());
    double bias = 0;

    LinearModel model;
    model.C = opts.C;
    model.seed = opts.seed;
    model.w = w;
    model.bias = bias;

    double best = svm_objective(data.X, data.y, opts.C, w, bias);
    double prev = best;
    model.objective_history.reserve(opts.max_epochs);

    for (std::size_t t = 1; t <= opts.max_epochs; ++t) {
        auto [grad_w, grad_b] = svm_subgradient(data.X, data.y, opts.C, w, bias);
        double eta = 1.0 / (lambda * static_cast<double>(t));
        w -= eta * grad_w;
        bias -= eta * grad_b;
        double norm = w.norm();
        if (norm > radius) w *= radius / norm;

        double obj = svm_objective(data.X, data.y, opts.C, w, bias);
        if (obj < best) {
            best = obj;
            model.w = w;
            model.bias = bias;
        }
        model.objective_history.push_back(best);
        model.epochs = t;
        if (std::abs(obj - prev) / std::max(1.0, std::abs(prev)) < opts.tol) break;
        prev = obj;
    }
    return model;
}

namespace {

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0;
    double sq = 0;
    for (double x : xs) sq += (x - mean) * (x - mean);
    return std::sqrt(sq / static_cast<double>(xs.size() - 1));
}

} // namespace

EvalReport cross_validate(const Dataset& data, std::size_t folds,
                          const TrainOptions& opts) {
    auto n = static_cast<std::size_t>(data.X.rows());
    if (folds < 2) throw std::invalid_argument("need at least 2 folds");
    if (n < folds) throw std::invalid_argument("sample smaller than fold count");

    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i)
        (data.y(static_cast<Eigen::Index>(i)) > 0 ? pos : neg).push_back(i);
    rng::Engine eng(rng::mix_seed(opts.seed, "folds"));
    rng::shuffle(pos, eng);
    rng::shuffle(neg, eng);

    std::vector<std::size_t> fold_of(n);
    for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = i % folds;
    for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = i % folds;

    EvalReport report;
    std::vector<double> accs, precs, recs;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < n; ++i)
            (fold_of[i] == f ? test_rows : train_rows).push_back(i);
        auto model = train(take_rows(data, train_rows), opts);

        std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
        for (auto i : test_rows) {
            int truth = data.y(static_cast<Eigen::Index>(i)) > 0 ? 1 : -1;
            int pred = model.predict(data.X.row(static_cast<Eigen::Index>(i)).transpose());
            if (pred == truth) ++correct;
            if (pred == 1 && truth == 1) ++tp;
            if (pred == 1 && truth == -1) ++fp;
            if (pred == -1 && truth == 1) ++fn;
        }
        FoldMetrics m;
        m.accuracy = test_rows.empty()
                         ? 0.0
                         : static_cast<double>(correct) / static_cast<double>(test_rows.size());
        if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        accs.push_back(m.accuracy);
        if (m.precision) precs.push_back(*m.precision);
        if (m.recall) recs.push_back(*m.recall);
        report.folds.push_back(m);
    }

    auto mean = [](const std::vector<double>& xs) {
        if (xs.empty()) return 0.0;
        double s = 0;
        for (double x : xs) s += x;
        return s / static_cast<double>(xs.size());
    };
    report.accuracy_mean = mean(accs);
    report.accuracy_std = sample_std(accs, report.accuracy_mean);
    report.precision_mean = mean(precs);
    report.precision_std = sample_std(precs, report.precision_mean);
    report.recall_mean = mean(recs);
    report.recall_std = sample_std(recs, report.recall_mean);
    report.precision_folds = precs.size();
    report.recall_folds = recs.size();
    return report;
}

TopFeatures top_features(const LinearModel& model, const features::FeatureVocabulary& vocab,
                         const corpus::Corpus& corpus,
                         const taxonomy::AnnotationIndex* index, std::size_t k) {
    auto d = static_cast<std::size_t>(model.w.size());
    if (d != vocab.size())
        throw std::invalid_argument("model dimension does not match vocabulary");
    std::vector<std::uint32_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        double wa = model.w(a), wb = model.w(b);
        if (wa != wb) return wa > wb;
        return vocab.names[a] < vocab.names[b];
    });
    if (k > d) k = d;

    std::vector<std::uint32_t> wanted(order.begin(), order.begin() + k);
    wanted.insert(wanted.end(), order.end() - static_cast<std::ptrdiff_t>(k), order.end());

    // distinct-user counts per normalized entry text
    std::map<std::string, std::set<std::string>> text_users;
    for (const auto& diary : corpus)
        for (const auto& day : diary.days)
            for (const auto& e : day.entries)
                text_users[text::normalize_ws(e.text)].insert(diary.user_id);

    std::unordered_map<std::uint32_t, std::pair<std::size_t, std::string>> best;
    for (auto id : wanted) best.emplace(id, std::make_pair(0, std::string()));
    for (const auto& [txt, users] : text_users) {
        corpus::FoodEntry probe;
        probe.text = txt;
        const taxonomy::Annotation* ann = index ? index->find(txt) : nullptr;
        std::set<std::string> names;
        for (auto& f : features::entry_features(probe, vocab.space, ann))
            names.insert(std::move(f));
        for (auto id : wanted) {
            if (!names.count(vocab.names[id])) continue;
            auto& slot = best.at(id);
            if (users.size() > slot.first ||
                (users.size() == slot.first && (slot.second.empty() || txt < slot.second)))
                slot = {users.size(), txt};
        }
    }

    TopFeatures tf;
    for (std::size_t i = 0; i < k; ++i) {
        auto id = order[i];
        tf.positive.push_back({vocab.names[id], model.w(id), best.at(id).second});
    }
    for (std::size_t i = 0; i < k; ++i) {
        auto id = order[d - 1 - i];
        tf.negative.push_back({vocab.names[id], model.w(id), best.at(id).second});
    }
    return tf;
}

MarginProfile margin_profile(const LinearModel& model,
                             const std::vector<features::FeatureVector>& vectors,
                             const corpus::Corpus& corpus,
                             const labeling::LabelPolicy& policy, std::size_t groups) {
    if (groups == 0) throw std::invalid_argument("groups must be positive");
    struct Row {
        double score;
        const features::FeatureVector* vec;
    };
    std::vector<Row> rows;
    rows.reserve(vectors.size());
    for (const auto& v : vectors) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(model.w.size());
        for (const auto& [id, val] : v.values) {
            if (static_cast<Eigen::Index>(id) >= model.w.size())
                throw std::invalid_argument("vector feature id out of model range");
            x(static_cast<Eigen::Index>(id)) = val;
        }
        rows.push_back({model.score(x), &v});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.vec->user_id < b.vec->user_id;
    });

    MarginProfile profile;
    std::size_t n = rows.size();
    std::size_t base = groups ? n / groups : 0;
    std::size_t rem = groups ? n % groups : 0;
    std::size_t pos = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        std::size_t len = base + (g < rem ? 1 : 0);
        MarginGroup mg;
        mg.group = g;
        mg.users = len;
        for (std::size_t i = 0; i < len; ++i) {
            const auto* diary = corpus::find_user(corpus, rows[pos + i].vec->user_id);
            if (!diary)
                throw std::invalid_argument("user " + rows[pos + i].vec->user_id +
                                            " missing from corpus");
            auto days = labeling::label_days(*diary, policy);
            if (days.empty())
                throw std::invalid_argument("user " + diary->user_id +
                                            " has no labeled days");
            std::array<std::size_t, 3> counts{};
            for (const auto& d : days) ++counts[static_cast<int>(d.label)];
            for (int c = 0; c < 3; ++c)
                mg.fraction[c] +=
                    static_cast<double>(counts[c]) / static_cast<double>(days.size());
            mg.mean_days += static_cast<double>(days.size());
        }
        if (len > 0) {
            for (auto& f : mg.fraction) f /= static_cast<double>(len);
            mg.mean_days /= static_cast<double>(len);
        }
        pos += len;
        profile.groups.push_back(mg);
    }
    return profile;
}

void save_model(const LinearModel& model, const features::FeatureVocabulary& vocab,
                const std::string& path) {
    if (static_cast<std::size_t>(model.w.size()) != vocab.size())
        throw std::invalid_argument("model dimension does not match vocabulary");
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "dietmine-model\tv1\n";
    out << "space\t" << features::space_name(vocab.space) << '\n';
    out << "C\t" << io::fmt_double(model.C) << '\n';
    out << "seed\t" << model.seed << '\n';
    out << "bias\t" << io::fmt_double(model.bias) << '\n';
    out << "features\t" << vocab.size() << '\n';
    for (std::size_t i = 0; i < vocab.size(); ++i)
        out << vocab.names[i] << '\t'
            << io::fmt_double(model.w(static_cast<Eigen::Index>(i))) << '\n';
    if (!out) throw std::runtime_error(path + ": write failed");
}

SavedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string line;
    auto next = [&](const char* what) {
        if (!std::getline(in, line))
            throw std::runtime_error(path + ": truncated model file (" + what + ")");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return io::split_tsv(line);
    };
    auto magic = next("magic");
    if (magic.size() != 2 || magic[0] != "dietmine-model" || magic[1] != "v1")
        throw std::runtime_error(path + ": not a v1 model file");
    auto space = next("space");
    auto cline = next("C");
    auto seed = next("seed");
    auto bias = next("bias");
    auto count = next("feature count");
    if (space.size() != 2 || space[0] != "space" || cline.size() != 2 || cline[0] != "C" ||
        seed.size() != 2 || seed[0] != "seed" || bias.size() != 2 || bias[0] != "bias" ||
        count.size() != 2 || count[0] != "features")
        throw std::runtime_error(path + ": malformed model header");

    SavedModel saved;
    saved.space = features::parse_space(space[1]);
    saved.model.C = std::stod(cline[1]);
    saved.model.seed = std::stoull(seed[1]);
    saved.model.bias = std::stod(bias[1]);
    auto d = static_cast<std::size_t>(std::stoul(count[1]));
    saved.model.w = Eigen::VectorXd(static_cast<Eigen::Index>(d));

    saved.names.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        auto fields = next("weight row");
        if (fields.size() != 2)
            throw std::runtime_error(path + ": malformed weight line");
        saved.names.push_back(fields[0]);
        saved.model.w(static_cast<Eigen::Index>(i)) = std::stod(fields[1]);
    }
    return saved;
}

} // namespace dietmine::learn
