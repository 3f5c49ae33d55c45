#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "dietmine/learn.hpp"
#include "dietmine/rng.hpp"
#include "helpers.hpp"

using namespace dietmine;
using learn::Dataset;
using learn::TrainOptions;
using testsupport::make_diary;

namespace {

Dataset gaussian_pair(std::size_t per_class, double sep, std::uint64_t seed) {
    rng::Engine eng(rng::mix_seed(seed, "gaussian-pair"));
    Dataset d;
    d.X.resize(static_cast<Eigen::Index>(2 * per_class), 2);
    d.y.resize(static_cast<Eigen::Index>(2 * per_class));
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        double cls = i < per_class ? 1.0 : -1.0;
        d.X(static_cast<Eigen::Index>(i), 0) = cls * sep + rng::next_normal(eng);
        d.X(static_cast<Eigen::Index>(i), 1) = rng::next_normal(eng);
        d.y(static_cast<Eigen::Index>(i)) = cls;
        d.users.push_back("u" + std::to_string(i));
    }
    return d;
}

labeling::UserLabel mk_label(const std::string& user, labeling::DayLabel modal) {
    labeling::UserLabel ul;
    ul.user_id = user;
    ul.modal = modal;
    ul.day_counts[static_cast<int>(modal)] = 1;
    ul.modal_fraction = 1.0;
    return ul;
}

features::FeatureVector mk_vector(const std::string& user,
                                  std::map<std::uint32_t, double> values) {
    features::FeatureVector v;
    v.user_id = user;
    v.values = std::move(values);
    return v;
}

} // namespace

TEST_CASE("make_dataset keeps Above and Below users in vector order") {
    std::vector<features::FeatureVector> vectors{
        mk_vector("a", {{0, 1.0}}),
        mk_vector("b", {{1, 2.0}}),
        mk_vector("c", {{0, 3.0}}),
        mk_vector("d", {{1, 4.0}}),
    };
    std::vector<labeling::UserLabel> labels{
        mk_label("a", labeling::DayLabel::Above),
        mk_label("b", labeling::DayLabel::OnTarget), // dropped
        mk_label("c", labeling::DayLabel::Below),
        // d unlabeled: dropped
    };
    auto d = learn::make_dataset(vectors, labels, 2);
    REQUIRE(d.users == std::vector<std::string>{"a", "c"});
    CHECK(d.X.rows() == 2);
    CHECK(d.X.cols() == 2);
    CHECK(d.X(0, 0) == 1.0);
    CHECK(d.X(1, 0) == 3.0);
    CHECK(d.y(0) == 1.0);
    CHECK(d.y(1) == -1.0);
}

TEST_CASE("balance equalizes class counts without replacement") {
    Dataset d;
    d.X.resize(10, 1);
    d.y.resize(10);
    for (int i = 0; i < 10; ++i) {
        d.X(i, 0) = i;
        d.y(i) = i < 7 ? 1.0 : -1.0; // 7 positive, 3 negative
        d.users.push_back("u" + std::to_string(i));
    }
    auto b = learn::balance(d, 42);
    REQUIRE(b.users.size() == 6);
    CHECK((b.y.array() == 1.0).count() == 3);
    CHECK((b.y.array() == -1.0).count() == 3);

    // sampled rows are genuine rows, no duplicates
    std::set<std::string> seen(b.users.begin(), b.users.end());
    CHECK(seen.size() == 6);
    for (int i = 0; i < 6; ++i) {
        auto idx = std::stoul(b.users[i].substr(1));
        CHECK(b.X(i, 0) == static_cast<double>(idx));
        CHECK(b.y(i) == (idx < 7 ? 1.0 : -1.0));
    }

    auto b2 = learn::balance(d, 42);
    CHECK(b2.users == b.users);
    auto b3 = learn::balance(d, 43);
    CHECK(b3.users != b.users); // different seed, different draw (overwhelmingly)

    Dataset already = gaussian_pair(4, 2.0, 1);
    auto kept = learn::balance(already, 7);
    CHECK(kept.users.size() == 8);
    std::set<std::string> all(kept.users.begin(), kept.users.end());
    CHECK(all.size() == 8);

    Dataset lonely;
    lonely.X.resize(2, 1);
    lonely.y.resize(2);
    lonely.X << 1, 2;
    lonely.y << 1, 1;
    lonely.users = {"a", "b"};
    CHECK_THROWS_AS(learn::balance(lonely, 1), std::invalid_argument);
}

TEST_CASE("train separates a separable pair") {
    Dataset d;
    d.X.resize(2, 1);
    d.y.resize(2);
    d.X << 1.0, -1.0;
    d.y << 1.0, -1.0;
    d.users = {"pos", "neg"};
    auto m = learn::train(d, {});
    CHECK(m.w(0) > 0);
    CHECK(m.predict(d.X.row(0)) == 1);
    CHECK(m.predict(d.X.row(1)) == -1);
}

TEST_CASE("train rejects non-finite inputs and bad options") {
    Dataset d = gaussian_pair(5, 1.0, 3);
    d.X(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(learn::train(d, {}), std::invalid_argument);

    Dataset ok = gaussian_pair(5, 1.0, 3);
    TrainOptions bad;
    bad.C = 0;
    CHECK_THROWS_AS(learn::train(ok, bad), std::invalid_argument);
    CHECK_THROWS_AS(learn::train(Dataset{}, {}), std::invalid_argument);
}

TEST_CASE("svm_subgradient matches finite differences of the objective") {
    rng::Engine eng(rng::mix_seed(11, "gradcheck"));
    auto d = gaussian_pair(20, 1.5, 11);
    const double n = static_cast<double>(d.X.rows());
    const double C = 0.7;
    const double h = 1e-5;

    int checked = 0;
    for (int rep = 0; rep < 200 && checked < 100; ++rep) {
        Eigen::VectorXd w(2);
        w << 4 * rng::next_unit(eng) - 2, 4 * rng::next_unit(eng) - 2;
        double b = 2 * rng::next_unit(eng) - 1;

        // skip points near a hinge kink where the subgradient is one-sided
        Eigen::VectorXd scores = (d.X * w).array() + b;
        Eigen::VectorXd margins = d.y.cwiseProduct(scores);
        if ((margins.array() - 1.0).abs().minCoeff() < 1e-3) continue;

        auto [gw, gb] = learn::svm_subgradient(d.X, d.y, C, w, b);
        auto scaled = [&](const Eigen::VectorXd& ww, double bb) {
            return learn::svm_objective(d.X, d.y, C, ww, bb) / (n * C);
        };
        for (int k = 0; k < 2; ++k) {
            Eigen::VectorXd wp = w, wm = w;
            wp(k) += h;
            wm(k) -= h;
            double fd = (scaled(wp, b) - scaled(wm, b)) / (2 * h);
            double denom = std::max({1.0, std::abs(fd), std::abs(gw(k))});
            CHECK(std::abs(gw(k) - fd) / denom < 1e-4);
        }
        double fdb = (scaled(w, b + h) - scaled(w, b - h)) / (2 * h);
        double denomb = std::max({1.0, std::abs(fdb), std::abs(gb)});
        CHECK(std::abs(gb - fdb) / denomb < 1e-4);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("recorded objective history is non-increasing") {
    auto d = gaussian_pair(30, 0.8, 5);
    auto m = learn::train(d, {});
    REQUIRE(!m.objective_history.empty());
    for (std::size_t i = 1; i < m.objective_history.size(); ++i)
        CHECK(m.objective_history[i] <= m.objective_history[i - 1] + 1e-9);
    CHECK(m.epochs == m.objective_history.size());

    // the returned model attains the last recorded (best) objective
    double f = learn::svm_objective(d.X, d.y, 1.0, m.w, m.bias);
    CHECK(f == doctest::Approx(m.objective_history.back()).epsilon(1e-9));
}

TEST_CASE("scaling inputs and rescaling C preserves training-set predictions") {
    auto d = gaussian_pair(25, 1.0, 9);
    TrainOptions base;
    base.C = 1.0;
    auto m = learn::train(d, base);

    const double c = 4.0;
    Dataset scaled = d;
    scaled.X *= c;
    TrainOptions adj;
    adj.C = base.C / (c * c);
    auto ms = learn::train(scaled, adj);

    for (Eigen::Index i = 0; i < d.X.rows(); ++i)
        CHECK(m.predict(d.X.row(i)) == ms.predict(scaled.X.row(i)));
}

TEST_CASE("cross_validate returns stratified disjoint folds and sane metrics") {
    auto d = gaussian_pair(25, 3.0, 17); // trivially separable
    TrainOptions opts;
    auto report = learn::cross_validate(d, 10, opts);
    REQUIRE(report.folds.size() == 10);
    for (const auto& f : report.folds) {
        CHECK(f.accuracy == doctest::Approx(1.0));
        REQUIRE(f.precision.has_value());
        REQUIRE(f.recall.has_value());
        CHECK(*f.precision == doctest::Approx(1.0));
        CHECK(*f.recall == doctest::Approx(1.0));
    }
    CHECK(report.accuracy_mean == doctest::Approx(1.0));
    CHECK(report.accuracy_std == doctest::Approx(0.0));
    CHECK(report.precision_folds == 10);
    CHECK(report.recall_folds == 10);

    CHECK_THROWS_AS(learn::cross_validate(d, 1, opts), std::invalid_argument);
    Dataset tiny = gaussian_pair(2, 1.0, 1);
    CHECK_THROWS_AS(learn::cross_validate(tiny, 10, opts), std::invalid_argument);
}

TEST_CASE("label-shuffled data scores near chance") {
    auto d = gaussian_pair(60, 3.0, 23);
    rng::Engine eng(rng::mix_seed(23, "label-shuffle"));
    std::vector<double> ys(d.y.data(), d.y.data() + d.y.size());
    rng::shuffle(ys, eng);
    for (Eigen::Index i = 0; i < d.y.size(); ++i) d.y(i) = ys[static_cast<std::size_t>(i)];

    auto report = learn::cross_validate(d, 10, {});
    CHECK(report.accuracy_mean > 0.30);
    CHECK(report.accuracy_mean < 0.70);
}

TEST_CASE("top_features ranks by signed weight with corpus examples") {
    features::FeatureVocabulary vocab;
    vocab.space = features::Space::token;
    vocab.names = {"cup", "egg", "oil"};
    vocab.support = {3, 3, 3};
    vocab.ids = {{"cup", 0}, {"egg", 1}, {"oil", 2}};

    learn::LinearModel model;
    model.w.resize(3);
    model.w << -3.0, -1.0, 2.0; // cup: -3, egg: -1, oil: +2

    corpus::Corpus c;
    c.push_back(make_diary("u1", {2015, 1, 5}, {500, 600}, 2000, "olive oil"));
    c.push_back(make_diary("u2", {2015, 1, 5}, {500}, 2000, "olive oil"));
    c.push_back(make_diary("u3", {2015, 1, 5}, {500}, 2000, "oil spray"));
    c.push_back(make_diary("u4", {2015, 1, 5}, {500}, 2000, "cup of tea"));

    auto top1 = learn::top_features(model, vocab, c, nullptr, 1);
    REQUIRE(top1.positive.size() == 1);
    REQUIRE(top1.negative.size() == 1);
    CHECK(top1.positive[0].name == "oil");
    CHECK(top1.positive[0].weight == 2.0);
    CHECK(top1.positive[0].example_text == "olive oil"); // 2 users beat 1
    CHECK(top1.negative[0].name == "cup");
    CHECK(top1.negative[0].weight == -3.0);
    CHECK(top1.negative[0].example_text == "cup of tea");

    auto all = learn::top_features(model, vocab, c, nullptr, 10);
    REQUIRE(all.positive.size() == 3);
    CHECK(all.positive[0].name == "oil");
    CHECK(all.positive[1].name == "egg");
    CHECK(all.positive[2].name == "cup");
    CHECK(all.negative[0].name == "cup");
    CHECK(all.negative[1].name == "egg");
    CHECK(all.negative[2].name == "oil");
    CHECK(all.positive[1].example_text.empty()); // egg never logged
}

TEST_CASE("margin_profile is flat for identical users and steps at a split") {
    labeling::LabelPolicy policy;

    // identical users: every group shows the same distribution
    std::vector<features::FeatureVector> vectors;
    corpus::Corpus c;
    for (int i = 0; i < 8; ++i) {
        auto id = "u" + std::to_string(i);
        vectors.push_back(mk_vector(id, {{0, 2.0}}));
        c.push_back(make_diary(id, {2015, 1, 5}, {900, 2500}, 2000));
    }
    learn::LinearModel model;
    model.w.resize(1);
    model.w << 1.0;

    auto prof = learn::margin_profile(model, vectors, c, policy, 4);
    REQUIRE(prof.groups.size() == 4);
    for (const auto& g : prof.groups) {
        CHECK(g.users == 2);
        CHECK(g.fraction[static_cast<int>(labeling::DayLabel::Below)] == doctest::Approx(0.5));
        CHECK(g.fraction[static_cast<int>(labeling::DayLabel::Above)] == doctest::Approx(0.5));
        CHECK(g.mean_days == doctest::Approx(2.0));
    }

    // two populations: low-score users all Below, high-score users all Above
    std::vector<features::FeatureVector> v2;
    corpus::Corpus c2;
    for (int i = 0; i < 10; ++i) {
        auto id = "u" + std::to_string(i);
        bool high = i >= 5;
        v2.push_back(mk_vector(id, {{0, high ? 5.0 : 1.0}}));
        c2.push_back(make_diary(id, {2015, 1, 5},
                                std::vector<long>(4, high ? 2500 : 900), 2000));
    }
    auto prof2 = learn::margin_profile(model, v2, c2, policy, 2);
    REQUIRE(prof2.groups.size() == 2);
    CHECK(prof2.groups[0].fraction[static_cast<int>(labeling::DayLabel::Below)] ==
          doctest::Approx(1.0));
    CHECK(prof2.groups[1].fraction[static_cast<int>(labeling::DayLabel::Above)] ==
          doctest::Approx(1.0));

    // group sizes differ by at most one when users do not divide evenly
    auto prof3 = learn::margin_profile(model, v2, c2, policy, 3);
    REQUIRE(prof3.groups.size() == 3);
    CHECK(prof3.groups[0].users == 4);
    CHECK(prof3.groups[1].users == 3);
    CHECK(prof3.groups[2].users == 3);

    // a vector for a user missing from the corpus is an error
    auto v_bad = v2;
    v_bad.push_back(mk_vector("ghost", {{0, 1.0}}));
    CHECK_THROWS_AS(learn::margin_profile(model, v_bad, c2, policy, 2),
                    std::invalid_argument);
}

TEST_CASE("misclassified users far from the boundary have weak modal labels") {
    // Planted cohort: feature 0 drives the true class. Confident users follow
    // the signal; two "confused" users carry strong opposite-class features
    // but nearly balanced day labels (low modal fraction).
    std::vector<features::FeatureVector> vectors;
    std::vector<labeling::UserLabel> labels;
    corpus::Corpus c;
    auto add_user = [&](const std::string& id, double signal, int below_days,
                        int above_days) {
        vectors.push_back(mk_vector(id, {{0, signal}}));
        std::vector<long> actuals;
        for (int i = 0; i < below_days; ++i) actuals.push_back(1000);
        for (int i = 0; i < above_days; ++i) actuals.push_back(2500);
        c.push_back(make_diary(id, {2015, 1, 5}, actuals, 2000));
        labeling::UserLabel ul;
        ul.user_id = id;
        ul.modal = below_days >= above_days ? labeling::DayLabel::Below
                                            : labeling::DayLabel::Above;
        if (below_days == above_days) ul.modal = labeling::DayLabel::Above; // tie rule
        ul.day_counts[0] = static_cast<std::size_t>(below_days);
        ul.day_counts[2] = static_cast<std::size_t>(above_days);
        ul.modal_fraction = static_cast<double>(std::max(below_days, above_days)) /
                            static_cast<double>(below_days + above_days);
        labels.push_back(ul);
    };
    for (int i = 0; i < 8; ++i) add_user("above" + std::to_string(i), 4.0, 1, 9);
    for (int i = 0; i < 8; ++i) add_user("below" + std::to_string(i), -4.0, 9, 1);
    add_user("confusedA", 5.0, 11, 10); // strong Above features, modal Below at 11/21
    add_user("confusedB", -5.0, 10, 11); // strong Below features, modal Above at 11/21

    auto data = learn::make_dataset(vectors, labels, 1);
    auto model = learn::train(data, {});

    for (std::size_t i = 0; i < data.users.size(); ++i) {
        double score = model.score(data.X.row(i));
        bool misclassified = (score >= 0) != (data.y(i) > 0);
        if (!misclassified) continue;
        auto lit = std::find_if(labels.begin(), labels.end(), [&](const auto& ul) {
            return ul.user_id == data.users[i];
        });
        REQUIRE(lit != labels.end());
        CHECK(lit->modal_fraction < 0.60);
        CHECK(std::abs(score) > 1.0); // far side of the margin
    }
    // sanity: the two confused users are indeed misclassified
    for (const auto& id : {std::string("confusedA"), std::string("confusedB")}) {
        auto row = std::find(data.users.begin(), data.users.end(), id) -
                   data.users.begin();
        double score = model.score(data.X.row(row));
        CHECK((score >= 0) != (data.y(row) > 0));
    }
}

TEST_CASE("model files round-trip") {
    features::FeatureVocabulary vocab;
    vocab.space = features::Space::category;
    vocab.names = {"Dairy", "Meats:Poultry"};
    vocab.support = {5, 4};
    vocab.ids = {{"Dairy", 0}, {"Meats:Poultry", 1}};

    learn::LinearModel model;
    model.w.resize(2);
    model.w << 0.125, -2.5e-7;
    model.bias = -0.75;
    model.C = 2.0;
    model.seed = 99;
    model.epochs = 42;

    testsupport::TempDir dir;
    auto path = dir.file("model.tsv");
    learn::save_model(model, vocab, path);
    auto loaded = learn::load_model(path);
    CHECK(loaded.space == features::Space::category);
    CHECK(loaded.names == vocab.names);
    CHECK(loaded.model.bias == model.bias);
    CHECK(loaded.model.C == model.C);
    CHECK(loaded.model.seed == model.seed);
    REQUIRE(loaded.model.w.size() == 2);
    CHECK(loaded.model.w(0) == model.w(0));
    CHECK(loaded.model.w(1) == model.w(1));

    CHECK_THROWS(learn::load_model(dir.file("missing.tsv")));
}
