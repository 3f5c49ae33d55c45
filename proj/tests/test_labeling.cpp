#include <doctest.h>

#include <string>
#include <vector>

#include "dietmine/labeling.hpp"
#include "helpers.hpp"

using namespace dietmine;
using labeling::DayLabel;
using labeling::LabelPolicy;
using testsupport::make_diary;

namespace {

const LabelPolicy kDefault{};

long below_day(long goal) { return goal / 2; }               // well under the margin
long above_day(long goal) { return goal + goal / 10; }       // clearly over
long ontarget_day(long goal) { return goal - goal / 100; }   // within margin, not over

} // namespace

TEST_CASE("label_day boundary behaviour") {
    CHECK(labeling::label_day(2020, 2015, kDefault) == DayLabel::OnTarget);
    CHECK(labeling::label_day(2000, 2001, kDefault) == DayLabel::Above);
    CHECK(labeling::label_day(2000, 2000, kDefault) == DayLabel::OnTarget);
    // deficit ratio exactly at the margin stays OnTarget; one kcal more flips it
    CHECK(labeling::label_day(2000, 1600, kDefault) == DayLabel::OnTarget);
    CHECK(labeling::label_day(2000, 1599, kDefault) == DayLabel::Below);
    // margins that are not exactly representable still honour the strict inequality
    LabelPolicy p3;
    p3.below_margin = 0.3;
    CHECK(labeling::label_day(1000, 700, p3) == DayLabel::OnTarget);
    CHECK(labeling::label_day(1000, 699, p3) == DayLabel::Below);

    CHECK(labeling::label_day(2000, 99, kDefault) == std::nullopt);
    CHECK(labeling::label_day(2000, 100, kDefault) == DayLabel::Below);
    CHECK_THROWS_AS(labeling::label_day(0, 500, kDefault), std::invalid_argument);
    CHECK_THROWS_AS(labeling::label_day(-10, 500, kDefault), std::invalid_argument);
}

TEST_CASE("symmetric mode needs a full margin above goal") {
    LabelPolicy sym;
    sym.symmetric = true;
    CHECK(labeling::label_day(2000, 2001, sym) == DayLabel::OnTarget);
    CHECK(labeling::label_day(2000, 2400, sym) == DayLabel::OnTarget); // ratio exactly 0.2
    CHECK(labeling::label_day(2000, 2401, sym) == DayLabel::Above);
    CHECK(labeling::label_day(2000, 1599, sym) == DayLabel::Below);
}

TEST_CASE("asymmetric mode labels every over-goal day Above") {
    for (long actual = 2001; actual <= 2100; actual += 7)
        CHECK(labeling::label_day(2000, actual, kDefault) == DayLabel::Above);
}

TEST_CASE("raising the margin never moves a day toward Below") {
    for (long actual = 100; actual <= 2200; actual += 50) {
        LabelPolicy narrow, wide;
        narrow.below_margin = 0.1;
        wide.below_margin = 0.3;
        auto n = labeling::label_day(2000, actual, narrow);
        auto w = labeling::label_day(2000, actual, wide);
        REQUIRE(n.has_value());
        REQUIRE(w.has_value());
        if (*n == DayLabel::OnTarget) CHECK(*w != DayLabel::Below);
        if (*n == DayLabel::Above) CHECK(*w == DayLabel::Above);
    }
}

TEST_CASE("label_user takes the modal class") {
    // 10 below, 3 above, 2 on-target
    std::vector<long> actuals;
    for (int i = 0; i < 10; ++i) actuals.push_back(below_day(2000));
    for (int i = 0; i < 3; ++i) actuals.push_back(above_day(2000));
    for (int i = 0; i < 2; ++i) actuals.push_back(ontarget_day(2000));
    auto ul = labeling::label_user(make_diary("u1", {2015, 1, 5}, actuals, 2000), kDefault);
    CHECK(ul.modal == DayLabel::Below);
    CHECK(ul.day_counts == std::array<std::size_t, 3>{10, 2, 3});
    CHECK(ul.modal_fraction == doctest::Approx(10.0 / 15.0));
}

TEST_CASE("label_user modal ties follow the policy priority") {
    std::vector<long> actuals;
    for (int i = 0; i < 5; ++i) actuals.push_back(below_day(2000));
    for (int i = 0; i < 5; ++i) actuals.push_back(above_day(2000));
    auto diary = make_diary("u1", {2015, 1, 5}, actuals, 2000);

    CHECK(labeling::label_user(diary, kDefault).modal == DayLabel::Above);

    LabelPolicy below_first = kDefault;
    below_first.tie_priority = {DayLabel::Below, DayLabel::Above, DayLabel::OnTarget};
    CHECK(labeling::label_user(diary, below_first).modal == DayLabel::Below);
}

TEST_CASE("a modal share as low as 34 percent still wins") {
    std::vector<long> actuals;
    for (int i = 0; i < 34; ++i) actuals.push_back(below_day(2000));
    for (int i = 0; i < 33; ++i) actuals.push_back(above_day(2000));
    for (int i = 0; i < 33; ++i) actuals.push_back(ontarget_day(2000));
    auto ul = labeling::label_user(make_diary("u1", {2015, 1, 5}, actuals, 2000), kDefault);
    CHECK(ul.modal == DayLabel::Below);
    CHECK(ul.modal_fraction == doctest::Approx(0.34));
}

TEST_CASE("one large binge does not outweigh many deficit days") {
    // deficits within the margin stay on-target, so the modal label ignores
    // the single huge over-day entirely
    std::vector<long> mild{4000};
    for (int i = 0; i < 10; ++i) mild.push_back(1800); // 10% under: within margin
    auto soft = labeling::label_user(make_diary("u1", {2015, 1, 5}, mild, 2000), kDefault);
    CHECK(soft.modal == DayLabel::OnTarget);
    CHECK(soft.day_counts == std::array<std::size_t, 3>{0, 10, 1});

    // deficits beyond the margin outvote the binge day: modal Below even
    // though the user was 100% over goal once
    std::vector<long> deep{4000};
    for (int i = 0; i < 10; ++i) deep.push_back(1500); // 25% under: beyond margin
    auto hard = labeling::label_user(make_diary("u1", {2015, 1, 5}, deep, 2000), kDefault);
    CHECK(hard.modal == DayLabel::Below);
    CHECK(hard.day_counts == std::array<std::size_t, 3>{10, 0, 1});
}

TEST_CASE("label_user requires at least one labelable day") {
    auto diary = make_diary("u1", {2015, 1, 5}, {50, 80, 0}, 2000);
    CHECK_THROWS_AS(labeling::label_user(diary, kDefault), std::invalid_argument);

    corpus::Corpus c{diary, make_diary("u2", {2015, 1, 5}, {900}, 2000)};
    auto labels = labeling::label_corpus(c, kDefault);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0].user_id == "u2");
    CHECK(labels[0].modal == DayLabel::Below);
}

TEST_CASE("weekly_trend groups by ISO weekday Monday-first") {
    corpus::Corpus c;
    // 2015-01-05 is a Monday; 7 consecutive days, all Above
    std::vector<long> week(7, above_day(2000));
    c.push_back(make_diary("u1", {2015, 1, 5}, week, 2000));
    auto table = labeling::weekly_trend(c, kDefault);
    for (int i = 0; i < 7; ++i) {
        CHECK(table[i].weekday == i + 1);
        CHECK(table[i].total == 1);
        CHECK(table[i].percent(DayLabel::Above) == doctest::Approx(100.0));
        CHECK(table[i].percent(DayLabel::Below) == doctest::Approx(0.0));
    }

    // single Saturday Below day lands in row 6
    corpus::Corpus sat{make_diary("u2", {2015, 1, 10}, {500}, 2000)};
    auto ts = labeling::weekly_trend(sat, kDefault);
    CHECK(ts[5].weekday == 6);
    CHECK(ts[5].total == 1);
    CHECK(ts[5].percent(DayLabel::Below) == doctest::Approx(100.0));
    CHECK(ts[0].total == 0);
    CHECK(ts[0].percent(DayLabel::Above) == doctest::Approx(0.0)); // empty row guard
}

TEST_CASE("weekly_trend rows sum to 100 percent") {
    corpus::Corpus c;
    std::vector<long> mix;
    for (int i = 0; i < 35; ++i)
        mix.push_back(i % 3 == 0 ? below_day(2000)
                                 : (i % 3 == 1 ? above_day(2000) : ontarget_day(2000)));
    c.push_back(make_diary("u1", {2015, 1, 5}, mix, 2000));
    for (const auto& row : labeling::weekly_trend(c, kDefault)) {
        if (row.total == 0) continue;
        double sum = row.percent(DayLabel::Above) + row.percent(DayLabel::OnTarget) +
                     row.percent(DayLabel::Below);
        CHECK(sum == doctest::Approx(100.0).epsilon(1e-9));
    }
}

TEST_CASE("lifetime_buckets splits chronologically with remainder first") {
    // 12 labeled days, 10 buckets: buckets 1 and 2 get two days each.
    // Days 0..5 Below, days 6..11 Above.
    std::vector<long> actuals;
    for (int i = 0; i < 6; ++i) actuals.push_back(below_day(2000));
    for (int i = 0; i < 6; ++i) actuals.push_back(above_day(2000));
    corpus::Corpus c{make_diary("u1", {2015, 1, 5}, actuals, 2000)};

    auto rows = labeling::lifetime_buckets(c, kDefault, 10);
    REQUIRE(rows.size() == 10);
    for (const auto& r : rows) CHECK(r.users == 1);
    // bucket sizes: 2,2,1,1,1,1,1,1,1,1 -> first three buckets all Below
    for (int b = 0; b < 3; ++b)
        CHECK(rows[b].fraction[static_cast<int>(DayLabel::Below)] == doctest::Approx(1.0));
    for (int b = 4; b < 10; ++b)
        CHECK(rows[b].fraction[static_cast<int>(DayLabel::Above)] == doctest::Approx(1.0));
}

TEST_CASE("lifetime_buckets skips users with too few labeled days") {
    corpus::Corpus c{
        make_diary("few", {2015, 1, 5}, std::vector<long>(9, below_day(2000)), 2000),
        make_diary("enough", {2015, 1, 5}, std::vector<long>(10, above_day(2000)), 2000),
    };
    auto rows = labeling::lifetime_buckets(c, kDefault, 10);
    REQUIRE(rows.size() == 10);
    for (const auto& r : rows) {
        CHECK(r.users == 1);
        CHECK(r.fraction[static_cast<int>(DayLabel::Above)] == doctest::Approx(1.0));
    }

    auto none = labeling::lifetime_buckets(
        corpus::Corpus{make_diary("few", {2015, 1, 5}, {500}, 2000)}, kDefault, 10);
    for (const auto& r : none) CHECK(r.users == 0);
}

TEST_CASE("lifetime_buckets macro-averages across users") {
    corpus::Corpus c{
        make_diary("a", {2015, 1, 5}, std::vector<long>(10, below_day(2000)), 2000),
        make_diary("b", {2015, 1, 5}, std::vector<long>(10, above_day(2000)), 2000),
    };
    auto rows = labeling::lifetime_buckets(c, kDefault, 10);
    for (const auto& r : rows) {
        CHECK(r.users == 2);
        CHECK(r.fraction[static_cast<int>(DayLabel::Below)] == doctest::Approx(0.5));
        CHECK(r.fraction[static_cast<int>(DayLabel::Above)] == doctest::Approx(0.5));
    }
}

TEST_CASE("class_counts tallies modal labels and collects the two cohorts") {
    std::vector<labeling::UserLabel> labels(3);
    labels[0].user_id = "b2";
    labels[0].modal = DayLabel::Below;
    labels[1].user_id = "a1";
    labels[1].modal = DayLabel::Below;
    labels[2].user_id = "c3";
    labels[2].modal = DayLabel::Above;

    auto cc = labeling::class_counts(labels);
    CHECK(cc.counts == std::array<std::size_t, 3>{2, 0, 1});
    CHECK(cc.below_users == std::vector<std::string>{"a1", "b2"});
    CHECK(cc.above_users == std::vector<std::string>{"c3"});

    auto empty = labeling::class_counts({});
    CHECK(empty.counts == std::array<std::size_t, 3>{0, 0, 0});
}

TEST_CASE("user label dump round-trips") {
    std::vector<long> actuals{below_day(2000), below_day(2000), above_day(2000), 50};
    corpus::Corpus c{make_diary("u1", {2015, 1, 5}, actuals, 2000)};
    auto labels = labeling::label_corpus(c, kDefault);

    testsupport::TempDir dir;
    auto path = dir.file("labels.tsv");
    labeling::save_user_labels(labels, path);
    auto loaded = labeling::load_user_labels(path);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].user_id == "u1");
    CHECK(loaded[0].modal == DayLabel::Below);
    CHECK(loaded[0].day_counts == labels[0].day_counts);
    CHECK(loaded[0].modal_fraction == doctest::Approx(labels[0].modal_fraction));
}
