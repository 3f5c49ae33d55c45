#include "dietmine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dietmine/io.hpp"
#include "dietmine/rng.hpp"
#include "dietmine/text.hpp"

namespace dietmine::synth {

const std::vector<std::string>& builtin_phrases() {
    static const std::vector<std::string> phrases = {
        "grilled chicken",      "olive oil",          "banana",
        "greek yogurt",         "brown rice",         "scrambled egg",
        "black coffee",         "whole wheat bread",  "cheddar cheese",
        "caesar salad",         "red apple",          "peanut butter",
        "oatmeal with honey",   "orange juice",       "chocolate cake",
        "french fries",         "hamburger with bun", "pepperoni pizza",
        "green grapes",         "strawberry smoothie","tuna sandwich",
        "roasted potato",       "green tea",          "vanilla ice cream",
        "baked salmon",         "steamed broccoli",   "fried noodles",
        "tomato soup",          "butter croissant",   "milk chocolate bar",
    };
    return phrases;
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw std::invalid_argument("synth spec: " + field + " " + why);
}

void check_probs3(const std::array<double, 3>& p, const std::string& field) {
    double sum = 0;
    for (double v : p) {
        if (v < 0 || v > 1) bad(field, "entries must lie in [0,1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) bad(field, "entries must sum to 1");
}

std::vector<std::string> phrase_list(const SynthSpec& spec) {
    std::vector<std::string> phrases = builtin_phrases();
    std::set<std::string> seen(phrases.begin(), phrases.end());
    for (const auto& lists : {&spec.plant_above, &spec.plant_below})
        for (const auto& p : *lists)
            if (seen.insert(p).second) phrases.push_back(p);
    return phrases;
}

} // namespace

void validate(const SynthSpec& spec) {
    if (spec.users == 0) bad("users", "must be positive");
    if (spec.days == 0) bad("days", "must be positive");
    if (!spec.start_date.valid()) bad("start_date", "is not a calendar date");
    if (spec.goal_min < 130) bad("goal_min", "must be at least 130");
    if (spec.goal_max < spec.goal_min) bad("goal_max", "must be >= goal_min");

    for (double s : {spec.share_below, spec.share_ontarget, spec.share_above})
        if (s < 0 || s > 1) bad("share_*", "must lie in [0,1]");
    if (std::abs(spec.share_below + spec.share_ontarget + spec.share_above - 1.0) > 1e-9)
        bad("share_*", "must sum to 1");

    check_probs3(spec.day_probs_below, "day_probs_below");
    check_probs3(spec.day_probs_ontarget, "day_probs_ontarget");
    check_probs3(spec.day_probs_above, "day_probs_above");

    if (spec.weekday_above.has_value() != spec.weekday_below.has_value())
        bad("weekday_above/weekday_below", "must be set together");
    if (spec.weekday_above) {
        for (int i = 0; i < 7; ++i) {
            double a = (*spec.weekday_above)[i];
            double b = (*spec.weekday_below)[i];
            if (a < 0 || a > 1 || b < 0 || b > 1) bad("weekday rates", "must lie in [0,1]");
            if (a + b > 1.0 + 1e-9) bad("weekday rates", "Above+Below must not exceed 1");
        }
    }

    if (spec.drift_below_start.has_value() != spec.drift_below_end.has_value())
        bad("drift_below_start/drift_below_end", "must be set together");
    if (spec.drift_below_start) {
        if (*spec.drift_below_start < 0 || *spec.drift_below_start > 1 ||
            *spec.drift_below_end < 0 || *spec.drift_below_end > 1)
            bad("drift bounds", "must lie in [0,1]");
    }
    if (spec.drift_above_frac < 0 || spec.drift_above_frac > 1)
        bad("drift_above_frac", "must lie in [0,1]");

    if (spec.p_common <= 0 || spec.p_common > 1) bad("p_common", "must lie in (0,1]");
    if (spec.plant_boost < 0) bad("plant_boost", "must be non-negative");
    if (spec.foreign_scale < 0 || spec.foreign_scale > 1)
        bad("foreign_scale", "must lie in [0,1]");
    if (spec.skip_prob < 0 || spec.skip_prob >= 1) bad("skip_prob", "must lie in [0,1)");

    std::set<std::string> above(spec.plant_above.begin(), spec.plant_above.end());
    for (const auto& p : spec.plant_below)
        if (above.count(p)) bad("plant_below", "phrase '" + p + "' also planted above");

    std::map<std::string, labeling::DayLabel> token_class;
    for (const auto& p : spec.plant_above)
        for (const auto& t : text::tokenize(p)) token_class[t] = labeling::DayLabel::Above;
    for (const auto& p : spec.plant_below)
        for (const auto& t : text::tokenize(p)) {
            auto it = token_class.find(t);
            if (it != token_class.end() && it->second == labeling::DayLabel::Above)
                bad("plant_below", "token '" + t + "' also appears in an above phrase");
        }
}

namespace {

std::array<double, 3> split_csv3(const std::string& field, const std::string& value) {
    std::array<double, 3> out{};
    std::istringstream ss(value);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 3) bad(field, "needs exactly 3 comma-separated values");
        out[i++] = std::stod(part);
    }
    if (i != 3) bad(field, "needs exactly 3 comma-separated values");
    return out;
}

std::array<double, 7> split_csv7(const std::string& field, const std::string& value) {
    std::array<double, 7> out{};
    std::istringstream ss(value);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 7) bad(field, "needs exactly 7 comma-separated values");
        out[i++] = std::stod(part);
    }
    if (i != 7) bad(field, "needs exactly 7 comma-separated values");
    return out;
}

std::vector<std::string> split_phrases(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream ss(value);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto b = part.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        auto e = part.find_last_not_of(" \t");
        out.push_back(part.substr(b, e - b + 1));
    }
    return out;
}

} // namespace

SynthSpec parse_spec(const std::map<std::string, std::string>& kv) {
    SynthSpec spec;
    for (const auto& [key, value] : kv) {
        try {
            if (key == "users") spec.users = std::stoul(value);
            else if (key == "days") spec.days = std::stoul(value);
            else if (key == "seed") spec.seed = std::stoull(value);
            else if (key == "start_date") spec.start_date = Date::parse(value);
            else if (key == "goal_min") spec.goal_min = std::stol(value);
            else if (key == "goal_max") spec.goal_max = std::stol(value);
            else if (key == "share_below") spec.share_below = std::stod(value);
            else if (key == "share_ontarget") spec.share_ontarget = std::stod(value);
            else if (key == "share_above") spec.share_above = std::stod(value);
            else if (key == "day_probs_below") spec.day_probs_below = split_csv3(key, value);
            else if (key == "day_probs_ontarget")
                spec.day_probs_ontarget = split_csv3(key, value);
            else if (key == "day_probs_above") spec.day_probs_above = split_csv3(key, value);
            else if (key == "weekday_above") spec.weekday_above = split_csv7(key, value);
            else if (key == "weekday_below") spec.weekday_below = split_csv7(key, value);
            else if (key == "drift_below_start") spec.drift_below_start = std::stod(value);
            else if (key == "drift_below_end") spec.drift_below_end = std::stod(value);
            else if (key == "drift_above_frac") spec.drift_above_frac = std::stod(value);
            else if (key == "p_common") spec.p_common = std::stod(value);
            else if (key == "plant_boost") spec.plant_boost = std::stod(value);
            else if (key == "plant_above") spec.plant_above = split_phrases(value);
            else if (key == "plant_below") spec.plant_below = split_phrases(value);
            else if (key == "blobs") spec.blobs = std::stoul(value);
            else if (key == "foreign_scale") spec.foreign_scale = std::stod(value);
            else if (key == "skip_prob") spec.skip_prob = std::stod(value);
            else bad(key, "is not a recognized spec key");
        } catch (const std::invalid_argument& e) {
            std::string what = e.what();
            if (what.rfind("synth spec:", 0) == 0) throw;
            bad(key, "has unparsable value '" + value + "'");
        } catch (const std::out_of_range&) {
            bad(key, "has out-of-range value '" + value + "'");
        }
    }
    return spec;
}

SynthResult generate(const SynthSpec& spec) {
    validate(spec);

    auto phrases = phrase_list(spec);
    std::vector<int> affinity(phrases.size(), -1); // -1 none, else DayLabel value
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        if (std::count(spec.plant_above.begin(), spec.plant_above.end(), phrases[i]))
            affinity[i] = static_cast<int>(labeling::DayLabel::Above);
        if (std::count(spec.plant_below.begin(), spec.plant_below.end(), phrases[i]))
            affinity[i] = static_cast<int>(labeling::DayLabel::Below);
    }

    auto n_below = static_cast<std::size_t>(
        std::llround(spec.share_below * static_cast<double>(spec.users)));
    auto n_ontarget = static_cast<std::size_t>(
        std::llround(spec.share_ontarget * static_cast<double>(spec.users)));
    if (n_below + n_ontarget > spec.users) n_ontarget = spec.users - n_below;

    static const char* kMeals[4] = {"Breakfast", "Lunch", "Dinner", "Snack"};
    std::uint64_t base_seed = rng::mix_seed(spec.seed, "synth");

    SynthResult result;
    result.corpus.reserve(spec.users);

    for (std::size_t u = 0; u < spec.users; ++u) {
        char idbuf[16];
        std::snprintf(idbuf, sizeof idbuf, "u%05zu", u);
        std::string uid = idbuf;

        labeling::DayLabel cls = u < n_below ? labeling::DayLabel::Below
                                 : u < n_below + n_ontarget ? labeling::DayLabel::OnTarget
                                                            : labeling::DayLabel::Above;
        result.truth.user_class.emplace(uid, cls);
        std::size_t blob = 0;
        if (spec.blobs > 0) {
            blob = u % spec.blobs;
            result.truth.user_cluster.emplace(uid, blob);
        }

        rng::Engine eng(rng::mix_seed(base_seed, uid));
        long goal = spec.goal_min +
                    static_cast<long>(rng::next_below(
                        eng, static_cast<std::uint64_t>(spec.goal_max - spec.goal_min) + 1));

        const std::array<double, 3>& class_probs =
            cls == labeling::DayLabel::Below      ? spec.day_probs_below
            : cls == labeling::DayLabel::OnTarget ? spec.day_probs_ontarget
                                                  : spec.day_probs_above;

        corpus::UserDiary diary;
        diary.user_id = uid;
        diary.days.reserve(spec.days);

        for (std::size_t d = 0; d < spec.days; ++d) {
            Date date = spec.start_date.plus_days(static_cast<long>(d));
            bool skip = spec.skip_prob > 0 && rng::next_unit(eng) < spec.skip_prob;

            double p_below, p_ontarget, p_above;
            if (spec.weekday_above) {
                int wd = date.weekday_iso() - 1;
                p_above = (*spec.weekday_above)[wd];
                p_below = (*spec.weekday_below)[wd];
                p_ontarget = 1.0 - p_above - p_below;
            } else if (spec.drift_below_start) {
                double t = spec.days == 1 ? 0.0
                                          : static_cast<double>(d) /
                                                static_cast<double>(spec.days - 1);
                p_below = *spec.drift_below_start +
                          (*spec.drift_below_end - *spec.drift_below_start) * t;
                p_above = (1.0 - p_below) * spec.drift_above_frac;
                p_ontarget = 1.0 - p_below - p_above;
            } else {
                p_below = class_probs[0];
                p_ontarget = class_probs[1];
                p_above = class_probs[2];
            }

            double r = rng::next_unit(eng);
            labeling::DayLabel outcome = r < p_below ? labeling::DayLabel::Below
                                         : r < p_below + p_ontarget
                                             ? labeling::DayLabel::OnTarget
                                             : labeling::DayLabel::Above;

            long actual;
            if (skip) {
                actual = static_cast<long>(rng::next_below(eng, 100));
            } else if (outcome == labeling::DayLabel::Above) {
                auto spread = static_cast<std::uint64_t>(
                    std::ceil(0.3 * static_cast<double>(goal)));
                actual = goal + 1 + static_cast<long>(rng::next_below(eng, spread));
            } else if (outcome == labeling::DayLabel::OnTarget) {
                auto spread = static_cast<std::uint64_t>(
                    std::floor(0.2 * static_cast<double>(goal)));
                actual = goal - static_cast<long>(rng::next_below(eng, spread + 1));
            } else {
                long hi = goal - static_cast<long>(std::floor(0.2 * static_cast<double>(goal))) - 1;
                actual = 100 + static_cast<long>(
                                   rng::next_below(eng, static_cast<std::uint64_t>(hi - 100) + 1));
            }

            std::vector<std::size_t> picked;
            for (std::size_t p = 0; p < phrases.size(); ++p) {
                double prob = spec.p_common;
                if (affinity[p] >= 0 && affinity[p] == static_cast<int>(cls))
                    prob *= spec.plant_boost;
                if (spec.blobs > 0 && p % spec.blobs != blob) prob *= spec.foreign_scale;
                if (prob > 1) prob = 1;
                if (rng::next_unit(eng) < prob) picked.push_back(p);
            }
            if (picked.empty()) picked.push_back(rng::next_below(eng, phrases.size()));

            corpus::DayRecord day;
            day.user_id = uid;
            day.date = date;
            day.goal = goal;
            day.actual = actual;
            auto m = static_cast<long>(picked.size());
            long q = actual / m;
            long rem = actual % m;
            for (std::size_t i = 0; i < picked.size(); ++i) {
                corpus::FoodEntry entry;
                entry.user_id = uid;
                entry.date = date;
                entry.meal_name = kMeals[i % 4];
                entry.text = phrases[picked[i]];
                entry.calories = q + (static_cast<long>(i) < rem ? 1 : 0);
                day.entries.push_back(std::move(entry));
            }
            diary.days.push_back(std::move(day));
        }
        result.corpus.push_back(std::move(diary));
    }

    std::sort(result.corpus.begin(), result.corpus.end(),
              [](const corpus::UserDiary& a, const corpus::UserDiary& b) {
                  return a.user_id < b.user_id;
              });

    for (const auto& p : spec.plant_above)
        for (const auto& t : text::tokenize(p))
            result.truth.token_affinity[t] = labeling::DayLabel::Above;
    for (const auto& p : spec.plant_below)
        for (const auto& t : text::tokenize(p))
            result.truth.token_affinity[t] = labeling::DayLabel::Below;

    return result;
}

void save_truth(const GroundTruth& truth, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "# ground truth sidecar\n";
    for (const auto& [uid, cls] : truth.user_class) {
        out << "user\t" << uid << '\t' << labeling::label_name(cls) << '\t';
        auto it = truth.user_cluster.find(uid);
        if (it != truth.user_cluster.end()) out << it->second;
        out << '\n';
    }
    for (const auto& [token, cls] : truth.token_affinity)
        out << "token\t" << token << '\t' << labeling::label_name(cls) << '\n';
    if (!out) throw std::runtime_error(path + ": write failed");
}

namespace {

labeling::DayLabel parse_label(const std::string& s, const std::string& path,
                               std::size_t lineno) {
    if (s == "below") return labeling::DayLabel::Below;
    if (s == "on-target") return labeling::DayLabel::OnTarget;
    if (s == "above") return labeling::DayLabel::Above;
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown label '" +
                             s + "'");
}

} // namespace

GroundTruth load_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    GroundTruth truth;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = io::split_tsv(line);
        if (fields[0] == "user" && fields.size() == 4) {
            truth.user_class.emplace(fields[1], parse_label(fields[2], path, lineno));
            if (!fields[3].empty())
                truth.user_cluster.emplace(fields[1], std::stoul(fields[3]));
        } else if (fields[0] == "token" && fields.size() == 3) {
            truth.token_affinity.emplace(fields[1], parse_label(fields[2], path, lineno));
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unrecognized row");
        }
    }
    return truth;
}

BlobData make_blobs(const BlobSpec& spec) {
    if (spec.blobs == 0 || spec.points_per_blob == 0 || spec.dims == 0)
        throw std::invalid_argument("blob spec requires positive blobs, points, dims");
    rng::Engine eng(rng::mix_seed(spec.seed, "blobs"));

    Eigen::MatrixXd centers(static_cast<Eigen::Index>(spec.blobs),
                            static_cast<Eigen::Index>(spec.dims));
    if (spec.blobs <= spec.dims) {
        centers.setZero();
        for (std::size_t b = 0; b < spec.blobs; ++b)
            centers(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) =
                spec.center_spread;
    } else {
        for (std::size_t b = 0; b < spec.blobs; ++b)
            for (std::size_t j = 0; j < spec.dims; ++j)
                centers(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)) =
                    spec.center_spread * rng::next_normal(eng);
    }

    BlobData data;
    auto n = spec.blobs * spec.points_per_blob;
    data.X = Eigen::MatrixXd(static_cast<Eigen::Index>(n),
                             static_cast<Eigen::Index>(spec.dims));
    data.labels.reserve(n);
    std::size_t row = 0;
    for (std::size_t b = 0; b < spec.blobs; ++b) {
        for (std::size_t p = 0; p < spec.points_per_blob; ++p, ++row) {
            for (std::size_t j = 0; j < spec.dims; ++j)
                data.X(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) =
                    centers(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)) +
                    spec.sigma * rng::next_normal(eng);
            data.labels.push_back(b);
        }
    }
    return data;
}

} // namespace dietmine::synth
