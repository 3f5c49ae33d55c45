#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dietmine/corpus.hpp"
#include "dietmine/labeling.hpp"

namespace dietmine::synth {

/// Corpus generator spec. Day-outcome precedence: weekday rates (when set)
/// beat drift (when set) beat the per-class day probabilities.
struct SynthSpec {
    std::size_t users = 100;
    std::size_t days = 60;
    std::uint64_t seed = 1;

    Date start_date{2015, 1, 5}; // a Monday

    long goal_min = 1800;
    long goal_max = 2200;

    // user true-class shares, assigned by quota in user-id order
    double share_below = 0.6;
    double share_ontarget = 0.2;
    double share_above = 0.2;

    // per-class day-label probabilities, order {below, ontarget, above}
    std::array<double, 3> day_probs_below{0.80, 0.12, 0.08};
    std::array<double, 3> day_probs_ontarget{0.15, 0.70, 0.15};
    std::array<double, 3> day_probs_above{0.12, 0.08, 0.80};

    // weekday mode: Monday-first Above/Below rates for every user
    std::optional<std::array<double, 7>> weekday_above;
    std::optional<std::array<double, 7>> weekday_below;

    // drift mode: Below probability lerped across each user's days
    std::optional<double> drift_below_start;
    std::optional<double> drift_below_end;
    double drift_above_frac = 0.3; // Above share of the non-Below remainder

    double p_common = 0.15;   // per-day emission probability per phrase
    double plant_boost = 3.0; // emission multiplier for matching class
    std::vector<std::string> plant_above; // phrases boosted for Above users
    std::vector<std::string> plant_below;

    std::size_t blobs = 0;     // 0 = no cluster structure
    double foreign_scale = 0.1; // foreign-blob phrase emission multiplier

    double skip_prob = 0; // chance a day logs under 100 kcal
};

struct GroundTruth {
    std::map<std::string, labeling::DayLabel> user_class;
    std::map<std::string, std::size_t> user_cluster; // present when blobs > 0
    std::map<std::string, labeling::DayLabel> token_affinity;
};

struct SynthResult {
    corpus::Corpus corpus;
    GroundTruth truth;
};

/// Built-in phrase vocabulary the generator draws entry texts from.
const std::vector<std::string>& builtin_phrases();

/// Throws std::invalid_argument naming the offending field.
void validate(const SynthSpec& spec);

SynthSpec parse_spec(const std::map<std::string, std::string>& kv);

/// Deterministic for a given spec; per-user RNG streams keyed off the seed
/// and user id.
SynthResult generate(const SynthSpec& spec);

void save_truth(const GroundTruth& truth, const std::string& path);
GroundTruth load_truth(const std::string& path);

struct BlobSpec {
    std::size_t blobs = 3;
    std::size_t points_per_blob = 100;
    std::size_t dims = 10;
    double center_spread = 10.0;
    double sigma = 0.5;
    std::uint64_t seed = 1;
};

struct BlobData {
    Eigen::MatrixXd X;
    std::vector<std::size_t> labels;
};

/// Gaussian blobs with axis-aligned centers when blobs <= dims (guaranteed
/// separation), random normal centers otherwise.
BlobData make_blobs(const BlobSpec& spec);

} // namespace dietmine::synth
