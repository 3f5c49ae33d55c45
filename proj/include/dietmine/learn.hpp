#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dietmine/features.hpp"
#include "dietmine/labeling.hpp"

namespace dietmine::learn {

/// Dense training set. Rows of X are users, y in {+1 Above, -1 Below}.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> users; // row -> user id
};

/// Assembles rows for users labeled Above or Below; other users are skipped.
/// Row order follows the vectors argument.
Dataset make_dataset(const std::vector<features::FeatureVector>& vectors,
                     const std::vector<labeling::UserLabel>& labels,
                     std::size_t feature_count);

/// Keeps the minority class whole, down-samples the majority class uniformly
/// without replacement, and shuffles the result. Throws std::invalid_argument
/// when a class is empty.
Dataset balance(const Dataset& data, std::uint64_t seed);

struct TrainOptions {
    double C = 1.0;
    std::size_t max_epochs = 500;
    double tol = 1e-6;
    std::uint64_t seed = 0;
};

struct LinearModel {
    Eigen::VectorXd w;
    double bias = 0;
    double C = 1.0;
    std::uint64_t seed = 0;
    std::size_t epochs = 0;
    std::vector<double> objective_history; // best objective seen per epoch

    double score(const Eigen::VectorXd& x) const { return w.dot(x) + bias; }
    int predict(const Eigen::VectorXd& x) const { return score(x) >= 0 ? 1 : -1; }
};

/// (1/2)||w||^2 + C * sum_i max(0, 1 - y_i (w.x_i + b))
double svm_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C,
                     const Eigen::VectorXd& w, double bias);

/// Subgradient of the scaled objective f/(nC) = (lambda/2)||w||^2 +
/// (1/n) sum hinge, with lambda = 1/(nC); returned as (grad_w, grad_b).
std::pair<Eigen::VectorXd, double> svm_subgradient(const Eigen::MatrixXd& X,
                                                   const Eigen::VectorXd& y, double C,
                                                   const Eigen::VectorXd& w, double bias);

/// Deterministic full-batch subgradient descent with 1/(lambda t) steps.
/// Returns the best iterate by objective. Throws on non-finite inputs.
LinearModel train(const Dataset& data, const TrainOptions& opts);

struct FoldMetrics {
    double accuracy = 0;
    std::optional<double> precision; // absent when no positive prediction
    std::optional<double> recall;    // absent when no positive example
};

struct EvalReport {
    std::vector<FoldMetrics> folds;
    double accuracy_mean = 0, accuracy_std = 0;
    double precision_mean = 0, precision_std = 0; // over folds where defined
    double recall_mean = 0, recall_std = 0;
    std::size_t precision_folds = 0;
    std::size_t recall_folds = 0;
};

/// Stratified k-fold cross validation; positive class = Above (+1). Fold
/// assignment uses a seeded shuffle per class, then round-robin.
EvalReport cross_validate(const Dataset& data, std::size_t folds,
                          const TrainOptions& opts);

struct RankedFeature {
    std::string name;
    double weight = 0;
    std::string example_text; // most-distinct-user entry text containing it
};

struct TopFeatures {
    std::vector<RankedFeature> positive; // most positive first
    std::vector<RankedFeature> negative; // most negative first
};

/// Top-k features by signed weight with example foods looked up from the
/// corpus: the exact entry text (whitespace-normalized) containing the
/// feature that was logged by the most distinct users, ties lexicographic.
TopFeatures top_features(const LinearModel& model, const features::FeatureVocabulary& vocab,
                         const corpus::Corpus& corpus,
                         const taxonomy::AnnotationIndex* index, std::size_t k = 10);

struct MarginGroup {
    std::size_t group = 0;      // 0 = farthest below the boundary
    std::size_t users = 0;
    std::array<double, 3> fraction{}; // macro-averaged day-label distribution
    double mean_days = 0;
};

struct MarginProfile {
    std::vector<MarginGroup> groups;
};

/// Sorts users ascending by decision score and splits them into `groups`
/// nearly equal percentile groups (remainder spread over the earliest
/// groups); per group macro-averages day-label distributions.
MarginProfile margin_profile(const LinearModel& model,
                             const std::vector<features::FeatureVector>& vectors,
                             const corpus::Corpus& corpus,
                             const labeling::LabelPolicy& policy, std::size_t groups = 20);

/// Versioned text model file: header lines then name<TAB>weight sorted by name.
void save_model(const LinearModel& model, const features::FeatureVocabulary& vocab,
                const std::string& path);

struct SavedModel {
    LinearModel model;
    features::Space space = features::Space::token;
    std::vector<std::string> names; // feature id -> name, as saved
};

SavedModel load_model(const std::string& path);

} // namespace dietmine::learn
