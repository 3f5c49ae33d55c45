#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "dietmine/features.hpp"
#include "dietmine/labeling.hpp"

namespace dietmine::cluster {

struct ClusterModel {
    std::size_t k = 0;
    Eigen::MatrixXd centroids;           // k x d
    std::vector<std::size_t> assignment; // row -> cluster id
    std::vector<std::size_t> sizes;      // cluster id -> member count
    double sse = 0;                      // within-cluster sum of squares
    std::vector<double> sse_history;     // per Lloyd iteration of the last fit
};

struct KmeansOptions {
    std::size_t max_iterations = 100;
};

/// Lloyd's algorithm with k-means++ seeding. Assignment tie-breaks pick the
/// lowest cluster id; an emptied cluster is re-seeded from the point farthest
/// from its centroid. Throws std::invalid_argument when k exceeds the number
/// of distinct rows or k == 0.
ClusterModel kmeans(const Eigen::MatrixXd& X, std::size_t k, std::uint64_t seed,
                    const KmeansOptions& opts = {});

/// Spherical-Gaussian BIC of a clustering restricted to the given rows:
/// log-likelihood under a shared per-cluster variance minus (p/2) log n with
/// p = (K - 1) + K * d + 1. Larger is better.
double spherical_bic(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows,
                     const Eigen::MatrixXd& centroids,
                     const std::vector<std::size_t>& assignment);

/// X-Means: starts at k_min, repeatedly tries a deterministic 2-way split of
/// each cluster and keeps splits that raise the spherical BIC on that
/// cluster's points, refining globally after each round, until no split is
/// accepted or k_max is reached.
ClusterModel xmeans(const Eigen::MatrixXd& X, std::size_t k_min, std::size_t k_max,
                    std::uint64_t seed, const KmeansOptions& opts = {});

struct RankGain {
    std::string token;
    std::size_t global_rank = 0;  // 1 = largest mean weight
    std::size_t cluster_rank = 0;
    long gain = 0;                // global_rank - cluster_rank
};

struct RankGainTable {
    std::vector<std::vector<RankGain>> per_cluster; // top gains, descending
};

/// Ranks features by mean normalized value over all users (global) and over
/// each cluster's members; reports features whose cluster rank is at most
/// rank_cap, sorted by gain descending, top `top_k` per cluster. Rank ties
/// break lexicographically by token.
RankGainTable rank_gains(const ClusterModel& model,
                         const std::vector<features::FeatureVector>& vectors,
                         const features::FeatureVocabulary& vocab,
                         std::size_t rank_cap = 40, std::size_t top_k = 10);

struct ClusterComposition {
    std::size_t size = 0;        // clustered users
    std::size_t below = 0;
    std::size_t above = 0;
    std::size_t labeled = 0;     // below + above
    int below_pct = 0;           // integer percent of labeled
    int above_pct = 0;
};

/// Tallies Below/Above modal labels per cluster; users without an
/// above-or-below label count toward size but not percentages.
std::vector<ClusterComposition> cluster_composition(
    const ClusterModel& model, const std::vector<std::string>& row_users,
    const std::vector<labeling::UserLabel>& labels);

} // namespace dietmine::cluster
