#include "dietmine/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "dietmine/rng.hpp"

namespace dietmine::cluster {

namespace {

struct LloydResult {
    Eigen::MatrixXd centroids;
    std::vector<std::size_t> assignment;
    std::vector<std::size_t> sizes;
    double sse = 0;
    std::vector<double> sse_history;
};

std::size_t nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
        double d = (centroids.row(c) - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::size_t>(c);
        }
    }
    return best;
}

LloydResult lloyd(const Eigen::MatrixXd& X, Eigen::MatrixXd centroids,
                  std::size_t max_iterations) {
    auto n = static_cast<std::size_t>(X.rows());
    auto k = static_cast<std::size_t>(centroids.rows());
    LloydResult res;
    res.assignment.assign(n, 0);

    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        std::vector<std::size_t> assign(n);
        for (std::size_t i = 0; i < n; ++i)
            assign[i] = nearest_centroid(centroids, X.row(static_cast<Eigen::Index>(i)));

        std::vector<std::size_t> sizes(k, 0);
        for (auto a : assign) ++sizes[a];
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t far = 0;
            double far_d = -1;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[assign[i]] <= 1) continue;
                double d = (centroids.row(static_cast<Eigen::Index>(assign[i])) -
                            X.row(static_cast<Eigen::Index>(i)))
                               .squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --sizes[assign[far]];
            assign[far] = c;
            ++sizes[c];
            centroids.row(static_cast<Eigen::Index>(c)) = X.row(static_cast<Eigen::Index>(far));
        }

        Eigen::MatrixXd means = Eigen::MatrixXd::Zero(centroids.rows(), X.cols());
        for (std::size_t i = 0; i < n; ++i)
            means.row(static_cast<Eigen::Index>(assign[i])) +=
                X.row(static_cast<Eigen::Index>(i));
        for (std::size_t c = 0; c < k; ++c)
            if (sizes[c] > 0)
                means.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(sizes[c]);
        centroids = std::move(means);

        double sse = 0;
        for (std::size_t i = 0; i < n; ++i)
            sse += (centroids.row(static_cast<Eigen::Index>(assign[i])) -
                    X.row(static_cast<Eigen::Index>(i)))
                       .squaredNorm();
        res.sse_history.push_back(sse);

        bool stable = (assign == res.assignment) && iter > 0;
        res.assignment = std::move(assign);
        res.sizes = std::move(sizes);
        if (stable) break;
    }

    res.centroids = std::move(centroids);
    res.sse = 0;
    for (std::size_t i = 0; i < n; ++i)
        res.sse += (res.centroids.row(static_cast<Eigen::Index>(res.assignment[i])) -
                    X.row(static_cast<Eigen::Index>(i)))
                       .squaredNorm();
    return res;
}

std::size_t distinct_rows(const Eigen::MatrixXd& X) {
    auto n = static_cast<std::size_t>(X.rows());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](std::size_t a, std::size_t b) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            double va = X(static_cast<Eigen::Index>(a), j);
            double vb = X(static_cast<Eigen::Index>(b), j);
            if (va != vb) return va < vb;
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t distinct = n ? 1 : 0;
    for (std::size_t i = 1; i < n; ++i)
        if (less(order[i - 1], order[i])) ++distinct;
    return distinct;
}

Eigen::MatrixXd kmeanspp_seeds(const Eigen::MatrixXd& X, std::size_t k, rng::Engine& eng) {
    auto n = static_cast<std::size_t>(X.rows());
    Eigen::MatrixXd centroids(static_cast<Eigen::Index>(k), X.cols());
    centroids.row(0) = X.row(static_cast<Eigen::Index>(rng::next_below(eng, n)));
    Eigen::VectorXd d2(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        d2(static_cast<Eigen::Index>(i)) =
            (X.row(static_cast<Eigen::Index>(i)) - centroids.row(0)).squaredNorm();
    for (std::size_t c = 1; c < k; ++c) {
        double total = d2.sum();
        std::size_t pick = 0;
        if (total > 0) {
            double r = rng::next_unit(eng) * total;
            double acc = 0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2(static_cast<Eigen::Index>(i));
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng::next_below(eng, n);
        }
        centroids.row(static_cast<Eigen::Index>(c)) = X.row(static_cast<Eigen::Index>(pick));
        for (std::size_t i = 0; i < n; ++i) {
            double d = (X.row(static_cast<Eigen::Index>(i)) -
                        centroids.row(static_cast<Eigen::Index>(c)))
                           .squaredNorm();
            auto idx = static_cast<Eigen::Index>(i);
            if (d < d2(idx)) d2(idx) = d;
        }
    }
    return centroids;
}

ClusterModel to_model(LloydResult res) {
    ClusterModel model;
    model.k = static_cast<std::size_t>(res.centroids.rows());
    model.centroids = std::move(res.centroids);
    model.assignment = std::move(res.assignment);
    model.sizes = std::move(res.sizes);
    model.sse = res.sse;
    model.sse_history = std::move(res.sse_history);
    return model;
}

} // namespace

ClusterModel kmeans(const Eigen::MatrixXd& X, std::size_t k, std::uint64_t seed,
                    const KmeansOptions& opts) {
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (X.rows() == 0) throw std::invalid_argument("no vectors to cluster");
    if (k > distinct_rows(X))
        throw std::invalid_argument("k exceeds the number of distinct vectors");
    rng::Engine eng(rng::mix_seed(seed, "kmeans++"));
    return to_model(lloyd(X, kmeanspp_seeds(X, k, eng), opts.max_iterations));
}

double spherical_bic(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows,
                     const Eigen::MatrixXd& centroids,
                     const std::vector<std::size_t>& assignment) {
    std::unordered_map<std::size_t, std::size_t> counts;
    double sse = 0;
    for (auto i : rows) {
        ++counts[assignment[i]];
        sse += (centroids.row(static_cast<Eigen::Index>(assignment[i])) -
                X.row(static_cast<Eigen::Index>(i)))
                   .squaredNorm();
    }
    auto n = static_cast<double>(rows.size());
    auto K = static_cast<double>(counts.size());
    auto d = static_cast<double>(X.cols());
    if (rows.size() <= counts.size()) return -std::numeric_limits<double>::infinity();

    double sigma2 = sse / (n - K);
    if (sigma2 < 1e-12) sigma2 = 1e-12;
    double ll = 0;
    for (const auto& [c, R] : counts)
        ll += static_cast<double>(R) * std::log(static_cast<double>(R) / n);
    ll -= n * d / 2.0 * std::log(2.0 * M_PI * sigma2);
    ll -= (n - K) / 2.0;
    double p = (K - 1) + K * d + 1;
    return ll - p / 2.0 * std::log(n);
}

ClusterModel xmeans(const Eigen::MatrixXd& X, std::size_t k_min, std::size_t k_max,
                    std::uint64_t seed, const KmeansOptions& opts) {
    if (k_min == 0 || k_min > k_max)
        throw std::invalid_argument("require 1 <= k_min <= k_max");
    ClusterModel model = kmeans(X, k_min, seed, opts);

    while (model.k < k_max) {
        std::vector<Eigen::RowVectorXd> next_centroids;
        bool any_split = false;

        for (std::size_t c = 0; c < model.k; ++c) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < model.assignment.size(); ++i)
                if (model.assignment[i] == c) members.push_back(i);

            bool split_ok = false;
            Eigen::MatrixXd children;
            if (members.size() >= 3 &&
                static_cast<std::size_t>(next_centroids.size()) + 2 +
                        (model.k - c - 1) <= k_max) {
                Eigen::RowVectorXd mu = model.centroids.row(static_cast<Eigen::Index>(c));
                std::size_t a = members[0];
                double da = -1;
                for (auto i : members) {
                    double dd = (X.row(static_cast<Eigen::Index>(i)) - mu).squaredNorm();
                    if (dd > da) {
                        da = dd;
                        a = i;
                    }
                }
                std::size_t b = members[0];
                double db = -1;
                for (auto i : members) {
                    double dd = (X.row(static_cast<Eigen::Index>(i)) -
                                 X.row(static_cast<Eigen::Index>(a)))
                                    .squaredNorm();
                    if (dd > db) {
                        db = dd;
                        b = i;
                    }
                }
                Eigen::RowVectorXd offset = (X.row(static_cast<Eigen::Index>(a)) -
                                             X.row(static_cast<Eigen::Index>(b))) /
                                            4.0;
                Eigen::MatrixXd init(2, X.cols());
                init.row(0) = mu + offset;
                init.row(1) = mu - offset;

                Eigen::MatrixXd sub(static_cast<Eigen::Index>(members.size()), X.cols());
                for (std::size_t i = 0; i < members.size(); ++i)
                    sub.row(static_cast<Eigen::Index>(i)) =
                        X.row(static_cast<Eigen::Index>(members[i]));
                auto local = lloyd(sub, std::move(init), opts.max_iterations);

                if (local.sizes[0] > 0 && local.sizes[1] > 0) {
                    std::vector<std::size_t> sub_rows(members.size());
                    std::iota(sub_rows.begin(), sub_rows.end(), 0);
                    Eigen::MatrixXd parent = mu;
                    std::vector<std::size_t> parent_assign(members.size(), 0);
                    double bic_parent = spherical_bic(sub, sub_rows, parent, parent_assign);
                    double bic_children =
                        spherical_bic(sub, sub_rows, local.centroids, local.assignment);
                    if (bic_children > bic_parent) {
                        split_ok = true;
                        children = local.centroids;
                    }
                }
            }

            if (split_ok) {
                next_centroids.emplace_back(children.row(0));
                next_centroids.emplace_back(children.row(1));
                any_split = true;
            } else {
                next_centroids.emplace_back(model.centroids.row(static_cast<Eigen::Index>(c)));
            }
        }

        if (!any_split) break;
        Eigen::MatrixXd centroids(static_cast<Eigen::Index>(next_centroids.size()), X.cols());
        for (std::size_t i = 0; i < next_centroids.size(); ++i)
            centroids.row(static_cast<Eigen::Index>(i)) = next_centroids[i];
        model = to_model(lloyd(X, std::move(centroids), opts.max_iterations));
    }
    return model;
}

namespace {

std::vector<std::size_t> rank_features(const std::vector<double>& means,
                                       const features::FeatureVocabulary& vocab) {
    auto d = means.size();
    std::vector<std::uint32_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (means[a] != means[b]) return means[a] > means[b];
        return vocab.names[a] < vocab.names[b];
    });
    std::vector<std::size_t> rank(d);
    for (std::size_t pos = 0; pos < d; ++pos) rank[order[pos]] = pos + 1;
    return rank;
}

std::vector<double> mean_values(const std::vector<features::FeatureVector>& vectors,
                                const std::vector<std::size_t>& rows, std::size_t d) {
    std::vector<double> means(d, 0.0);
    for (auto i : rows)
        for (const auto& [id, val] : vectors[i].values) means[id] += val;
    if (!rows.empty())
        for (auto& m : means) m /= static_cast<double>(rows.size());
    return means;
}

} // namespace

RankGainTable rank_gains(const ClusterModel& model,
                         const std::vector<features::FeatureVector>& vectors,
                         const features::FeatureVocabulary& vocab, std::size_t rank_cap,
                         std::size_t top_k) {
    if (model.assignment.size() != vectors.size())
        throw std::invalid_argument("assignment does not cover all vectors");
    auto d = vocab.size();

    std::vector<std::size_t> all(vectors.size());
    std::iota(all.begin(), all.end(), 0);
    auto global_rank = rank_features(mean_values(vectors, all, d), vocab);

    RankGainTable table;
    table.per_cluster.resize(model.k);
    for (std::size_t c = 0; c < model.k; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < model.assignment.size(); ++i)
            if (model.assignment[i] == c) members.push_back(i);
        if (members.empty()) continue;
        auto cluster_rank = rank_features(mean_values(vectors, members, d), vocab);

        std::vector<RankGain> gains;
        for (std::size_t f = 0; f < d; ++f) {
            if (cluster_rank[f] > rank_cap) continue;
            RankGain g;
            g.token = vocab.names[f];
            g.global_rank = global_rank[f];
            g.cluster_rank = cluster_rank[f];
            g.gain = static_cast<long>(global_rank[f]) - static_cast<long>(cluster_rank[f]);
            gains.push_back(std::move(g));
        }
        std::sort(gains.begin(), gains.end(), [](const RankGain& a, const RankGain& b) {
            if (a.gain != b.gain) return a.gain > b.gain;
            if (a.cluster_rank != b.cluster_rank) return a.cluster_rank < b.cluster_rank;
            return a.token < b.token;
        });
        if (gains.size() > top_k) gains.resize(top_k);
        table.per_cluster[c] = std::move(gains);
    }
    return table;
}

std::vector<ClusterComposition> cluster_composition(
    const ClusterModel& model, const std::vector<std::string>& row_users,
    const std::vector<labeling::UserLabel>& labels) {
    if (model.assignment.size() != row_users.size())
        throw std::invalid_argument("assignment does not cover all users");
    std::unordered_map<std::string, labeling::DayLabel> modal;
    for (const auto& ul : labels) modal.emplace(ul.user_id, ul.modal);

    std::vector<ClusterComposition> out(model.k);
    for (std::size_t i = 0; i < row_users.size(); ++i) {
        auto& comp = out[model.assignment[i]];
        ++comp.size;
        auto it = modal.find(row_users[i]);
        if (it == modal.end()) continue;
        if (it->second == labeling::DayLabel::Below) {
            ++comp.below;
            ++comp.labeled;
        } else if (it->second == labeling::DayLabel::Above) {
            ++comp.above;
            ++comp.labeled;
        }
    }
    for (auto& comp : out) {
        if (comp.labeled == 0) continue;
        comp.below_pct = static_cast<int>(std::lround(
            100.0 * static_cast<double>(comp.below) / static_cast<double>(comp.labeled)));
        comp.above_pct = static_cast<int>(std::lround(
            100.0 * static_cast<double>(comp.above) / static_cast<double>(comp.labeled)));
    }
    return out;
}

} // namespace dietmine::cluster
