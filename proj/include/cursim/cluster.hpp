#pragma once

// Final-stage clustering back-ends and partition metrics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cursim/error.hpp"
#include "cursim/linalg.hpp"
#include "cursim/random.hpp"
#include "cursim/simgen.hpp"

namespace cursim {

/// Cluster id per data point; every id is < m_clusters.
struct LabelVector {
    std::vector<std::size_t> labels;
    std::size_t m_clusters = 0;

    std::size_t size() const { return labels.size(); }
    friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

inline LabelVector make_labels(std::vector<std::size_t> labels) {
    std::size_t m = 0;
    for (auto l : labels) m = std::max(m, l + 1);
    return LabelVector{std::move(labels), m};
}

/// Disjoint, exhaustive groups of point indices, one per label id.
using Partition = std::vector<std::vector<std::size_t>>;

inline Partition to_partition(const LabelVector& lv) {
    Partition groups(lv.m_clusters);
    for (std::size_t i = 0; i < lv.labels.size(); ++i) groups[lv.labels[i]].push_back(i);
    return groups;
}

struct KMeansOptions {
    std::size_t restarts = 20;
    std::size_t max_iterations = 300;
    double relative_tolerance = 1e-8;
};

struct KMeansResult {
    LabelVector labels;
    Matrix centroids;  // m_clusters x dim
    double wcss = 0.0;
    /// Objective after each Lloyd iteration of the winning restart.
    std::vector<double> history;
};

namespace detail {

inline double squared_distance(const Matrix& points, Eigen::Index i, const Matrix& centroids, Eigen::Index c) {
    return (points.row(i) - centroids.row(c)).squaredNorm();
}

inline Matrix kmeanspp_seed(const Matrix& points, std::size_t k, Rng& rng) {
    const Eigen::Index n = points.rows();
    Matrix centroids(static_cast<Eigen::Index>(k), points.cols());
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);

    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    Eigen::Index pick = first(rng);
    centroids.row(0) = points.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;

    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& d = d2[static_cast<std::size_t>(i)];
            d = std::min(d, squared_distance(points, i, centroids, static_cast<Eigen::Index>(c - 1)));
            total += d;
        }
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double acc = 0.0;
            pick = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2[static_cast<std::size_t>(i)];
                if (acc >= target && d2[static_cast<std::size_t>(i)] > 0.0) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) {
                for (Eigen::Index i = n - 1; i >= 0; --i)
                    if (d2[static_cast<std::size_t>(i)] > 0.0) {
                        pick = i;
                        break;
                    }
            }
        } else {
            // every point coincides with a centroid already
            pick = 0;
            while (chosen[static_cast<std::size_t>(pick)] && pick + 1 < n) ++pick;
        }
        centroids.row(static_cast<Eigen::Index>(c)) = points.row(pick);
        chosen[static_cast<std::size_t>(pick)] = true;
    }
    return centroids;
}

inline double assign(const Matrix& points, const Matrix& centroids, std::vector<std::size_t>& labels) {
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
            const double d = squared_distance(points, i, centroids, c);
            if (d < best) {
                best = d;
                arg = static_cast<std::size_t>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = arg;
        wcss += best;
    }
    return wcss;
}

// Moves the point farthest from its centroid into each empty cluster.
inline void repair_empty(const Matrix& points, Matrix& centroids, std::vector<std::size_t>& labels) {
    const std::size_t k = static_cast<std::size_t>(centroids.rows());
    std::vector<std::size_t> counts(k, 0);
    for (auto l : labels) ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] != 0) continue;
        double far = -1.0;
        Eigen::Index arg = -1;
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            const std::size_t own = labels[static_cast<std::size_t>(i)];
            if (counts[own] <= 1) continue;
            const double d = squared_distance(points, i, centroids, static_cast<Eigen::Index>(own));
            if (d > far) {
                far = d;
                arg = i;
            }
        }
        if (arg < 0) break;
        --counts[labels[static_cast<std::size_t>(arg)]];
        labels[static_cast<std::size_t>(arg)] = c;
        counts[c] = 1;
        centroids.row(static_cast<Eigen::Index>(c)) = points.row(arg);
    }
}

inline void update_centroids(const Matrix& points, const std::vector<std::size_t>& labels, Matrix& centroids) {
    const Eigen::Index k = centroids.rows();
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const auto l = labels[static_cast<std::size_t>(i)];
        sums.row(static_cast<Eigen::Index>(l)) += points.row(i);
        ++counts[l];
    }
    for (Eigen::Index c = 0; c < k; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0)
            centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
}

inline double objective(const Matrix& points, const Matrix& centroids, const std::vector<std::size_t>& labels) {
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        wcss += squared_distance(points, i, centroids, static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]));
    return wcss;
}

}  // namespace detail

/// Lloyd's k-means on the rows of `points` with k-means++ seeding; the best
/// of `restarts` runs by within-cluster sum of squares wins. Deterministic
/// given the seed.
inline KMeansResult kmeans_detailed(const Matrix& points, std::size_t m_clusters, std::uint64_t seed,
                                    const KMeansOptions& opts = {}) {
    require_finite(points, "kmeans points");
    const auto n = static_cast<std::size_t>(points.rows());
    if (m_clusters < 1 || m_clusters > n) throw InputError("kmeans: need 1 <= M <= number of points");

    Rng rng(seed);
    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    const std::size_t restarts = std::max<std::size_t>(1, opts.restarts);

    for (std::size_t run = 0; run < restarts; ++run) {
        Matrix centroids = detail::kmeanspp_seed(points, m_clusters, rng);
        std::vector<std::size_t> labels(n, 0);
        std::vector<double> history;
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t it = 0; it < opts.max_iterations; ++it) {
            const std::vector<std::size_t> old = labels;
            detail::assign(points, centroids, labels);
            detail::repair_empty(points, centroids, labels);
            detail::update_centroids(points, labels, centroids);
            const double cur = detail::objective(points, centroids, labels);
            history.push_back(cur);
            const bool stalled = std::isfinite(prev) && std::abs(prev - cur) <= opts.relative_tolerance * std::max(prev, 1e-300);
            if ((it > 0 && labels == old) || stalled || cur == 0.0) break;
            prev = cur;
        }
        const double wcss = history.back();
        if (wcss < best.wcss) {
            best.wcss = wcss;
            best.labels = LabelVector{labels, m_clusters};
            best.centroids = centroids;
            best.history = std::move(history);
        }
    }
    return best;
}

inline LabelVector kmeans(const Matrix& points, std::size_t m_clusters, std::uint64_t seed, std::size_t restarts = 20) {
    KMeansOptions opts;
    opts.restarts = restarts;
    return kmeans_detailed(points, m_clusters, seed, opts).labels;
}

namespace detail {

inline void require_similarity(const SimilarityMatrix& sim) {
    require_finite(sim.entries, "similarity");
    if (sim.entries.rows() != sim.entries.cols()) throw InputError("similarity matrix is not square");
}

inline Vector degrees(const Matrix& s) { return s.rowwise().sum(); }

}  // namespace detail

/// Spectral clustering on D^{-1/2} S D^{-1/2}: the M leading eigenvectors,
/// rows normalized to unit length, then k-means.
inline LabelVector spectral_cluster(const SimilarityMatrix& sim, std::size_t m_clusters, std::uint64_t seed) {
    detail::require_similarity(sim);
    const Eigen::Index n = sim.entries.rows();
    if (m_clusters < 1 || m_clusters > static_cast<std::size_t>(n))
        throw InputError("spectral_cluster: need 1 <= M <= n");

    const Vector inv_sqrt = detail::degrees(sim.entries).cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
    const Matrix normalized = symmetrized(inv_sqrt.asDiagonal() * sim.entries * inv_sqrt.asDiagonal());

    const Eigen::SelfAdjointEigenSolver<Matrix> eig(normalized);
    const auto m = static_cast<Eigen::Index>(m_clusters);
    // eigenvalues come back ascending
    Matrix embedding = eig.eigenvectors().rightCols(m).rowwise().reverse();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }
    return kmeans(embedding, m_clusters, seed);
}

/// Principal coordinate clustering: k-means on the n rows of (Sigma_M V_M^T)^T
/// from the order-M skinny SVD of the similarity matrix.
inline LabelVector pcc_cluster(const SimilarityMatrix& sim, std::size_t m_clusters, std::uint64_t seed) {
    detail::require_similarity(sim);
    const auto n = static_cast<std::size_t>(sim.entries.rows());
    if (m_clusters < 1 || m_clusters > n) throw InputError("pcc_cluster: need 1 <= M <= n");

    const SvdTriple svd = skinny_svd(sim.entries, m_clusters);
    if (svd.rank() == 0) return LabelVector{std::vector<std::size_t>(n, 0), m_clusters};
    const Matrix coords = svd.right * svd.singulars.asDiagonal();
    return kmeans(coords, m_clusters, seed);
}

/// Components of the graph with an edge wherever the entry exceeds the
/// relative binarization cutoff. Ids follow first-seen order.
inline LabelVector connected_components(const SimilarityMatrix& sim) {
    detail::require_similarity(sim);
    const Eigen::Index n = sim.entries.rows();
    const double cutoff = binarization_cutoff(sim.entries);
    constexpr auto kUnset = std::numeric_limits<std::size_t>::max();

    std::vector<std::size_t> labels(static_cast<std::size_t>(n), kUnset);
    std::size_t next = 0;
    for (Eigen::Index start = 0; start < n; ++start) {
        if (labels[static_cast<std::size_t>(start)] != kUnset) continue;
        std::queue<Eigen::Index> frontier;
        frontier.push(start);
        labels[static_cast<std::size_t>(start)] = next;
        while (!frontier.empty()) {
            const Eigen::Index v = frontier.front();
            frontier.pop();
            for (Eigen::Index w = 0; w < n; ++w) {
                if (labels[static_cast<std::size_t>(w)] != kUnset) continue;
                if (sim.entries(v, w) > cutoff || sim.entries(w, v) > cutoff) {
                    labels[static_cast<std::size_t>(w)] = next;
                    frontier.push(w);
                }
            }
        }
        ++next;
    }
    return LabelVector{std::move(labels), next};
}

/// Normalized cut  1/2 * sum_i cut(A_i) / vol(A_i). A cluster whose volume is
/// below 1e-12 (including an unused label id) contributes the maximal term 1.
inline double ncut_value(const SimilarityMatrix& sim, const LabelVector& labels) {
    detail::require_similarity(sim);
    const Eigen::Index n = sim.entries.rows();
    if (labels.size() != static_cast<std::size_t>(n)) throw InputError("ncut_value: label count mismatch");
    for (auto l : labels.labels)
        if (l >= labels.m_clusters) throw InputError("ncut_value: label out of range");

    std::vector<double> cut(labels.m_clusters, 0.0);
    std::vector<double> vol(labels.m_clusters, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto li = labels.labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j) {
            const double w = sim.entries(i, j);
            vol[li] += w;
            if (labels.labels[static_cast<std::size_t>(j)] != li) cut[li] += w;
        }
    }
    double total = 0.0;
    for (std::size_t c = 0; c < labels.m_clusters; ++c) total += vol[c] < 1e-12 ? 1.0 : cut[c] / vol[c];
    return 0.5 * total;
}

inline constexpr std::size_t kMaxMatchedClusters = 8;

/// Percentage of points misassigned under the best relabeling, found by
/// exhaustive search over label permutations.
inline double clustering_error(const LabelVector& predicted, const LabelVector& truth) {
    if (predicted.size() != truth.size()) throw InputError("clustering_error: length mismatch");
    if (predicted.size() == 0) throw InputError("clustering_error: empty labels");
    const std::size_t k = std::max(predicted.m_clusters, truth.m_clusters);
    if (k > kMaxMatchedClusters) throw InputError("clustering_error: more than 8 clusters");

    std::array<std::array<std::size_t, kMaxMatchedClusters>, kMaxMatchedClusters> confusion{};
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted.labels[i] >= k || truth.labels[i] >= k) throw InputError("clustering_error: label out of range");
        ++confusion[predicted.labels[i]][truth.labels[i]];
    }
    std::array<std::size_t, kMaxMatchedClusters> perm{};
    std::iota(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k), std::size_t{0});
    std::size_t best_hits = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t p = 0; p < k; ++p) hits += confusion[p][perm[p]];
        best_hits = std::max(best_hits, hits);
    } while (std::next_permutation(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k)));

    const auto n = static_cast<double>(predicted.size());
    return 100.0 * (n - static_cast<double>(best_hits)) / n;
}

}  // namespace cursim
