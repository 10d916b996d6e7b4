#pragma once

// Generators and independent oracles shared by the test suites.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cursim/cluster.hpp"
#include "cursim/linalg.hpp"
#include "cursim/random.hpp"
#include "cursim/synth.hpp"

namespace cursim::testing {

inline Matrix random_matrix(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
    Rng rng(seed);
    return gaussian_matrix(m, n, rng);
}

/// m x n Gaussian-factor product of rank r (almost surely).
inline Matrix planted_rank(Eigen::Index m, Eigen::Index n, Eigen::Index r, std::uint64_t seed) {
    Rng rng(seed);
    const Matrix left = gaussian_matrix(m, r, rng);
    const Matrix right = gaussian_matrix(r, n, rng);
    return left * right;
}

/// Normal-equations pseudoinverse for full column rank.
inline Matrix pinv_full_column_rank(const Matrix& a) {
    return (a.transpose() * a).inverse() * a.transpose();
}

inline Matrix pinv_full_row_rank(const Matrix& a) {
    return a.transpose() * (a * a.transpose()).inverse();
}

inline Matrix naive_power(const Matrix& a, std::size_t p) {
    Matrix out = a;
    for (std::size_t i = 1; i < p; ++i) out = out * a;
    return out;
}

/// Noise-free union instance shaped like the property suites:
/// M <= 4 subspaces, d_i <= 4, ambient 30, n_i = d_i + 3.
inline SyntheticInstance noise_free_instance(std::uint64_t seed, std::size_t ambient = 30, bool shuffle = true) {
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> count(1, 4);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    const std::size_t m = count(rng);
    std::vector<std::size_t> dims(m);
    for (auto& d : dims) d = dim(rng);
    std::vector<std::size_t> pts(m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = dims[i] + 3;
    const UnionModel model = random_union_model(ambient, dims, mix_seed(seed, 11));
    return sample_instance(model, pts, 0.0, mix_seed(seed, 12), shuffle);
}

/// Column order that groups points by their true label.
inline std::vector<Eigen::Index> grouping_order(const LabelVector& truth) {
    std::vector<Eigen::Index> order(truth.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return truth.labels[static_cast<std::size_t>(a)] < truth.labels[static_cast<std::size_t>(b)];
    });
    return order;
}

/// Frobenius mass of Y outside the blocks (row label group == column label
/// group). Rows of Y are labelled by `row_labels`.
inline double off_block_mass(const Matrix& y, const std::vector<std::size_t>& row_labels,
                             const std::vector<std::size_t>& col_labels) {
    double mass = 0.0;
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index j = 0; j < y.cols(); ++j)
            if (row_labels[static_cast<std::size_t>(i)] != col_labels[static_cast<std::size_t>(j)])
                mass += y(i, j) * y(i, j);
    return std::sqrt(mass);
}

/// Ncut by enumerating every unordered edge once.
inline double brute_force_ncut(const Matrix& w, const std::vector<std::size_t>& labels, std::size_t clusters) {
    const Eigen::Index n = w.rows();
    std::vector<double> cut(clusters, 0.0), vol(clusters, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) vol[labels[static_cast<std::size_t>(i)]] += w(i, j);
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto a = labels[static_cast<std::size_t>(i)];
            const auto b = labels[static_cast<std::size_t>(j)];
            if (a == b) continue;
            cut[a] += w(i, j);
            cut[b] += w(i, j);
        }
    double total = 0.0;
    for (std::size_t c = 0; c < clusters; ++c) total += vol[c] < 1e-12 ? 1.0 : cut[c] / vol[c];
    return 0.5 * total;
}

/// Random symmetric nonnegative weights on n nodes.
inline Matrix random_graph(Eigen::Index n, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = unit(rng) < 0.3 ? 0.0 : unit(rng);
            w(i, j) = v;
            w(j, i) = v;
        }
    return w;
}

/// Two labelings describe the same partition (equal up to relabeling).
inline bool same_partition(const LabelVector& a, const LabelVector& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if ((a.labels[i] == a.labels[j]) != (b.labels[i] == b.labels[j])) return false;
    return true;
}

/// Orthonormal basis of the orthogonal complement of span(v) (v has orthonormal columns).
inline Matrix orthocomplement(const Matrix& v) {
    const Eigen::Index n = v.rows();
    const Matrix proj = Matrix::Identity(n, n) - v * v.transpose();
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(proj);
    // eigenvalues 0 (multiplicity rank v) then 1
    return eig.eigenvectors().rightCols(n - v.cols());
}

}  // namespace cursim::testing
