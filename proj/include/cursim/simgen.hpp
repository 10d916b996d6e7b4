#pragma once

// Similarity matrices from CUR coefficient matrices Y = U^+ R.
//
// Noise-free data gets the exact construction (bin or abs of Y^T Y, raised
// to the d_max matrix power). The noisy pipelines use the remaining
// transforms here; they never take matrix powers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cursim/cur.hpp"
#include "cursim/error.hpp"
#include "cursim/linalg.hpp"

namespace cursim {

/// Entries at or below this fraction of the largest magnitude count as zero.
inline constexpr double kBinarizationTol = 1e-9;

enum class SimilarityKind { binary, absolute };

inline const char* to_string(SimilarityKind kind) {
    return kind == SimilarityKind::binary ? "binary" : "absolute";
}

/// Symmetric, nonnegative n x n matrix; binary kind holds only 0 and 1.
struct SimilarityMatrix {
    Matrix entries;
    SimilarityKind kind = SimilarityKind::absolute;
    std::string provenance;

    std::size_t n() const { return static_cast<std::size_t>(entries.rows()); }
};

/// Y = U^+ R, k x n; its columns index the data points.
struct CoefficientMatrix {
    Matrix entries;
};

inline double binarization_cutoff(const Matrix& a) { return kBinarizationTol * a.cwiseAbs().maxCoeff(); }

/// 1 where |entry| exceeds the relative binarization cutoff, else 0.
inline Matrix binarize(const Matrix& a) {
    const double cutoff = binarization_cutoff(a);
    return a.unaryExpr([cutoff](double v) { return std::abs(v) > cutoff ? 1.0 : 0.0; });
}

/// Averages a and a^T so symmetry holds bit-for-bit.
inline Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

inline CoefficientMatrix coefficient_matrix(const CurFactors& factors) {
    return CoefficientMatrix{pinv(factors.u) * factors.r};
}

/// Signed Gram matrix Y^T Y of a coefficient matrix (symmetrized).
inline Matrix coefficient_gram(const CoefficientMatrix& y) {
    return symmetrized(y.entries.transpose() * y.entries);
}

/// Q = bin(Y^T Y) or abs(Y^T Y).
inline SimilarityMatrix gram_similarity(const CoefficientMatrix& y, SimilarityKind kind) {
    const Matrix gram = coefficient_gram(y);
    SimilarityMatrix out;
    out.kind = kind;
    out.entries = kind == SimilarityKind::binary ? binarize(gram) : Matrix(gram.cwiseAbs());
    out.provenance = std::string("gram/") + to_string(kind);
    return out;
}

/// Q^{d_max}. Powers of a binary Q count paths, so for d_max > 1 the result
/// is tagged absolute.
inline SimilarityMatrix similarity_noise_free(const CoefficientMatrix& y, std::size_t d_max, SimilarityKind kind) {
    if (d_max < 1) throw InputError("similarity_noise_free: d_max must be at least 1");
    SimilarityMatrix q = gram_similarity(y, kind);
    if (d_max > 1) {
        q.entries = symmetrized(matrix_power(q.entries, d_max));
        q.kind = SimilarityKind::absolute;
    }
    q.provenance += "/pow" + std::to_string(d_max);
    return q;
}

/// Keeps the ceil((1 - 1/M) * k * n) largest-magnitude entries and zeroes the
/// rest. Ties at the cut go to the earliest row-major position. M = 1 returns
/// the input unchanged.
inline CoefficientMatrix threshold_volumetric(const CoefficientMatrix& y, std::size_t m_subspaces) {
    if (m_subspaces < 1) throw InputError("threshold_volumetric: M must be at least 1");
    if (m_subspaces == 1) return y;

    const Matrix& e = y.entries;
    const auto cols = static_cast<std::size_t>(e.cols());
    const std::size_t total = static_cast<std::size_t>(e.size());
    const std::size_t keep = ((m_subspaces - 1) * total + m_subspaces - 1) / m_subspaces;

    auto value_at = [&](std::size_t pos) {
        return std::abs(e(static_cast<Eigen::Index>(pos / cols), static_cast<Eigen::Index>(pos % cols)));
    };
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto before = [&](std::size_t a, std::size_t b) {
        const double va = value_at(a);
        const double vb = value_at(b);
        return va != vb ? va > vb : a < b;
    };
    if (keep < total) std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), before);

    CoefficientMatrix out{Matrix::Zero(e.rows(), e.cols())};
    for (std::size_t i = 0; i < keep; ++i) {
        const auto r = static_cast<Eigen::Index>(order[i] / cols);
        const auto c = static_cast<Eigen::Index>(order[i] % cols);
        out.entries(r, c) = e(r, c);
    }
    return out;
}

/// abs(entrywise median). Even counts average the two central values.
inline SimilarityMatrix median_aggregate(std::span<const Matrix> mats) {
    if (mats.empty()) throw InputError("median_aggregate: empty list");
    const Eigen::Index rows = mats.front().rows();
    const Eigen::Index cols = mats.front().cols();
    for (const auto& m : mats)
        if (m.rows() != rows || m.cols() != cols) throw InputError("median_aggregate: dimension mismatch");

    const std::size_t count = mats.size();
    const std::size_t mid = count / 2;
    std::vector<double> buf(count);
    Matrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (std::size_t t = 0; t < count; ++t) buf[t] = mats[t](i, j);
            std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
            double med = buf[mid];
            if (count % 2 == 0) {
                const double lower = *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
                med = 0.5 * (lower + med);
            }
            out(i, j) = std::abs(med);
        }
    }
    return SimilarityMatrix{std::move(out), SimilarityKind::absolute, "median/" + std::to_string(count)};
}

inline SimilarityMatrix median_aggregate(std::span<const SimilarityMatrix> sims) {
    std::vector<Matrix> mats;
    mats.reserve(sims.size());
    for (const auto& s : sims) mats.push_back(s.entries);
    return median_aggregate(std::span<const Matrix>(mats));
}

/// Sets the diagonal to 1; every sample is connected to itself.
inline Matrix enforce_diagonal(Matrix m) {
    if (m.rows() != m.cols()) throw InputError("enforce_diagonal: matrix is not square");
    m.diagonal().setOnes();
    return m;
}

inline SimilarityMatrix enforce_diagonal(SimilarityMatrix sim) {
    sim.entries = enforce_diagonal(std::move(sim.entries));
    return sim;
}

/// Unit-norm columns; columns with norm below 1e-14 stay zero.
inline CoefficientMatrix normalize_columns(CoefficientMatrix y) {
    for (Eigen::Index j = 0; j < y.entries.cols(); ++j) {
        const double norm = y.entries.col(j).norm();
        if (norm < 1e-14)
            y.entries.col(j).setZero();
        else
            y.entries.col(j) /= norm;
    }
    return y;
}

inline SimilarityMatrix elementwise_power(SimilarityMatrix sim, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("elementwise_power: alpha must be positive");
    if (alpha != 1.0) sim.entries = sim.entries.array().pow(alpha).matrix();
    sim.provenance += "/pow_elem";
    return sim;
}

/// Shape interaction matrix |V_r V_r^T| from the rank-r skinny SVD of w.
inline SimilarityMatrix sim_baseline(const Matrix& w, std::size_t r) {
    const SvdTriple svd = skinny_svd(w, r);
    const Matrix vvt = symmetrized(svd.right * svd.right.transpose());
    return SimilarityMatrix{vvt.cwiseAbs(), SimilarityKind::absolute, "sim/r" + std::to_string(r)};
}

}  // namespace cursim
