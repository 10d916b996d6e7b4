#pragma once

// Dense real linear algebra shared by every other header: skinny SVD,
// Moore-Penrose pseudoinverse, numerical rank, nuclear norm, matrix powers.
//
// All rank decisions go through rank_tolerance() so the CUR rank check and
// the similarity construction agree on what "zero" means.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "cursim/error.hpp"

namespace cursim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative singular-value cutoff factor; multiplied by max(rows, cols).
inline constexpr double kRankTolFactor = 1e-10;

inline double rank_tolerance(Eigen::Index rows, Eigen::Index cols) {
    return kRankTolFactor * static_cast<double>(std::max(rows, cols));
}

inline void require_finite(const Matrix& a, const char* what = "matrix") {
    if (a.rows() < 1 || a.cols() < 1)
        throw InputError(std::string(what) + " must have at least one row and one column");
    if (!a.allFinite()) throw InputError(std::string(what) + " has non-finite entries");
}

/// Top-r singular triplets. `singulars` is strictly positive and nonincreasing.
struct SvdTriple {
    Matrix left;       // m x r, orthonormal columns
    Vector singulars;  // length r
    Matrix right;      // n x r, orthonormal columns

    std::size_t rank() const { return static_cast<std::size_t>(singulars.size()); }
    Matrix reconstruct() const { return left * singulars.asDiagonal() * right.transpose(); }
};

namespace detail {

using Svd = Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner>;

inline Svd thin_svd(const Matrix& a) { return Svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV); }

// Number of leading singular values above the shared relative cutoff.
inline Eigen::Index count_above_tolerance(const Vector& sv, Eigen::Index rows, Eigen::Index cols) {
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    const double cutoff = rank_tolerance(rows, cols) * sv(0);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    return r;
}

}  // namespace detail

/// Best rank-r approximation in SVD form. Singular values under the rank
/// tolerance are dropped, so the returned rank may be smaller than `r`
/// (zero for the zero matrix).
inline SvdTriple skinny_svd(const Matrix& a, std::size_t r) {
    require_finite(a);
    const auto limit = static_cast<std::size_t>(std::min(a.rows(), a.cols()));
    if (r < 1 || r > limit)
        throw InputError("skinny_svd: rank " + std::to_string(r) + " outside [1, " + std::to_string(limit) + "]");

    const auto svd = detail::thin_svd(a);
    const Vector& sv = svd.singularValues();
    const Eigen::Index keep =
        std::min<Eigen::Index>(static_cast<Eigen::Index>(r), detail::count_above_tolerance(sv, a.rows(), a.cols()));

    return SvdTriple{svd.matrixU().leftCols(keep), sv.head(keep), svd.matrixV().leftCols(keep)};
}

/// Moore-Penrose pseudoinverse via SVD; Sigma^+ inverts only singular values
/// above the rank tolerance. pinv(0) = 0.
inline Matrix pinv(const Matrix& a) {
    require_finite(a);
    const auto svd = detail::thin_svd(a);
    const Vector& sv = svd.singularValues();
    const Eigen::Index r = detail::count_above_tolerance(sv, a.rows(), a.cols());
    if (r == 0) return Matrix::Zero(a.cols(), a.rows());
    const Vector inv = sv.head(r).cwiseInverse();
    return svd.matrixV().leftCols(r) * inv.asDiagonal() * svd.matrixU().leftCols(r).transpose();
}

inline std::size_t numerical_rank(const Matrix& a) {
    require_finite(a);
    const Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(a);
    return static_cast<std::size_t>(detail::count_above_tolerance(svd.singularValues(), a.rows(), a.cols()));
}

/// Sum of all singular values.
inline double nuclear_norm(const Matrix& a) {
    require_finite(a);
    const Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(a);
    return svd.singularValues().sum();
}

/// a^p by repeated squaring.
inline Matrix matrix_power(const Matrix& a, std::size_t p) {
    require_finite(a);
    if (a.rows() != a.cols()) throw InputError("matrix_power: matrix is not square");
    if (p < 1) throw InputError("matrix_power: exponent must be at least 1");

    Matrix result = Matrix::Identity(a.rows(), a.cols());
    Matrix base = a;
    bool first = true;
    while (p > 0) {
        if (p & 1U) {
            if (first) {
                result = base;
                first = false;
            } else {
                result = (result * base).eval();
            }
        }
        p >>= 1U;
        if (p > 0) base = (base * base).eval();
    }
    return result;
}

/// Frobenius-norm relative residual ||a - b||_F / ||a||_F (absolute when a = 0).
inline double relative_residual(const Matrix& a, const Matrix& b) {
    const double scale = a.norm();
    const double diff = (a - b).norm();
    return scale > 0.0 ? diff / scale : diff;
}

}  // namespace cursim
