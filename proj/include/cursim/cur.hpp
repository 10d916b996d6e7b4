#pragma once

// CUR (skeleton) factorization A = C U^+ R built from actual rows and columns
// of A, with uniform random index selection and rejection sampling on the
// rank of the intersection submatrix U.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cursim/error.hpp"
#include "cursim/linalg.hpp"
#include "cursim/random.hpp"

namespace cursim {

/// Row set I and column set J; both sorted, distinct and nonempty.
struct IndexSelection {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;

    friend bool operator==(const IndexSelection&, const IndexSelection&) = default;
};

struct CurFactors {
    Matrix c;  // m x k, columns of A at selection.cols
    Matrix u;  // s x k, A restricted to I x J
    Matrix r;  // s x n, rows of A at selection.rows
    IndexSelection selection;

    Matrix reconstruct() const { return c * pinv(u) * r; }
};

inline constexpr std::size_t kDefaultMaxRetries = 100;

namespace detail {

inline std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count, Rng& rng) {
    std::vector<std::size_t> pool(population);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // partial Fisher-Yates
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, population - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

inline void validate_selection(const IndexSelection& sel, Eigen::Index m, Eigen::Index n) {
    auto check = [](const std::vector<std::size_t>& idx, Eigen::Index bound, const char* axis) {
        if (idx.empty()) throw InputError(std::string("selection has no ") + axis);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] >= static_cast<std::size_t>(bound))
                throw InputError(std::string("selection ") + axis + " index " + std::to_string(idx[i]) +
                                 " out of range");
            if (i > 0 && idx[i] <= idx[i - 1])
                throw InputError(std::string("selection ") + axis + " must be sorted and distinct");
        }
    };
    check(sel.rows, m, "rows");
    check(sel.cols, n, "columns");
}

}  // namespace detail

/// Draws s of m rows and k of n columns uniformly without replacement.
/// Rows are drawn first, then columns, from one stream seeded by `seed`.
inline IndexSelection select_uniform(std::size_t m, std::size_t n, std::size_t s, std::size_t k,
                                     std::uint64_t seed) {
    if (s < 1 || s > m) throw InputError("select_uniform: need 1 <= s <= m");
    if (k < 1 || k > n) throw InputError("select_uniform: need 1 <= k <= n");
    Rng rng(seed);
    IndexSelection sel;
    sel.rows = detail::sample_without_replacement(m, s, rng);
    sel.cols = detail::sample_without_replacement(n, k, rng);
    return sel;
}

/// Copies C, U and R out of `a` without checking any rank condition.
inline CurFactors extract_factors(const Matrix& a, const IndexSelection& sel) {
    require_finite(a);
    detail::validate_selection(sel, a.rows(), a.cols());
    const auto s = static_cast<Eigen::Index>(sel.rows.size());
    const auto k = static_cast<Eigen::Index>(sel.cols.size());

    CurFactors f;
    f.selection = sel;
    f.c.resize(a.rows(), k);
    f.r.resize(s, a.cols());
    f.u.resize(s, k);
    for (Eigen::Index j = 0; j < k; ++j) f.c.col(j) = a.col(static_cast<Eigen::Index>(sel.cols[j]));
    for (Eigen::Index i = 0; i < s; ++i) f.r.row(i) = a.row(static_cast<Eigen::Index>(sel.rows[i]));
    for (Eigen::Index j = 0; j < k; ++j) f.u.col(j) = f.r.col(static_cast<Eigen::Index>(sel.cols[j]));
    return f;
}

/// Exact CUR factorization. Requires rank(U) = rank(A), under which
/// A = C U^+ R holds.
inline CurFactors cur_factorize(const Matrix& a, const IndexSelection& sel) {
    CurFactors f = extract_factors(a, sel);
    const std::size_t rank_a = numerical_rank(a);
    const std::size_t rank_u = numerical_rank(f.u);
    if (rank_u < rank_a) throw RankDeficientSelection(rank_u, rank_a);
    return f;
}

/// Seed used for retry `attempt` of a sampling call seeded with `seed`.
inline std::uint64_t attempt_seed(std::uint64_t seed, std::size_t attempt) {
    return attempt == 0 ? seed : mix_seed(seed, attempt);
}

/// Rejection-samples uniform selections until rank(U) reaches the target
/// rank. The default target is min(rank(a), s, k); noisy data passes the
/// clean-data rank explicitly, and then any U of rank >= target is accepted.
inline CurFactors cur_sample(const Matrix& a, std::size_t s, std::size_t k, std::uint64_t seed,
                             std::size_t max_retries = kDefaultMaxRetries,
                             std::optional<std::size_t> target_rank = std::nullopt) {
    require_finite(a);
    if (s < 1 || k < 1) throw InputError("cur_sample: s and k must be positive");
    const auto m = static_cast<std::size_t>(a.rows());
    const auto n = static_cast<std::size_t>(a.cols());

    const std::size_t target = target_rank ? *target_rank : std::min({numerical_rank(a), s, k});
    if (target == 0) throw SelectionFailed(0);
    if (target > std::min(s, k)) throw InputError("cur_sample: target rank exceeds the selection size");

    for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
        const auto sel = select_uniform(m, n, s, k, attempt_seed(seed, attempt));
        CurFactors f = extract_factors(a, sel);
        if (numerical_rank(f.u) >= target) return f;
    }
    throw SelectionFailed(max_retries);
}

}  // namespace cursim
