#pragma once

// End-to-end subspace clustering: the exact noise-free construction, the
// median-of-CUR pipeline with volumetric thresholding, and the RCUR rank
// sweep scored by normalized cut.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cursim/cluster.hpp"
#include "cursim/cur.hpp"
#include "cursim/error.hpp"
#include "cursim/linalg.hpp"
#include "cursim/simgen.hpp"

namespace cursim {

enum class Backend { pcc, spectral, kmeans };

inline const char* to_string(Backend b) {
    switch (b) {
        case Backend::pcc: return "pcc";
        case Backend::spectral: return "spectral";
        case Backend::kmeans: return "kmeans";
    }
    return "?";
}

/// Runs a final-stage clusterer. The k-means back-end clusters the columns
/// of the similarity matrix directly.
inline LabelVector run_backend(Backend backend, const SimilarityMatrix& sim, std::size_t m, std::uint64_t seed) {
    switch (backend) {
        case Backend::pcc: return pcc_cluster(sim, m, seed);
        case Backend::spectral: return spectral_cluster(sim, m, seed);
        case Backend::kmeans: return kmeans(sim.entries.transpose(), m, seed);
    }
    throw InputError("unknown backend");
}

struct ProtoConfig {
    std::size_t m_subspaces = 2;
    std::size_t target_rank = 8;
    std::size_t n_trials = 25;
    std::size_t rows_per_trial = 8;
    std::optional<std::size_t> cols_per_trial;  // nullopt = all columns
    Backend backend = Backend::pcc;
    std::uint64_t seed = 0;
    std::size_t max_retries = kDefaultMaxRetries;

    void validate(const Matrix& w) const {
        if (n_trials < 1) throw InputError("proto: n_trials must be at least 1");
        if (m_subspaces < 1) throw InputError("proto: M must be at least 1");
        if (target_rank < m_subspaces) throw InputError("proto: target rank must be at least M");
        if (rows_per_trial < target_rank) throw InputError("proto: rows per trial must be at least the target rank");
        if (target_rank > static_cast<std::size_t>(std::min(w.rows(), w.cols())))
            throw InputError("proto: target rank exceeds min(m, n)");
        if (rows_per_trial > static_cast<std::size_t>(w.rows())) throw InputError("proto: more rows than the data has");
        if (cols_per_trial && (*cols_per_trial < target_rank || *cols_per_trial > static_cast<std::size_t>(w.cols())))
            throw InputError("proto: columns per trial must lie in [target rank, n]");
        if (m_subspaces > static_cast<std::size_t>(w.cols())) throw InputError("proto: M exceeds the number of points");
    }
};

struct RcurConfig {
    std::size_t r_min = 1;
    std::size_t r_max = 1;
    std::size_t n_trials = 50;
    double alpha = 0.0;  // required, no meaningful default
    std::uint64_t seed = 0;
    std::size_t max_retries = kDefaultMaxRetries;

    void validate(const Matrix& w) const {
        if (r_min < 1 || r_min > r_max) throw InputError("rcur: need 1 <= r_min <= r_max");
        if (r_max > static_cast<std::size_t>(std::min(w.rows(), w.cols())))
            throw InputError("rcur: r_max exceeds min(m, n)");
        if (n_trials < 1) throw InputError("rcur: n_trials must be at least 1");
        if (!(alpha > 0.0)) throw InputError("rcur: alpha must be positive");
    }
};

struct RcurResult {
    LabelVector labels;
    std::size_t r_best = 0;
    std::vector<std::pair<std::size_t, double>> ncut_per_rank;
};

/// Seed for trial `trial` at rank-sweep position `rank_index`.
inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial, std::size_t rank_index = 0) {
    return seed + trial + 1000 * rank_index;
}

/// Noise-free clustering: Y = W^+ W from the full selection, Xi = Q^{d_max},
/// labels = connected components of Xi.
inline LabelVector cluster_noise_free(const Matrix& w, std::size_t d_max, SimilarityKind kind) {
    require_finite(w, "data");
    IndexSelection all;
    all.rows.resize(static_cast<std::size_t>(w.rows()));
    all.cols.resize(static_cast<std::size_t>(w.cols()));
    for (std::size_t i = 0; i < all.rows.size(); ++i) all.rows[i] = i;
    for (std::size_t j = 0; j < all.cols.size(); ++j) all.cols[j] = j;
    const CoefficientMatrix y = coefficient_matrix(extract_factors(w, all));
    return connected_components(similarity_noise_free(y, d_max, kind));
}

/// The aggregated similarity matrix of the median-of-CUR pipeline, before the
/// final clustering step.
inline SimilarityMatrix proto_similarity(const Matrix& w, const ProtoConfig& cfg) {
    require_finite(w, "data");
    cfg.validate(w);
    const std::size_t cols = cfg.cols_per_trial.value_or(static_cast<std::size_t>(w.cols()));

    std::vector<Matrix> trials;
    trials.reserve(cfg.n_trials);
    for (std::size_t t = 0; t < cfg.n_trials; ++t) {
        CurFactors f;
        try {
            f = cur_sample(w, cfg.rows_per_trial, cols, trial_seed(cfg.seed, t), cfg.max_retries, cfg.target_rank);
        } catch (const SelectionFailed& e) {
            throw SelectionFailed(e.attempts(), t);
        }
        const CoefficientMatrix y = threshold_volumetric(coefficient_matrix(f), cfg.m_subspaces);
        trials.push_back(enforce_diagonal(coefficient_gram(y)));
    }
    SimilarityMatrix xi = median_aggregate(std::span<const Matrix>(trials));
    xi.provenance = "proto/k" + std::to_string(cfg.n_trials) + "/s" + std::to_string(cfg.rows_per_trial);
    return xi;
}

inline LabelVector proto_cluster(const Matrix& w, const ProtoConfig& cfg) {
    const SimilarityMatrix xi = proto_similarity(w, cfg);
    return run_backend(cfg.backend, xi, cfg.m_subspaces, cfg.seed);
}

/// Powered similarity for one rank of the RCUR sweep: median over trials of
/// the Gram matrices of column-normalized R^+ R, raised entrywise to alpha.
inline SimilarityMatrix rcur_similarity(const Matrix& w, std::size_t rank, std::size_t rank_index,
                                        const RcurConfig& cfg, std::size_t data_rank) {
    const auto n = static_cast<std::size_t>(w.cols());
    // Noise-free data cannot supply more than its own rank.
    const std::size_t target = std::min(rank, data_rank);

    std::vector<Matrix> trials;
    trials.reserve(cfg.n_trials);
    for (std::size_t t = 0; t < cfg.n_trials; ++t) {
        CurFactors f;
        try {
            f = cur_sample(w, rank, n, trial_seed(cfg.seed, t, rank_index), cfg.max_retries, target);
        } catch (const SelectionFailed& e) {
            throw SelectionFailed(e.attempts(), t);
        }
        trials.push_back(coefficient_gram(normalize_columns(coefficient_matrix(f))));
    }
    SimilarityMatrix xi = elementwise_power(median_aggregate(std::span<const Matrix>(trials)), cfg.alpha);
    xi.provenance = "rcur/r" + std::to_string(rank);
    return xi;
}

inline RcurResult rcur_cluster(const Matrix& w, std::size_t m_subspaces, const RcurConfig& cfg) {
    require_finite(w, "data");
    cfg.validate(w);
    if (m_subspaces < 1 || m_subspaces > static_cast<std::size_t>(w.cols()))
        throw InputError("rcur: M must lie in [1, n]");
    const std::size_t data_rank = numerical_rank(w);
    if (data_rank == 0) throw SelectionFailed(0);

    RcurResult result;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = cfg.r_min; r <= cfg.r_max; ++r) {
        const std::size_t idx = r - cfg.r_min;
        const SimilarityMatrix xi = rcur_similarity(w, r, idx, cfg, data_rank);
        LabelVector labels = spectral_cluster(xi, m_subspaces, trial_seed(cfg.seed, 0, idx));
        const double ncut = ncut_value(xi, labels);
        result.ncut_per_rank.emplace_back(r, ncut);
        if (ncut < best) {  // strict: ties keep the smaller rank
            best = ncut;
            result.r_best = r;
            result.labels = std::move(labels);
        }
    }
    return result;
}

}  // namespace cursim
