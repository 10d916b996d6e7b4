#pragma once

// Synthetic union-of-independent-subspaces data and the noise-sweep harness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cursim/cluster.hpp"
#include "cursim/error.hpp"
#include "cursim/linalg.hpp"
#include "cursim/pipeline.hpp"
#include "cursim/random.hpp"

namespace cursim {

struct UnionModel {
    std::size_t ambient_dim = 0;
    std::vector<std::size_t> subspace_dims;
    std::vector<Matrix> bases;  // ambient_dim x d_i, orthonormal columns

    std::size_t total_dim() const {
        return std::accumulate(subspace_dims.begin(), subspace_dims.end(), std::size_t{0});
    }
    std::size_t max_dim() const {
        return subspace_dims.empty() ? 0 : *std::max_element(subspace_dims.begin(), subspace_dims.end());
    }
    Matrix stacked_basis() const {
        Matrix out(static_cast<Eigen::Index>(ambient_dim), static_cast<Eigen::Index>(total_dim()));
        Eigen::Index col = 0;
        for (const auto& b : bases) {
            out.middleCols(col, b.cols()) = b;
            col += b.cols();
        }
        return out;
    }
};

struct SyntheticInstance {
    Matrix data;
    LabelVector truth;
    UnionModel model;
    double sigma = 0.0;
    /// Column j of `data` is generated column permutation[j]; identity unless shuffled.
    std::vector<std::size_t> permutation;
    /// Noise-free unit-ball coefficients, one column per generated point, in generation order.
    std::vector<Matrix> coefficients;
};

/// Orthonormalizes an m x sum(d_i) Gaussian matrix and splits its columns
/// into the per-subspace bases; the subspaces are independent by construction.
inline UnionModel random_union_model(std::size_t m, const std::vector<std::size_t>& dims, std::uint64_t seed) {
    if (dims.empty()) throw InputError("random_union_model: no subspaces");
    for (auto d : dims)
        if (d == 0) throw InputError("random_union_model: subspace dimensions must be positive");
    const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{0});
    if (total > m) throw InputError("random_union_model: sum of dimensions exceeds the ambient dimension");

    Rng rng(seed);
    const auto rows = static_cast<Eigen::Index>(m);
    const auto cols = static_cast<Eigen::Index>(total);
    const Matrix g = gaussian_matrix(rows, cols, rng);
    const Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);

    UnionModel model;
    model.ambient_dim = m;
    model.subspace_dims = dims;
    Eigen::Index col = 0;
    for (auto d : dims) {
        model.bases.push_back(q.middleCols(col, static_cast<Eigen::Index>(d)));
        col += static_cast<Eigen::Index>(d);
    }
    return model;
}

/// Uniform draw from the unit ball of R^d: Gaussian direction, radius u^{1/d}.
inline Vector sample_unit_ball(std::size_t d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(d));
    double norm = 0.0;
    do {
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
        norm = v.norm();
    } while (norm == 0.0);
    const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(d));
    return v * (radius / norm);
}

/// Points drawn from the unit ball of each subspace, plus i.i.d. N(0, sigma^2)
/// noise on every entry. Columns are grouped by subspace unless `shuffle`.
inline SyntheticInstance sample_instance(const UnionModel& model, const std::vector<std::size_t>& points_per_subspace,
                                         double sigma, std::uint64_t seed, bool shuffle = false) {
    if (points_per_subspace.size() != model.subspace_dims.size())
        throw InputError("sample_instance: one point count per subspace required");
    for (std::size_t i = 0; i < points_per_subspace.size(); ++i)
        if (points_per_subspace[i] <= model.subspace_dims[i])
            throw InputError("sample_instance: generic data needs more points than the subspace dimension");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("sample_instance: sigma must be nonnegative");

    const std::size_t n = std::accumulate(points_per_subspace.begin(), points_per_subspace.end(), std::size_t{0});
    const auto m = static_cast<Eigen::Index>(model.ambient_dim);

    Rng rng(seed);
    SyntheticInstance inst;
    inst.model = model;
    inst.sigma = sigma;
    Matrix clean(m, static_cast<Eigen::Index>(n));
    std::vector<std::size_t> labels;
    labels.reserve(n);
    Eigen::Index col = 0;
    for (std::size_t s = 0; s < model.bases.size(); ++s) {
        const std::size_t d = model.subspace_dims[s];
        Matrix coeffs(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(points_per_subspace[s]));
        for (Eigen::Index j = 0; j < coeffs.cols(); ++j) coeffs.col(j) = sample_unit_ball(d, rng);
        clean.middleCols(col, coeffs.cols()) = model.bases[s] * coeffs;
        col += coeffs.cols();
        labels.insert(labels.end(), points_per_subspace[s], s);
        inst.coefficients.push_back(std::move(coeffs));
    }

    const Matrix noise = gaussian_matrix(m, static_cast<Eigen::Index>(n), rng, 1.0);
    Matrix data = clean + sigma * noise;

    inst.permutation.resize(n);
    std::iota(inst.permutation.begin(), inst.permutation.end(), std::size_t{0});
    if (shuffle) std::shuffle(inst.permutation.begin(), inst.permutation.end(), rng);

    inst.data.resize(m, static_cast<Eigen::Index>(n));
    std::vector<std::size_t> shuffled(n);
    for (std::size_t j = 0; j < n; ++j) {
        inst.data.col(static_cast<Eigen::Index>(j)) = data.col(static_cast<Eigen::Index>(inst.permutation[j]));
        shuffled[j] = labels[inst.permutation[j]];
    }
    inst.truth = LabelVector{std::move(shuffled), model.bases.size()};
    return inst;
}

/// Noise levels of the reference synthetic experiment.
inline const std::vector<double>& default_sigmas() {
    static const std::vector<double> sigmas{0.000, 0.001, 0.010, 0.030, 0.050, 0.075, 0.10};
    return sigmas;
}

struct SweepRow {
    double sigma = 0.0;
    double mean_err = 0.0;
    double median_err = 0.0;
    double min_err = 0.0;
    double max_err = 0.0;
    std::size_t n_instances = 0;
    std::vector<double> errors;
};

struct SweepShape {
    std::size_t ambient_dim = 300;
    std::size_t points_per_subspace = 50;
};

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

/// For every sigma, clusters `instances_per_sigma` fresh instances with the
/// median-of-CUR pipeline and summarizes their clustering errors. Instance
/// seeds, and the pipeline seed of each run, derive from `seed`; proto.seed
/// is ignored.
inline std::vector<SweepRow> run_sweep(const std::vector<std::size_t>& case_dims, const std::vector<double>& sigmas,
                                       std::size_t instances_per_sigma, ProtoConfig proto, std::uint64_t seed,
                                       SweepShape shape = {}) {
    if (instances_per_sigma < 1) throw InputError("run_sweep: need at least one instance per sigma");
    std::vector<SweepRow> table;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        SweepRow row;
        row.sigma = sigmas[si];
        for (std::size_t inst = 0; inst < instances_per_sigma; ++inst) {
            const std::uint64_t base = mix_seed(seed, si * 100003 + inst);
            const UnionModel model = random_union_model(shape.ambient_dim, case_dims, mix_seed(base, 1));
            const std::vector<std::size_t> pts(case_dims.size(), shape.points_per_subspace);
            const SyntheticInstance data = sample_instance(model, pts, sigmas[si], mix_seed(base, 2));
            proto.seed = mix_seed(base, 3);
            row.errors.push_back(clustering_error(proto_cluster(data.data, proto), data.truth));
        }
        row.n_instances = row.errors.size();
        row.mean_err = std::accumulate(row.errors.begin(), row.errors.end(), 0.0) / static_cast<double>(row.n_instances);
        row.median_err = median_of(row.errors);
        row.min_err = *std::min_element(row.errors.begin(), row.errors.end());
        row.max_err = *std::max_element(row.errors.begin(), row.errors.end());
        table.push_back(std::move(row));
    }
    return table;
}

/// Pipeline settings used by the reference sweep for the given subspace dimensions:
/// all columns, rows = total dimension, k = 25, PCC.
inline ProtoConfig sweep_proto_config(const std::vector<std::size_t>& dims, Backend backend = Backend::pcc) {
    ProtoConfig cfg;
    cfg.m_subspaces = dims.size();
    cfg.target_rank = std::accumulate(dims.begin(), dims.end(), std::size_t{0});
    cfg.rows_per_trial = cfg.target_rank;
    cfg.n_trials = 25;
    cfg.backend = backend;
    return cfg;
}

}  // namespace cursim
