#pragma once

#include <cstdint>
#include <random>

#include "cursim/linalg.hpp"

namespace cursim {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive decorrelated child seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double stddev = 1.0) {
    std::normal_distribution<double> normal(0.0, stddev);
    Matrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
    return out;
}

}  // namespace cursim
