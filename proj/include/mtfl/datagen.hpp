#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "mtfl/core.hpp"

namespace mtfl {

struct SyntheticSpec {
    std::size_t tasks = 20;            // m
    std::size_t samples = 30;          // n per task
    std::size_t features = 200;        // d
    double sigma = 0.005;
    double row_zero_fraction = 0.9;
    double entry_zero_fraction = 0.8;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on empty dimensions, negative sigma or
    /// fractions outside [0, 1).
    void validate() const;
};

struct SyntheticInstance {
    TaskDataset data;
    WeightMatrix true_weights;
    std::vector<Vector> noise;
};

/// Draws a planted joint-sparse regression problem, y_i = X_i w_i + noise_i.
///
/// Draw order from Rng(seed): W entries ~ U[-10, 10] in row-major order;
/// floor(row_zero_fraction * d) rows to zero; then floor(entry_zero_fraction *
/// surviving_rows * m) entries among the surviving rows (row-major positions);
/// then for each task X_i ~ N(0, 1) row-major followed by its noise ~ N(0, sigma^2).
SyntheticInstance generate(const SyntheticSpec& spec);

/// Named problem sizes: "fig2a" (m=20, n=30, d=200, sigma=0.005),
/// "fig2b" (m=15, n=40, d=250, sigma=0.01), "fig2c" (m=25, n=25, d=180, sigma=0.05).
/// Throws std::invalid_argument for unknown names.
SyntheticSpec preset(std::string_view name);

} // namespace mtfl
