#pragma once

#include <cstddef>
#include <limits>
#include <optional>

#include "mtfl/core.hpp"

namespace mtfl {

/// Returned when no adjacent gap exceeds tau: every row stays penalised.
inline constexpr double kNoThreshold = std::numeric_limits<double>::infinity();

struct JumpResult {
    /// sorted[jump_index - 1] when found, kNoThreshold otherwise.
    double theta = kNoThreshold;
    /// 1-based position j in the ascending sequence with sorted[j+1] - sorted[j] > tau.
    std::optional<std::size_t> jump_index;

    bool found() const { return jump_index.has_value(); }
};

/// tau = max_j t[j] / n, where n is the total number of samples over all tasks.
double compute_tau(const RowNormVector& norms, std::size_t total_samples);

/// Sorts the row norms ascending (stable) and returns the value just below the
/// first adjacent gap strictly larger than tau. Sequences shorter than two
/// never produce a jump.
JumpResult first_significant_jump(const RowNormVector& norms, double tau);

} // namespace mtfl
