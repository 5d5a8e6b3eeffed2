#include "mtfl/threshold.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace mtfl {

double compute_tau(const RowNormVector& norms, std::size_t total_samples) {
    if (total_samples == 0) throw std::invalid_argument("compute_tau: sample count must be >= 1");
    return norms.max() / static_cast<double>(total_samples);
}

JumpResult first_significant_jump(const RowNormVector& norms, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("first_significant_jump: tau must be >= 0");
    JumpResult result;
    if (norms.size() < 2) return result;

    std::vector<double> sorted(norms.values().begin(), norms.values().end());
    std::stable_sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        if (sorted[k + 1] - sorted[k] > tau) {
            result.theta = sorted[k];
            result.jump_index = k + 1;
            break;
        }
    }
    return result;
}

} // namespace mtfl
