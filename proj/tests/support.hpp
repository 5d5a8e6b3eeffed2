#pragma once

// Random instance generators and brute-force reference implementations for tests.
// Oracles use plain loops over std::vector and never call into the library's math.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "mtfl/core.hpp"

namespace testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<>(0.0, 1.0)(engine_); }
    std::size_t integer(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    bool coin(double p) { return uniform(0.0, 1.0) < p; }

    mtfl::Matrix normal_matrix(std::size_t rows, std::size_t cols) {
        mtfl::Matrix x(rows, cols);
        for (Eigen::Index r = 0; r < x.rows(); ++r)
            for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = normal();
        return x;
    }

    mtfl::Vector normal_vector(std::size_t size) {
        mtfl::Vector v(size);
        for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = normal();
        return v;
    }

    // Tasks with n_i drawn from [n_lo, n_hi].
    mtfl::TaskDataset dataset(std::size_t m, std::size_t n_lo, std::size_t n_hi, std::size_t d) {
        std::vector<mtfl::Task> tasks;
        for (std::size_t i = 0; i < m; ++i) {
            const auto n = integer(n_lo, n_hi);
            tasks.push_back({normal_matrix(n, d), normal_vector(n)});
        }
        return mtfl::TaskDataset(std::move(tasks));
    }

    mtfl::WeightMatrix weights(std::size_t d, std::size_t m, double zero_probability = 0.0) {
        mtfl::Matrix w(d, m);
        for (Eigen::Index j = 0; j < w.rows(); ++j)
            for (Eigen::Index i = 0; i < w.cols(); ++i)
                w(j, i) = coin(zero_probability) ? 0.0 : uniform(-3.0, 3.0);
        return mtfl::WeightMatrix(std::move(w));
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

inline double loss_oracle(const mtfl::TaskDataset& data, const mtfl::WeightMatrix& w) {
    double total = 0.0;
    const double m = static_cast<double>(data.task_count());
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        const auto& x = data.design(i);
        const auto& y = data.response(i);
        double task = 0.0;
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            double pred = 0.0;
            for (Eigen::Index c = 0; c < x.cols(); ++c) pred += x(r, c) * w(c, i);
            task += (pred - y[r]) * (pred - y[r]);
        }
        total += task / (m * static_cast<double>(x.rows()));
    }
    return total;
}

inline std::vector<double> row_norm_oracle(const mtfl::WeightMatrix& w) {
    std::vector<double> t(w.features(), 0.0);
    for (std::size_t j = 0; j < w.features(); ++j)
        for (std::size_t i = 0; i < w.tasks(); ++i) t[j] += std::fabs(w(j, i));
    return t;
}

inline double l21_error_oracle(const mtfl::WeightMatrix& a, const mtfl::WeightMatrix& b) {
    double total = 0.0;
    for (std::size_t j = 0; j < a.features(); ++j) {
        double sq = 0.0;
        for (std::size_t i = 0; i < a.tasks(); ++i) sq += (a(j, i) - b(j, i)) * (a(j, i) - b(j, i));
        total += std::sqrt(sq);
    }
    return total;
}

struct JumpOracle {
    double theta = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> index;
};

// Checks every position j and keeps the smallest one whose gap exceeds tau.
inline JumpOracle jump_oracle(std::vector<double> t, double tau) {
    for (std::size_t a = 1; a < t.size(); ++a)  // insertion sort
        for (std::size_t b = a; b > 0 && t[b - 1] > t[b]; --b) std::swap(t[b - 1], t[b]);
    JumpOracle best;
    for (std::size_t j = t.size(); j-- > 1;) {
        if (t[j] - t[j - 1] > tau) best = {t[j - 1], j};
    }
    return best;
}

// Minimises a convex function of k variables by repeated grid refinement.
// Each level evaluates a (2*half+1)^k grid and recentres on the best point.
inline std::vector<double> grid_minimize(const std::function<double(const std::vector<double>&)>& f,
                                         std::vector<double> centre, double radius, int half,
                                         double final_step) {
    const std::size_t k = centre.size();
    double step = radius / half;
    for (;;) {
        std::vector<int> offset(k, -half);
        std::vector<double> best = centre;
        double best_value = f(centre);
        std::vector<double> point(k);
        for (;;) {
            for (std::size_t v = 0; v < k; ++v) point[v] = centre[v] + offset[v] * step;
            const double value = f(point);
            if (value < best_value) {
                best_value = value;
                best = point;
            }
            std::size_t v = 0;
            while (v < k && offset[v] == half) offset[v++] = -half;
            if (v == k) break;
            ++offset[v];
        }
        centre = best;
        if (step <= final_step) return centre;
        step /= 4.0;
    }
}

}  // namespace testing
