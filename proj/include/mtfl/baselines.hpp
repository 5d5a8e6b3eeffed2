#pragma once

#include <cstddef>
#include <vector>

#include "mtfl/core.hpp"
#include "mtfl/wlasso.hpp"

namespace mtfl {

/// l(W) + lambda ||W||_{1,1}, solved by the weighted-l1 solver with uniform penalties.
WeightMatrix solve_lasso_l11(const TaskDataset& data, double lambda,
                             const SolverOptions& options = {});

struct L21Options {
    double lambda = 0.0;
    std::size_t max_iterations = 5000;
    /// Stop when |F_k - F_{k-1}| <= tolerance * |F_k| on an accepted step.
    double tolerance = 1e-9;

    void validate() const;
};

struct L21Result {
    WeightMatrix solution;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Objective after every iteration; nonincreasing.
    std::vector<double> objective_history;
};

/// Accelerated proximal gradient (monotone FISTA) for l(W) + lambda sum_j ||w^j||_2.
///
/// The step starts at 1/L with L = 2 max_i sigma_max(X_i)^2 / (m n_i) from
/// power iteration and is halved whenever the quadratic upper bound fails.
/// A candidate that raises the objective is not accepted as the iterate.
L21Result solve_l21(const TaskDataset& data, const L21Options& options);

/// Row-wise shrinkage w^j -> max(0, 1 - threshold / ||w^j||_2) w^j.
/// Rows with norm <= threshold become exactly zero.
Matrix row_shrink(const Matrix& weights, double threshold);

/// l(W) + lambda sum_j ||w^j||_2.
double l21_objective(const TaskDataset& data, const WeightMatrix& weights, double lambda);

/// Largest eigenvalue of X^T X by power iteration from a fixed start.
double largest_squared_singular_value(const Matrix& design);

} // namespace mtfl
