#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mtfl/core.hpp"

namespace mtfl {

/// sign(a) * max(|a| - b, 0), the proximal map of b|.|. Requires b >= 0.
double soft_threshold(double a, double b);

struct SolverOptions {
    /// Maximum KKT violation accepted as converged, in the scale of l(W).
    double tolerance = 1e-8;
    /// Budget of coordinate sweeps per task (full and active-set sweeps both count).
    std::size_t max_sweeps = 10000;
    /// Initial iterate; zero when absent.
    std::optional<WeightMatrix> warm_start;
    /// Called after every sweep with the task index, 1-based sweep count and the iterate.
    std::function<void(std::size_t task, std::size_t sweep, const Vector& weights)> on_sweep;

    /// Throws std::invalid_argument on tolerance <= 0 or max_sweeps == 0.
    void validate() const;
};

struct SolverReport {
    WeightMatrix solution;
    std::vector<std::size_t> sweeps_used;
    std::vector<double> kkt_residual;
    std::vector<bool> converged;

    bool all_converged() const;
    double max_kkt_residual() const;
};

/// Minimises l(W) + sum_j lambda_j ||w^j||_1.
///
/// The problem separates over tasks. Task i is rescaled by m n_i / 2 into
/// the standard form 0.5 ||X_i w - y_i||^2 + sum_j gamma_ij |w_j| with
/// gamma_ij = m n_i lambda_j / 2 (see effective_penalty) and solved by cyclic
/// coordinate descent in ascending feature order. After each full sweep the
/// solver iterates over the current nonzero set until it settles, then
/// returns to a full sweep; it stops once a full sweep leaves the KKT
/// residual (measured on the unscaled problem) at or below the tolerance.
///
/// Non-convergence within max_sweeps is reported per task, not thrown.
SolverReport solve_weighted_l1(const TaskDataset& data, const PenaltyVector& penalties,
                               const SolverOptions& options = {});

/// gamma = m n_i lambda / 2, the per-coordinate threshold of task i's rescaled subproblem.
double effective_penalty(double lambda, std::size_t tasks, std::size_t samples);

/// Largest violation of the weighted-Lasso optimality conditions for one task:
/// |g_j| <= lambda_j where w_j = 0 and g_j = -sign(w_j) lambda_j otherwise,
/// with g the gradient of ||X w - y||^2 / (m n_i).
double task_kkt_residual(const Matrix& design, const Vector& response, const Vector& weights,
                         const Vector& penalties, std::size_t tasks);

/// The same, maximised over every task of a dataset.
double kkt_residual(const TaskDataset& data, const WeightMatrix& weights,
                    const PenaltyVector& penalties);

/// l(W) + sum_j lambda_j ||w^j||_1.
double weighted_l1_objective(const TaskDataset& data, const WeightMatrix& weights,
                             const PenaltyVector& penalties);

} // namespace mtfl
