#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "mtfl/core.hpp"
#include "mtfl/threshold.hpp"
#include "mtfl/wlasso.hpp"

namespace mtfl {

struct MultistageConfig {
    double lambda = 0.0;
    /// Fixed cap for MSMTFL; ignored by the adaptive driver. May be +inf.
    std::optional<double> theta;
    std::size_t stages = 10;
    /// Scales the adaptive jump cutoff tau (adaptive driver only).
    double tau_multiplier = 1.0;
    /// Stop once a stage reproduces the penalty vector it was solved with.
    bool early_stop = false;
    SolverOptions solver;
};

struct StageSolverSummary {
    std::size_t total_sweeps = 0;
    double max_kkt_residual = 0.0;
    bool converged = true;
};

/// State after stage l: the solution, its row norms, the threshold used to
/// derive the next penalties, and the objective at the solution.
struct StageTrace {
    std::size_t stage = 0;
    WeightMatrix solution;
    RowNormVector row_norms;
    double theta = kNoThreshold;
    /// Adaptive driver only.
    std::optional<double> tau;
    std::optional<std::size_t> jump_index;
    /// lambda * I(row_norms[j] < theta); the penalties of stage l + 1.
    PenaltyVector penalties;
    /// l(W) + lambda * sum_j min(t_j, theta) at this stage's solution.
    double objective = 0.0;
    StageSolverSummary solver;
};

/// Multi-stage capped-l1,l1 learning with a fixed threshold theta.
std::vector<StageTrace> run_msmtfl(const TaskDataset& data, const MultistageConfig& config);

/// Multi-stage learning with theta re-estimated after every stage by the
/// first significant jump in the sorted row norms, cut off at
/// tau = tau_multiplier * max_j t_j / n.
std::vector<StageTrace> run_msmtfl_at(const TaskDataset& data, const MultistageConfig& config);

/// lambda = alpha * sqrt(ln(d m) / n), n being the per-task sample count.
double lambda_from_alpha(double alpha, std::size_t features, std::size_t tasks,
                         std::size_t samples_per_task);

/// Multiples k of m * lambda used as fixed thresholds theta = k m lambda.
inline constexpr std::array<double, 4> kThetaPresets{50.0, 10.0, 2.0, 0.4};

/// Same objective as capped_l1l1_objective but admits theta = 0 or +inf.
double capped_objective_unchecked(const TaskDataset& data, const WeightMatrix& weights,
                                  double lambda, double theta);

} // namespace mtfl
