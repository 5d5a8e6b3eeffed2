#include "mtfl/multistage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtfl {

namespace {

struct ThresholdChoice {
    double theta = kNoThreshold;
    std::optional<double> tau;
    std::optional<std::size_t> jump_index;
};

void validate(const MultistageConfig& config) {
    if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) {
        throw std::invalid_argument("multistage: lambda must be a positive finite number");
    }
    if (config.stages < 1) throw std::invalid_argument("multistage: stages must be >= 1");
    config.solver.validate();
}

template <class ChooseThreshold>
std::vector<StageTrace> run_stages(const TaskDataset& data, const MultistageConfig& config,
                                   ChooseThreshold choose) {
    validate(config);
    std::vector<StageTrace> traces;
    traces.reserve(config.stages);

    auto penalties = PenaltyVector::uniform(data.feature_count(), config.lambda);
    SolverOptions solver = config.solver;
    solver.warm_start.reset();

    std::optional<PenaltyVector> solved_with;
    for (std::size_t stage = 1; stage <= config.stages; ++stage) {
        StageTrace trace;
        trace.stage = stage;
        if (solved_with && *solved_with == penalties) {
            // Same subproblem as the previous stage: reuse its solution.
            const auto& previous = traces.back();
            trace.solution = previous.solution;
            trace.solver = previous.solver;
        } else {
            auto report = solve_weighted_l1(data, penalties, solver);
            trace.solution = std::move(report.solution);
            for (auto sweeps : report.sweeps_used) trace.solver.total_sweeps += sweeps;
            trace.solver.max_kkt_residual = report.max_kkt_residual();
            trace.solver.converged = report.all_converged();
        }
        trace.row_norms = row_l1_norms(trace.solution);

        const ThresholdChoice choice = choose(trace.row_norms);
        trace.theta = choice.theta;
        trace.tau = choice.tau;
        trace.jump_index = choice.jump_index;
        trace.penalties = PenaltyVector::from_indicator(trace.row_norms, trace.theta, config.lambda);
        trace.objective =
            capped_objective_unchecked(data, trace.solution, config.lambda, trace.theta);

        solved_with = penalties;
        penalties = trace.penalties;
        solver.warm_start = trace.solution;
        traces.push_back(std::move(trace));

        if (config.early_stop && *solved_with == penalties) break;
    }
    return traces;
}

} // namespace

double capped_objective_unchecked(const TaskDataset& data, const WeightMatrix& weights,
                                  double lambda, double theta) {
    const auto norms = row_l1_norms(weights);
    double penalty = 0.0;
    for (std::size_t j = 0; j < norms.size(); ++j) penalty += std::min(norms[j], theta);
    return quadratic_loss(data, weights) + lambda * penalty;
}

std::vector<StageTrace> run_msmtfl(const TaskDataset& data, const MultistageConfig& config) {
    if (!config.theta || !(*config.theta > 0.0)) {
        throw std::invalid_argument("run_msmtfl: a positive theta is required");
    }
    const double theta = *config.theta;
    return run_stages(data, config, [theta](const RowNormVector&) {
        return ThresholdChoice{theta, std::nullopt, std::nullopt};
    });
}

std::vector<StageTrace> run_msmtfl_at(const TaskDataset& data, const MultistageConfig& config) {
    if (!(config.tau_multiplier > 0.0) || !std::isfinite(config.tau_multiplier)) {
        throw std::invalid_argument("run_msmtfl_at: tau multiplier must be positive and finite");
    }
    const auto n = data.total_samples();
    const double multiplier = config.tau_multiplier;
    return run_stages(data, config, [n, multiplier](const RowNormVector& norms) {
        const double tau = multiplier * compute_tau(norms, n);
        const auto jump = first_significant_jump(norms, tau);
        return ThresholdChoice{jump.theta, tau, jump.jump_index};
    });
}

double lambda_from_alpha(double alpha, std::size_t features, std::size_t tasks,
                         std::size_t samples_per_task) {
    if (!(alpha > 0.0)) throw std::invalid_argument("lambda_from_alpha: alpha must be > 0");
    if (features * tasks < 2 || samples_per_task == 0) {
        throw std::invalid_argument("lambda_from_alpha: need d*m >= 2 and n >= 1");
    }
    const double dm = static_cast<double>(features) * static_cast<double>(tasks);
    return alpha * std::sqrt(std::log(dm) / static_cast<double>(samples_per_task));
}

} // namespace mtfl
