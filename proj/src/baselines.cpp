#include "mtfl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtfl {

namespace {

double smooth_loss(const TaskDataset& data, const Matrix& w) {
    const auto m = static_cast<double>(data.task_count());
    double loss = 0.0;
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        loss += (data.design(i) * w.col(col) - data.response(i)).squaredNorm() /
                (m * static_cast<double>(data.samples(i)));
    }
    return loss;
}

Matrix smooth_gradient(const TaskDataset& data, const Matrix& w) {
    const auto m = static_cast<double>(data.task_count());
    Matrix grad(w.rows(), w.cols());
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        const auto& x = data.design(i);
        grad.col(col) = (2.0 / (m * static_cast<double>(data.samples(i)))) *
                        (x.transpose() * (x * w.col(col) - data.response(i)));
    }
    return grad;
}

double row_norm_sum(const Matrix& w) { return w.rowwise().norm().sum(); }

} // namespace

WeightMatrix solve_lasso_l11(const TaskDataset& data, double lambda, const SolverOptions& options) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_lasso_l11: lambda must be > 0");
    return solve_weighted_l1(data, PenaltyVector::uniform(data.feature_count(), lambda), options)
        .solution;
}

void L21Options::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("L21Options: lambda must be finite and >= 0");
    }
    if (!(tolerance > 0.0)) throw std::invalid_argument("L21Options: tolerance must be > 0");
    if (max_iterations == 0) throw std::invalid_argument("L21Options: max_iterations must be >= 1");
}

Matrix row_shrink(const Matrix& weights, double threshold) {
    Matrix out = weights;
    for (Eigen::Index j = 0; j < out.rows(); ++j) {
        const double norm = out.row(j).norm();
        if (norm <= threshold) {
            out.row(j).setZero();
        } else {
            out.row(j) *= 1.0 - threshold / norm;
        }
    }
    return out;
}

double l21_objective(const TaskDataset& data, const WeightMatrix& weights, double lambda) {
    check_dimensions(data, weights);
    return smooth_loss(data, weights.values()) + lambda * row_norm_sum(weights.values());
}

double largest_squared_singular_value(const Matrix& design) {
    Vector v = Vector::Ones(design.cols()).normalized();
    double estimate = 0.0;
    for (int it = 0; it < 500; ++it) {
        Vector next = design.transpose() * (design * v);
        const double norm = next.norm();
        if (norm == 0.0) return 0.0;
        next /= norm;
        const bool settled = std::abs(norm - estimate) <= 1e-12 * norm;
        estimate = norm;
        v = std::move(next);
        if (settled) break;
    }
    return estimate;
}

// The L2,1 and "efficient" L2,1 comparison lines share this solver: they
// optimise the same model.
L21Result solve_l21(const TaskDataset& data, const L21Options& options) {
    options.validate();
    const auto d = static_cast<Eigen::Index>(data.feature_count());
    const auto m = static_cast<Eigen::Index>(data.task_count());
    const double lambda = options.lambda;

    double lipschitz = 0.0;
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        lipschitz = std::max(lipschitz, 2.0 * largest_squared_singular_value(data.design(i)) /
                                            (static_cast<double>(m) *
                                             static_cast<double>(data.samples(i))));
    }
    if (lipschitz == 0.0) lipschitz = 1.0;

    Matrix x = Matrix::Zero(d, m);
    Matrix y = x;
    double objective = smooth_loss(data, x);
    double t = 1.0;

    L21Result result;
    result.objective_history.reserve(options.max_iterations);
    for (std::size_t k = 0; k < options.max_iterations; ++k) {
        const double fy = smooth_loss(data, y);
        const Matrix grad = smooth_gradient(data, y);
        Matrix z;
        for (;;) {
            z = row_shrink(y - grad / lipschitz, lambda / lipschitz);
            const Matrix step = z - y;
            const double bound =
                fy + (grad.array() * step.array()).sum() + 0.5 * lipschitz * step.squaredNorm();
            if (smooth_loss(data, z) <= bound + 1e-15 * std::abs(bound)) break;
            lipschitz *= 2.0;
        }
        const double fz = smooth_loss(data, z) + lambda * row_norm_sum(z);
        const bool accepted = fz <= objective;
        Matrix next = accepted ? z : x;
        const double next_objective = accepted ? fz : objective;

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = next + (t / t_next) * (z - next) + ((t - 1.0) / t_next) * (next - x);
        t = t_next;

        const double change = std::abs(objective - next_objective);
        x = std::move(next);
        objective = next_objective;
        result.objective_history.push_back(objective);
        result.iterations = k + 1;
        if (!std::isfinite(objective)) {
            throw NumericalError("solve_l21: objective became non-finite");
        }
        if (accepted && change <= options.tolerance * std::abs(objective)) {
            result.converged = true;
            break;
        }
    }
    result.solution = WeightMatrix(std::move(x));
    result.objective = objective;
    return result;
}

} // namespace mtfl
