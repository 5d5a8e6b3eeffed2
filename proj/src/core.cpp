#include "mtfl/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mtfl {

TaskDataset::TaskDataset(std::vector<Task> tasks) : tasks_(std::move(tasks)) {
    if (tasks_.empty()) {
        throw DimensionError("TaskDataset: at least one task is required");
    }
    features_ = static_cast<std::size_t>(tasks_.front().design.cols());
    if (features_ == 0) {
        throw DimensionError("TaskDataset: feature dimension must be at least 1");
    }
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        const auto& task = tasks_[i];
        const auto id = std::to_string(i);
        if (static_cast<std::size_t>(task.design.cols()) != features_) {
            throw DimensionError("TaskDataset: task " + id + " has " +
                                 std::to_string(task.design.cols()) + " features, expected " +
                                 std::to_string(features_));
        }
        if (task.design.rows() < 1) {
            throw DimensionError("TaskDataset: task " + id + " has no samples");
        }
        if (task.response.size() != task.design.rows()) {
            throw DimensionError("TaskDataset: task " + id + " response length " +
                                 std::to_string(task.response.size()) + " != sample count " +
                                 std::to_string(task.design.rows()));
        }
        total_samples_ += static_cast<std::size_t>(task.design.rows());
    }
}

bool TaskDataset::operator==(const TaskDataset& other) const {
    if (tasks_.size() != other.tasks_.size()) return false;
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        const auto& a = tasks_[i];
        const auto& b = other.tasks_[i];
        if (a.design.rows() != b.design.rows() || a.design.cols() != b.design.cols()) return false;
        if (a.design != b.design || a.response != b.response) return false;
    }
    return true;
}

WeightMatrix::WeightMatrix(Matrix values) : values_(std::move(values)) {
    if (!values_.allFinite()) {
        throw NumericalError("WeightMatrix: entries must be finite");
    }
}

WeightMatrix WeightMatrix::zeros(std::size_t features, std::size_t tasks) {
    return WeightMatrix(Matrix::Zero(static_cast<Eigen::Index>(features),
                                     static_cast<Eigen::Index>(tasks)));
}

bool WeightMatrix::operator==(const WeightMatrix& other) const {
    return values_.rows() == other.values_.rows() && values_.cols() == other.values_.cols() &&
           values_ == other.values_;
}

RowNormVector::RowNormVector(Vector values) : values_(std::move(values)) {
    for (Eigen::Index j = 0; j < values_.size(); ++j) {
        if (!(values_[j] >= 0.0)) {
            throw std::invalid_argument("RowNormVector: entries must be nonnegative");
        }
    }
}

PenaltyVector::PenaltyVector(Vector lambdas) : lambdas_(std::move(lambdas)) {
    for (Eigen::Index j = 0; j < lambdas_.size(); ++j) {
        if (!(lambdas_[j] >= 0.0) || std::isinf(lambdas_[j])) {
            throw std::invalid_argument("PenaltyVector: entries must be finite and nonnegative");
        }
    }
}

PenaltyVector PenaltyVector::uniform(std::size_t features, double lambda) {
    return PenaltyVector(Vector::Constant(static_cast<Eigen::Index>(features), lambda));
}

PenaltyVector PenaltyVector::from_indicator(const RowNormVector& norms, double theta,
                                            double lambda) {
    Vector lambdas(static_cast<Eigen::Index>(norms.size()));
    for (std::size_t j = 0; j < norms.size(); ++j) {
        lambdas[static_cast<Eigen::Index>(j)] = norms[j] < theta ? lambda : 0.0;
    }
    return PenaltyVector(std::move(lambdas));
}

void check_dimensions(const TaskDataset& data, const WeightMatrix& weights) {
    if (weights.features() != data.feature_count() || weights.tasks() != data.task_count()) {
        throw DimensionError("weight matrix is " + std::to_string(weights.features()) + "x" +
                             std::to_string(weights.tasks()) + ", dataset needs " +
                             std::to_string(data.feature_count()) + "x" +
                             std::to_string(data.task_count()));
    }
}

double quadratic_loss(const TaskDataset& data, const WeightMatrix& weights) {
    check_dimensions(data, weights);
    const auto m = static_cast<double>(data.task_count());
    double loss = 0.0;
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        const Vector residual = data.design(i) * weights.column(i) - data.response(i);
        loss += residual.squaredNorm() / (m * static_cast<double>(data.samples(i)));
    }
    return loss;
}

RowNormVector row_l1_norms(const WeightMatrix& weights) {
    return RowNormVector(weights.values().cwiseAbs().rowwise().sum());
}

double l11_norm(const WeightMatrix& weights) {
    // Same summation order as the capped penalty, so the uncapped case agrees exactly.
    const auto norms = row_l1_norms(weights);
    double total = 0.0;
    for (std::size_t j = 0; j < norms.size(); ++j) total += norms[j];
    return total;
}

double capped_l1l1_objective(const TaskDataset& data, const WeightMatrix& weights, double lambda,
                             double theta) {
    if (!(lambda > 0.0)) throw std::invalid_argument("capped_l1l1_objective: lambda must be > 0");
    if (!(theta > 0.0)) throw std::invalid_argument("capped_l1l1_objective: theta must be > 0");
    const double loss = quadratic_loss(data, weights);
    const auto norms = row_l1_norms(weights);
    double penalty = 0.0;
    for (std::size_t j = 0; j < norms.size(); ++j) {
        penalty += std::min(norms[j], theta);
    }
    return loss + lambda * penalty;
}

} // namespace mtfl
