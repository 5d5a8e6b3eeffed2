#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mtfl/error.hpp"

namespace mtfl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One regression task: an n_i x d design matrix and its n_i responses.
struct Task {
    Matrix design;
    Vector response;
};

/// m regression tasks over a shared feature space of dimension d.
///
/// Validated on construction: at least one task, d >= 1, every task has at
/// least one sample, and every response length matches its design rows.
class TaskDataset {
public:
    explicit TaskDataset(std::vector<Task> tasks);

    std::size_t task_count() const { return tasks_.size(); }
    std::size_t feature_count() const { return features_; }
    std::size_t samples(std::size_t task) const {
        return static_cast<std::size_t>(tasks_[task].design.rows());
    }
    /// n = sum of n_i over all tasks.
    std::size_t total_samples() const { return total_samples_; }

    const Matrix& design(std::size_t task) const { return tasks_[task].design; }
    const Vector& response(std::size_t task) const { return tasks_[task].response; }
    const std::vector<Task>& tasks() const { return tasks_; }

    bool operator==(const TaskDataset& other) const;

private:
    std::vector<Task> tasks_;
    std::size_t features_ = 0;
    std::size_t total_samples_ = 0;
};

/// d x m weight matrix W = [w_1, ..., w_m]. Column i is task i's weight
/// vector, row j holds feature j's weights across tasks. Entries are finite.
class WeightMatrix {
public:
    WeightMatrix() = default;
    explicit WeightMatrix(Matrix values);

    static WeightMatrix zeros(std::size_t features, std::size_t tasks);

    std::size_t features() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t tasks() const { return static_cast<std::size_t>(values_.cols()); }

    const Matrix& values() const { return values_; }
    auto column(std::size_t task) const { return values_.col(static_cast<Eigen::Index>(task)); }
    auto row(std::size_t feature) const { return values_.row(static_cast<Eigen::Index>(feature)); }
    double operator()(std::size_t feature, std::size_t task) const {
        return values_(static_cast<Eigen::Index>(feature), static_cast<Eigen::Index>(task));
    }

    /// Exact element-wise equality (bitwise for finite values up to signed zero).
    bool operator==(const WeightMatrix& other) const;

private:
    Matrix values_;
};

/// t[j] = ||w^j||_1, the l1 norm of each row of a weight matrix.
class RowNormVector {
public:
    RowNormVector() = default;
    explicit RowNormVector(Vector values);

    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t j) const { return values_[static_cast<Eigen::Index>(j)]; }
    const Vector& values() const { return values_; }
    double max() const { return values_.size() == 0 ? 0.0 : values_.maxCoeff(); }
    double sum() const { return values_.sum(); }

private:
    Vector values_;
};

/// Per-row l1 penalty weights lambda_j >= 0.
class PenaltyVector {
public:
    PenaltyVector() = default;
    explicit PenaltyVector(Vector lambdas);

    /// lambda_j = lambda for every row.
    static PenaltyVector uniform(std::size_t features, double lambda);

    /// lambda_j = lambda * I(norms[j] < theta). Strict comparison; theta may be +inf.
    static PenaltyVector from_indicator(const RowNormVector& norms, double theta, double lambda);

    std::size_t size() const { return static_cast<std::size_t>(lambdas_.size()); }
    double operator[](std::size_t j) const { return lambdas_[static_cast<Eigen::Index>(j)]; }
    const Vector& values() const { return lambdas_; }

    bool operator==(const PenaltyVector& other) const { return lambdas_ == other.lambdas_; }

private:
    Vector lambdas_;
};

/// l(W) = sum_i ||X_i w_i - y_i||^2 / (m n_i).
double quadratic_loss(const TaskDataset& data, const WeightMatrix& weights);

/// l(W) + lambda * sum_j min(||w^j||_1, theta). Requires lambda > 0 and theta > 0.
double capped_l1l1_objective(const TaskDataset& data, const WeightMatrix& weights,
                             double lambda, double theta);

RowNormVector row_l1_norms(const WeightMatrix& weights);

/// ||W||_{1,1}, the sum of absolute entries.
double l11_norm(const WeightMatrix& weights);

/// Throws DimensionError unless W is d x m for the dataset.
void check_dimensions(const TaskDataset& data, const WeightMatrix& weights);

} // namespace mtfl
