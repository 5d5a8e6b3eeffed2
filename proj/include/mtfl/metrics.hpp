#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mtfl/core.hpp"

namespace mtfl {

/// Metrics of one fitted model; fields are left empty when not applicable.
struct EvaluationResult {
    std::optional<double> l21_error;
    std::optional<double> nmse;
    std::optional<double> amse;
};

/// ||estimated - truth||_{2,1}: sum over rows of the Euclidean norm of the row difference.
double l21_error(const WeightMatrix& estimated, const WeightMatrix& truth);

/// n ||pred - ref||^2 / (||pred||_1 ||ref||_1).
///
/// The denominator uses the l1 norm of the prediction itself, so inflating
/// predictions can lower the value. Throws std::domain_error when either l1
/// norm is zero and DimensionError on a length mismatch.
double nmse(const Vector& predicted, const Vector& reference, std::size_t samples);

/// ||pred - ref|| / ||ref||. Throws std::domain_error when ref is zero.
double amse(const Vector& predicted, const Vector& reference);

/// X_i w_i for every task, stacked in task order.
Vector predict(const TaskDataset& data, const WeightMatrix& weights);

/// y_i for every task, stacked in task order.
Vector stacked_responses(const TaskDataset& data);

/// nMSE and aMSE of W's predictions on data, with n the total sample count.
EvaluationResult evaluate_predictions(const TaskDataset& data, const WeightMatrix& weights);

/// Per-task diagnostics: entry i uses only task i's samples (n = n_i for nMSE).
std::vector<EvaluationResult> evaluate_predictions_per_task(const TaskDataset& data,
                                                            const WeightMatrix& weights);

} // namespace mtfl
