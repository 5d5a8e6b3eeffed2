#include "mtfl/metrics.hpp"

#include <stdexcept>
#include <string>

namespace mtfl {

namespace {
void check_lengths(const Vector& a, const Vector& b, const char* what) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(what) + ": predicted has " + std::to_string(a.size()) +
                             " entries, reference has " + std::to_string(b.size()));
    }
}
} // namespace

double l21_error(const WeightMatrix& estimated, const WeightMatrix& truth) {
    if (estimated.features() != truth.features() || estimated.tasks() != truth.tasks()) {
        throw DimensionError("l21_error: matrices differ in shape");
    }
    return (estimated.values() - truth.values()).rowwise().norm().sum();
}

double nmse(const Vector& predicted, const Vector& reference, std::size_t samples) {
    check_lengths(predicted, reference, "nmse");
    const double pred_l1 = predicted.lpNorm<1>();
    const double ref_l1 = reference.lpNorm<1>();
    if (pred_l1 == 0.0 || ref_l1 == 0.0) {
        throw std::domain_error("nmse: zero denominator (||predicted||_1 = " +
                                std::to_string(pred_l1) + ", ||reference||_1 = " +
                                std::to_string(ref_l1) + ")");
    }
    return static_cast<double>(samples) * (predicted - reference).squaredNorm() /
           (pred_l1 * ref_l1);
}

double amse(const Vector& predicted, const Vector& reference) {
    check_lengths(predicted, reference, "amse");
    const double ref_norm = reference.norm();
    if (ref_norm == 0.0) throw std::domain_error("amse: reference vector has zero norm");
    return (predicted - reference).norm() / ref_norm;
}

Vector predict(const TaskDataset& data, const WeightMatrix& weights) {
    check_dimensions(data, weights);
    Vector out(static_cast<Eigen::Index>(data.total_samples()));
    Eigen::Index offset = 0;
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        const auto rows = static_cast<Eigen::Index>(data.samples(i));
        out.segment(offset, rows) = data.design(i) * weights.column(i);
        offset += rows;
    }
    return out;
}

Vector stacked_responses(const TaskDataset& data) {
    Vector out(static_cast<Eigen::Index>(data.total_samples()));
    Eigen::Index offset = 0;
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        const auto rows = static_cast<Eigen::Index>(data.samples(i));
        out.segment(offset, rows) = data.response(i);
        offset += rows;
    }
    return out;
}

EvaluationResult evaluate_predictions(const TaskDataset& data, const WeightMatrix& weights) {
    const Vector predicted = predict(data, weights);
    const Vector reference = stacked_responses(data);
    EvaluationResult result;
    result.nmse = nmse(predicted, reference, data.total_samples());
    result.amse = amse(predicted, reference);
    return result;
}

std::vector<EvaluationResult> evaluate_predictions_per_task(const TaskDataset& data,
                                                            const WeightMatrix& weights) {
    check_dimensions(data, weights);
    std::vector<EvaluationResult> out;
    out.reserve(data.task_count());
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        const Vector predicted = data.design(i) * weights.column(i);
        EvaluationResult r;
        r.nmse = nmse(predicted, data.response(i), data.samples(i));
        r.amse = amse(predicted, data.response(i));
        out.push_back(r);
    }
    return out;
}

} // namespace mtfl
