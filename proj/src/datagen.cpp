#include "mtfl/datagen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mtfl/rng.hpp"

namespace mtfl {

void SyntheticSpec::validate() const {
    if (tasks < 1 || samples < 1 || features < 1) {
        throw std::invalid_argument("SyntheticSpec: m, n and d must all be >= 1");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("SyntheticSpec: sigma must be finite and >= 0");
    }
    if (!(row_zero_fraction >= 0.0 && row_zero_fraction < 1.0)) {
        throw std::invalid_argument("SyntheticSpec: row_zero_fraction must lie in [0, 1)");
    }
    if (!(entry_zero_fraction >= 0.0 && entry_zero_fraction < 1.0)) {
        throw std::invalid_argument("SyntheticSpec: entry_zero_fraction must lie in [0, 1)");
    }
}

SyntheticInstance generate(const SyntheticSpec& spec) {
    spec.validate();
    const auto d = static_cast<Eigen::Index>(spec.features);
    const auto m = static_cast<Eigen::Index>(spec.tasks);
    const auto n = static_cast<Eigen::Index>(spec.samples);
    Rng rng(spec.seed);

    Matrix truth(d, m);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) truth(j, i) = rng.uniform(-10.0, 10.0);
    }

    const auto zero_rows = static_cast<std::size_t>(
        std::floor(spec.row_zero_fraction * static_cast<double>(spec.features)));
    std::vector<bool> row_zeroed(spec.features, false);
    for (auto j : rng.sample(spec.features, zero_rows)) {
        row_zeroed[j] = true;
        truth.row(static_cast<Eigen::Index>(j)).setZero();
    }

    std::vector<std::pair<Eigen::Index, Eigen::Index>> surviving;
    for (Eigen::Index j = 0; j < d; ++j) {
        if (row_zeroed[static_cast<std::size_t>(j)]) continue;
        for (Eigen::Index i = 0; i < m; ++i) surviving.emplace_back(j, i);
    }
    const auto zero_entries = static_cast<std::size_t>(
        std::floor(spec.entry_zero_fraction * static_cast<double>(surviving.size())));
    for (auto k : rng.sample(surviving.size(), zero_entries)) {
        truth(surviving[k].first, surviving[k].second) = 0.0;
    }

    std::vector<Task> tasks;
    std::vector<Vector> noise;
    tasks.reserve(spec.tasks);
    noise.reserve(spec.tasks);
    for (Eigen::Index i = 0; i < m; ++i) {
        Matrix x(n, d);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) x(r, c) = rng.normal();
        }
        Vector delta(n);
        for (Eigen::Index r = 0; r < n; ++r) delta[r] = spec.sigma * rng.normal();
        Vector y = x * truth.col(i) + delta;
        tasks.push_back(Task{std::move(x), std::move(y)});
        noise.push_back(std::move(delta));
    }

    return SyntheticInstance{TaskDataset(std::move(tasks)), WeightMatrix(std::move(truth)),
                             std::move(noise)};
}

SyntheticSpec preset(std::string_view name) {
    SyntheticSpec spec;
    if (name == "fig2a") {
        spec.tasks = 20, spec.samples = 30, spec.features = 200, spec.sigma = 0.005;
    } else if (name == "fig2b") {
        spec.tasks = 15, spec.samples = 40, spec.features = 250, spec.sigma = 0.01;
    } else if (name == "fig2c") {
        spec.tasks = 25, spec.samples = 25, spec.features = 180, spec.sigma = 0.05;
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) +
                                    "' (expected fig2a, fig2b or fig2c)");
    }
    return spec;
}

} // namespace mtfl
