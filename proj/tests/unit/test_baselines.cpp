#include <doctest.h>

#include <cmath>

#include "mtfl/baselines.hpp"
#include "support.hpp"

using namespace mtfl;

namespace {

double l21_objective_oracle(const TaskDataset& data, const std::vector<double>& w, double lambda) {
    // w is row-major d x m.
    const std::size_t d = data.feature_count(), m = data.task_count();
    Matrix values(d, m);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < m; ++i) values(j, i) = w[j * m + i];
    double pen = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) sq += values(j, i) * values(j, i);
        pen += std::sqrt(sq);
    }
    return testing::loss_oracle(data, WeightMatrix(values)) + lambda * pen;
}

} // namespace

TEST_SUITE("baselines") {

TEST_CASE("row shrinkage") {
    Matrix w(3, 2);
    w << 3, 4, 0.3, 0.4, 0, 0;
    const Matrix s = row_shrink(w, 0.5);
    CHECK(s(0, 0) == doctest::Approx(3 * 0.9));
    CHECK(s(0, 1) == doctest::Approx(4 * 0.9));
    CHECK(s.row(1).isZero(0.0));  // norm exactly at the threshold
    CHECK(s.row(2).isZero(0.0));
    CHECK(row_shrink(w, 0.0) == w);
}

TEST_CASE("options are validated") {
    testing::Gen gen(1);
    const auto data = gen.dataset(2, 3, 3, 2);
    L21Options options;
    options.lambda = -1.0;
    CHECK_THROWS(solve_l21(data, options));
    options.lambda = 0.1;
    options.tolerance = 0.0;
    CHECK_THROWS(solve_l21(data, options));
    options.tolerance = 1e-9;
    options.max_iterations = 0;
    CHECK_THROWS(solve_l21(data, options));
}

TEST_CASE("largest squared singular value matches an SVD") {
    testing::Gen gen(2);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix x = gen.normal_matrix(gen.integer(2, 20), gen.integer(2, 20));
        const double sigma = Eigen::JacobiSVD<Matrix>(x).singularValues()[0];
        CHECK(largest_squared_singular_value(x) == doctest::Approx(sigma * sigma).epsilon(1e-6));
    }
}

TEST_CASE("lambda = 0 with square invertible designs is least squares") {
    testing::Gen gen(3);
    std::vector<Task> tasks;
    for (int i = 0; i < 3; ++i) {
        tasks.push_back({gen.normal_matrix(4, 4) * 0.3 + Matrix::Identity(4, 4), gen.normal_vector(4)});
    }
    const TaskDataset data(tasks);
    L21Options options;
    options.lambda = 0.0;
    options.max_iterations = 20000;
    const auto result = solve_l21(data, options);
    for (std::size_t i = 0; i < 3; ++i) {
        const Vector exact = data.design(i).partialPivLu().solve(data.response(i));
        CHECK((result.solution.column(i) - exact).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("large lambda zeroes every row") {
    testing::Gen gen(4);
    const auto data = gen.dataset(3, 5, 8, 6);
    L21Options options;
    options.lambda = 1e3;
    const auto result = solve_l21(data, options);
    CHECK(result.solution == WeightMatrix::zeros(6, 3));
    CHECK(result.converged);
}

TEST_CASE("objective history is nonincreasing") {
    testing::Gen gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto data = gen.dataset(3, 10, 20, 15);
        L21Options options;
        options.lambda = gen.uniform(0.01, 0.3);
        const auto result = solve_l21(data, options);
        REQUIRE_FALSE(result.objective_history.empty());
        CHECK(result.iterations == result.objective_history.size());
        for (std::size_t k = 1; k < result.objective_history.size(); ++k) {
            CHECK(result.objective_history[k] <= result.objective_history[k - 1]);
        }
        CHECK(result.objective == doctest::Approx(l21_objective(data, result.solution, options.lambda))
                                      .epsilon(1e-14));
    }
}

TEST_CASE("d = 2, m = 2 matches a grid search") {
    testing::Gen gen(6);
    for (int trial = 0; trial < 5; ++trial) {
        const auto data = gen.dataset(2, 4, 6, 2);
        const double lambda = gen.uniform(0.05, 0.5);
        L21Options options;
        options.lambda = lambda;
        const auto result = solve_l21(data, options);
        const auto f = [&](const std::vector<double>& w) { return l21_objective_oracle(data, w, lambda); };
        const auto best = testing::grid_minimize(f, {0, 0, 0, 0}, 4.0, 6, 1e-4);
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t i = 0; i < 2; ++i)
                CHECK(std::fabs(result.solution(j, i) - best[j * 2 + i]) < 2e-3);
    }
}

TEST_CASE("l11 Lasso: zero bound and grid search") {
    testing::Gen gen(7);
    const auto data = gen.dataset(1, 3, 3, 2);
    CHECK(solve_lasso_l11(data, 1e4) == WeightMatrix::zeros(2, 1));
    const double lambda = 0.2;
    const auto w = solve_lasso_l11(data, lambda);
    const auto f = [&](const std::vector<double>& p) {
        Matrix v(2, 1);
        v << p[0], p[1];
        return testing::loss_oracle(data, WeightMatrix(v)) + lambda * (std::fabs(p[0]) + std::fabs(p[1]));
    };
    const auto best = testing::grid_minimize(f, {0, 0}, 5.0, 8, 1e-5);
    CHECK(std::fabs(w(0, 0) - best[0]) < 1e-3);
    CHECK(std::fabs(w(1, 0) - best[1]) < 1e-3);
}

}
