#include <doctest.h>

#include <cmath>

#include "mtfl/baselines.hpp"
#include "mtfl/wlasso.hpp"
#include "support.hpp"

using namespace mtfl;

namespace {

// Per-task objective (1/(m n)) ||X w - y||^2 + sum_j lambda_j |w_j| by loops.
double task_objective(const Matrix& x, const Vector& y, const Vector& w, const Vector& lambdas,
                      std::size_t m) {
    double sq = 0.0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        double pred = 0.0;
        for (Eigen::Index c = 0; c < x.cols(); ++c) pred += x(r, c) * w[c];
        sq += (pred - y[r]) * (pred - y[r]);
    }
    double pen = 0.0;
    for (Eigen::Index c = 0; c < w.size(); ++c) pen += lambdas[c] * std::fabs(w[c]);
    return sq / (static_cast<double>(m) * static_cast<double>(x.rows())) + pen;
}

double zero_solution_bound(const TaskDataset& data) {
    double bound = 0.0;
    const double m = static_cast<double>(data.task_count());
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        const Vector g = 2.0 / (m * static_cast<double>(data.samples(i))) *
                         data.design(i).transpose() * data.response(i);
        bound = std::max(bound, g.cwiseAbs().maxCoeff());
    }
    return bound;
}

} // namespace

TEST_SUITE("wlasso") {

TEST_CASE("soft threshold") {
    CHECK(soft_threshold(5.0, 2.0) == 3.0);
    CHECK(soft_threshold(-1.0, 2.0) == 0.0);
    CHECK(soft_threshold(-5.0, 2.0) == -3.0);
    for (double x : {-3.5, 0.0, 1e-300, 7.25}) CHECK(soft_threshold(x, 0.0) == x);
}

TEST_CASE("options are validated") {
    SolverOptions options;
    options.tolerance = 0.0;
    CHECK_THROWS(options.validate());
    options.tolerance = 1e-8;
    options.max_sweeps = 0;
    CHECK_THROWS(options.validate());
}

TEST_CASE("penalty length must match d") {
    testing::Gen gen(1);
    const auto data = gen.dataset(2, 3, 3, 4);
    CHECK_THROWS_AS(solve_weighted_l1(data, PenaltyVector::uniform(3, 0.1)), DimensionError);
}

TEST_CASE("penalties above the zero-solution bound give W = 0") {
    testing::Gen gen(2);
    for (int trial = 0; trial < 10; ++trial) {
        const auto data = gen.dataset(3, 4, 8, 6);
        const double lambda = zero_solution_bound(data) * 1.0001;
        const auto report = solve_weighted_l1(data, PenaltyVector::uniform(6, lambda));
        CHECK(report.solution == WeightMatrix::zeros(6, 3));
        CHECK(report.all_converged());
    }
}

TEST_CASE("zero penalties on a square invertible design give X^-1 y") {
    testing::Gen gen(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Task> tasks;
        for (int i = 0; i < 2; ++i) {
            Matrix x = gen.normal_matrix(4, 4) + 4.0 * Matrix::Identity(4, 4);
            tasks.push_back({x, gen.normal_vector(4)});
        }
        const TaskDataset data(tasks);
        const auto report = solve_weighted_l1(data, PenaltyVector::uniform(4, 0.0));
        REQUIRE(report.all_converged());
        for (std::size_t i = 0; i < 2; ++i) {
            const Vector exact = data.design(i).partialPivLu().solve(data.response(i));
            CHECK((report.solution.column(i) - exact).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("d = 1 matches the closed form") {
    testing::Gen gen(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = gen.integer(1, 3);
        const auto data = gen.dataset(m, 1, 12, 1);
        const double lambda = gen.uniform(0.0, 1.0);
        const auto report = solve_weighted_l1(data, PenaltyVector::uniform(1, lambda));
        for (std::size_t i = 0; i < m; ++i) {
            const Vector x = data.design(i).col(0);
            const double n = static_cast<double>(data.samples(i));
            const double a = x.dot(data.response(i));
            const double b = lambda * static_cast<double>(m) * n / 2.0;
            const double closed = (a > b ? a - b : a < -b ? a + b : 0.0) / x.squaredNorm();
            CHECK(std::fabs(report.solution(0, i) - closed) <= 1e-8);
        }
    }
}

TEST_CASE("effective penalty folds the loss scaling") {
    CHECK(effective_penalty(0.2, 5, 30) == doctest::Approx(15.0));
    CHECK(effective_penalty(1.0, 1, 1) == 0.5);
}

TEST_CASE("d = 2, m = 1 matches a grid search") {
    testing::Gen gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto data = gen.dataset(1, 3, 3, 2);
        const Vector lambdas{{gen.uniform(0.0, 0.6), gen.uniform(0.0, 0.6)}};
        const auto report = solve_weighted_l1(data, PenaltyVector(lambdas));
        const auto& x = data.design(0);
        const auto& y = data.response(0);
        const Vector ls = x.colPivHouseholderQr().solve(y);
        const auto f = [&](const std::vector<double>& p) {
            return task_objective(x, y, Vector{{p[0], p[1]}}, lambdas, 1);
        };
        const double radius = std::max(1.0, 2.0 * ls.cwiseAbs().maxCoeff());
        const auto best = testing::grid_minimize(f, {0.0, 0.0}, radius, 8, 1e-5);
        CHECK(std::fabs(report.solution(0, 0) - best[0]) < 1e-3);
        CHECK(std::fabs(report.solution(1, 0) - best[1]) < 1e-3);
        CHECK(f({report.solution(0, 0), report.solution(1, 0)}) <= f(best) + 1e-9);
    }
}

TEST_CASE("solutions satisfy the KKT conditions") {
    testing::Gen gen(6);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m = gen.integer(1, 3);
        const std::size_t d = gen.integer(1, 10);
        const auto data = gen.dataset(m, 2, 15, d);
        Vector lambdas(d);
        for (Eigen::Index j = 0; j < lambdas.size(); ++j)
            lambdas[j] = gen.coin(0.3) ? 0.0 : gen.uniform(0.0, 0.5);
        const auto report = solve_weighted_l1(data, PenaltyVector(lambdas));
        REQUIRE(report.all_converged());

        for (std::size_t i = 0; i < m; ++i) {
            CHECK(report.kkt_residual[i] <= 1e-8);
            const auto& x = data.design(i);
            const Vector w = report.solution.column(i);
            const Vector g = 2.0 / (static_cast<double>(m) * static_cast<double>(x.rows())) *
                             x.transpose() * (x * w - data.response(i));
            for (Eigen::Index j = 0; j < g.size(); ++j) {
                if (lambdas[j] == 0.0) CHECK(std::fabs(g[j]) <= 1e-8);
                else if (w[j] == 0.0) CHECK(std::fabs(g[j]) <= lambdas[j] + 1e-8);
                else CHECK(std::fabs(g[j] + (w[j] > 0 ? 1.0 : -1.0) * lambdas[j]) <= 1e-8);
            }
        }
    }
}

TEST_CASE("the objective never increases between sweeps") {
    testing::Gen gen(7);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 2;
        const auto data = gen.dataset(m, 8, 12, 20);
        const Vector lambdas = Vector::Constant(20, gen.uniform(0.01, 0.2));
        std::vector<double> last(m, std::numeric_limits<double>::infinity());
        std::size_t sweeps_seen = 0;
        bool monotone = true;
        SolverOptions options;
        options.on_sweep = [&](std::size_t task, std::size_t, const Vector& w) {
            const double value = task_objective(data.design(task), data.response(task), w, lambdas, m);
            if (value > last[task] * (1.0 + 1e-13) + 1e-15) monotone = false;
            last[task] = value;
            ++sweeps_seen;
        };
        const auto report = solve_weighted_l1(data, PenaltyVector(lambdas), options);
        CHECK(monotone);
        CHECK(sweeps_seen == report.sweeps_used[0] + report.sweeps_used[1]);
    }
}

TEST_CASE("uniform penalties reproduce the l11 Lasso bitwise") {
    testing::Gen gen(8);
    const auto data = gen.dataset(3, 10, 15, 12);
    const auto report = solve_weighted_l1(data, PenaltyVector::uniform(12, 0.05));
    CHECK(report.solution == solve_lasso_l11(data, 0.05));
}

TEST_CASE("repeated solves are bit-identical") {
    testing::Gen gen(9);
    const auto data = gen.dataset(4, 10, 20, 30);
    const auto p = PenaltyVector::uniform(30, 0.02);
    const auto a = solve_weighted_l1(data, p);
    const auto b = solve_weighted_l1(data, p);
    CHECK(a.solution == b.solution);
    CHECK(a.sweeps_used == b.sweeps_used);
}

TEST_CASE("warm start reaches the same optimum") {
    testing::Gen gen(10);
    const auto data = gen.dataset(2, 20, 25, 10);
    const auto p = PenaltyVector::uniform(10, 0.03);
    const auto cold = solve_weighted_l1(data, p);
    SolverOptions options;
    options.warm_start = gen.weights(10, 2);
    const auto warm = solve_weighted_l1(data, p, options);
    CHECK((cold.solution.values() - warm.solution.values()).cwiseAbs().maxCoeff() < 1e-7);
    CHECK_THROWS_AS(solve_weighted_l1(data, p, [&] {
                        SolverOptions bad;
                        bad.warm_start = WeightMatrix::zeros(9, 2);
                        return bad;
                    }()),
                    DimensionError);
}

TEST_CASE("non-convergence is reported, not thrown") {
    testing::Gen gen(11);
    const auto data = gen.dataset(2, 10, 10, 40);
    SolverOptions options;
    options.max_sweeps = 1;
    options.tolerance = 1e-14;
    const auto report = solve_weighted_l1(data, PenaltyVector::uniform(40, 1e-4), options);
    CHECK_FALSE(report.all_converged());
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(report.sweeps_used[i] <= 1);
        if (report.converged[i]) CHECK(report.kkt_residual[i] <= options.tolerance);
    }
}

}
