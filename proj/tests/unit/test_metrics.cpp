#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mtfl/metrics.hpp"
#include "support.hpp"

using namespace mtfl;

namespace {

double nmse_oracle(const Vector& p, const Vector& r, std::size_t n) {
    double sq = 0.0, l1p = 0.0, l1r = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        sq += (p[k] - r[k]) * (p[k] - r[k]);
        l1p += std::fabs(p[k]);
        l1r += std::fabs(r[k]);
    }
    return static_cast<double>(n) * sq / (l1p * l1r);
}

double amse_oracle(const Vector& p, const Vector& r) {
    double sq = 0.0, ref = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        sq += (p[k] - r[k]) * (p[k] - r[k]);
        ref += r[k] * r[k];
    }
    return std::sqrt(sq / ref);
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("l21 error examples") {
    testing::Gen gen(1);
    const auto w = gen.weights(5, 3);
    CHECK(l21_error(w, w) == 0.0);

    Matrix diff = Matrix::Zero(3, 2);
    diff.row(1) << 3, 4;
    CHECK(l21_error(WeightMatrix(diff), WeightMatrix::zeros(3, 2)) == 5.0);
    CHECK_THROWS_AS(l21_error(w, WeightMatrix::zeros(5, 2)), DimensionError);

    for (int trial = 0; trial < 30; ++trial) {
        const auto a = gen.weights(7, 4, 0.3);
        const auto b = gen.weights(7, 4, 0.3);
        const auto c = gen.weights(7, 4, 0.3);
        CHECK(l21_error(a, b) == doctest::Approx(testing::l21_error_oracle(a, b)).epsilon(1e-14));
        CHECK(l21_error(a, b) == l21_error(b, a));
        CHECK(l21_error(a, c) <= l21_error(a, b) + l21_error(b, c) + 1e-12);
    }
}

TEST_CASE("nmse examples") {
    CHECK(nmse(Vector{{1.0, -2.0}}, Vector{{1.0, -2.0}}, 2) == 0.0);
    CHECK(nmse(Vector{{2.0}}, Vector{{1.0}}, 1) == 0.5);
    CHECK_THROWS_AS(nmse(Vector::Zero(3), Vector::Ones(3), 3), std::domain_error);
    CHECK_THROWS_AS(nmse(Vector::Ones(3), Vector::Zero(3), 3), std::domain_error);
    CHECK_THROWS_AS(nmse(Vector::Ones(3), Vector::Ones(2), 3), DimensionError);

    testing::Gen gen(2);
    for (int trial = 0; trial < 30; ++trial) {
        const auto k = gen.integer(1, 20);
        const Vector p = gen.normal_vector(k), r = gen.normal_vector(k);
        CHECK(nmse(p, r, k) == doctest::Approx(nmse_oracle(p, r, k)).epsilon(1e-14));
        CHECK(nmse(p, r, k) == nmse(r, p, k));
    }
}

TEST_CASE("nmse can reward inflated predictions") {
    // Same absolute error above and below the reference.
    const Vector r{{1.0, 1.0}};
    const Vector over{{1.5, 1.5}}, under{{0.5, 0.5}};
    CHECK(amse(over, r) == amse(under, r));
    CHECK(nmse(over, r, 2) == doctest::Approx(1.0 / 6.0));
    CHECK(nmse(under, r, 2) == doctest::Approx(0.5));
}

TEST_CASE("amse examples") {
    const Vector r{{1.0, -2.0, 0.5}};
    CHECK(amse(r, r) == 0.0);
    CHECK(amse(2.0 * r, r) == 1.0);
    CHECK_THROWS_AS(amse(r, Vector::Zero(3)), std::domain_error);

    testing::Gen gen(3);
    for (int trial = 0; trial < 30; ++trial) {
        const auto k = gen.integer(1, 20);
        const Vector p = gen.normal_vector(k), y = gen.normal_vector(k);
        CHECK(amse(p, y) == doctest::Approx(amse_oracle(p, y)).epsilon(1e-14));
        const Matrix q = Eigen::HouseholderQR<Matrix>(gen.normal_matrix(k, k)).householderQ();
        CHECK(amse(q * p, q * y) == doctest::Approx(amse(p, y)).epsilon(1e-12));
    }
}

TEST_CASE("predictions are stacked in task order") {
    const TaskDataset data({Task{Matrix{{1.0, 0.0}, {0.0, 1.0}}, Vector{{1.0, 2.0}}},
                            Task{Matrix{{1.0, 1.0}}, Vector{{3.0}}}});
    const WeightMatrix w(Matrix{{1.0, 2.0}, {-1.0, 0.5}});
    CHECK(predict(data, w) == Vector{{1.0, -1.0, 2.5}});
    CHECK(stacked_responses(data) == Vector{{1.0, 2.0, 3.0}});

    const auto all = evaluate_predictions(data, w);
    CHECK_FALSE(all.l21_error.has_value());
    CHECK(*all.nmse == doctest::Approx(nmse_oracle(Vector{{1.0, -1.0, 2.5}}, Vector{{1.0, 2.0, 3.0}}, 3)));
    CHECK(*all.amse == doctest::Approx(amse_oracle(Vector{{1.0, -1.0, 2.5}}, Vector{{1.0, 2.0, 3.0}})));

    const auto per_task = evaluate_predictions_per_task(data, w);
    REQUIRE(per_task.size() == 2);
    CHECK(*per_task[0].nmse == doctest::Approx(2.0 * 9.0 / (2.0 * 3.0)));
    CHECK(*per_task[1].amse == doctest::Approx(0.5 / 3.0));
}

}
