#include "mtfl/wlasso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace mtfl {

namespace {

struct TaskResult {
    Vector weights;
    std::size_t sweeps = 0;
    double kkt = 0.0;
    bool converged = false;
};

class CoordinateDescent {
public:
    CoordinateDescent(const Matrix& design, const Vector& response, const Vector& penalties,
                      std::size_t tasks, Vector start)
        : x_(design), y_(response), lambdas_(penalties), w_(std::move(start)) {
        const auto n = static_cast<std::size_t>(design.rows());
        scale_ = 2.0 / (static_cast<double>(tasks) * static_cast<double>(n));
        gamma_.resize(lambdas_.size());
        for (Eigen::Index j = 0; j < lambdas_.size(); ++j) {
            gamma_[j] = effective_penalty(lambdas_[j], tasks, n);
        }
        col_sq_ = x_.colwise().squaredNorm().transpose();
        refresh_residual();
    }

    void refresh_residual() { r_ = y_ - x_ * w_; }

    void update(Eigen::Index j) {
        const double c = col_sq_[j];
        if (c == 0.0) {
            w_[j] = 0.0;
            return;
        }
        const double old = w_[j];
        const double z = x_.col(j).dot(r_) + c * old;
        const double next = soft_threshold(z, gamma_[j]) / c;
        if (next != old) {
            r_.noalias() -= (next - old) * x_.col(j);
            w_[j] = next;
        }
    }

    void full_sweep() {
        for (Eigen::Index j = 0; j < w_.size(); ++j) update(j);
    }

    void active_sweep(const std::vector<Eigen::Index>& active) {
        for (auto j : active) update(j);
    }

    std::vector<Eigen::Index> active_set() const {
        std::vector<Eigen::Index> active;
        for (Eigen::Index j = 0; j < w_.size(); ++j) {
            if (w_[j] != 0.0) active.push_back(j);
        }
        return active;
    }

    double violation(Eigen::Index j) const {
        const double g = -scale_ * x_.col(j).dot(r_);
        const double lambda = lambdas_[j];
        if (w_[j] == 0.0) return std::max(0.0, std::abs(g) - lambda);
        return std::abs(g + std::copysign(lambda, w_[j]));
    }

    double kkt() const {
        double worst = 0.0;
        for (Eigen::Index j = 0; j < w_.size(); ++j) worst = std::max(worst, violation(j));
        return worst;
    }

    double kkt(const std::vector<Eigen::Index>& active) const {
        double worst = 0.0;
        for (auto j : active) worst = std::max(worst, violation(j));
        return worst;
    }

    // Minimises exactly over the face where the penalised active coordinates
    // keep their signs and the inactive ones stay zero. A rank-deficient face is first shrunk by
    // moving along a null direction of X_A that lowers the penalty until a
    // coordinate reaches zero. The result is kept only if the signs survive and
    // the objective does not rise.
    void solve_face(std::vector<Eigen::Index> active) {
        const double before = objective(w_, r_);
        Vector candidate = w_;
        while (!active.empty()) {
            const auto k = static_cast<Eigen::Index>(active.size());
            Matrix xa(x_.rows(), k);
            Vector signed_gamma(k);
            for (Eigen::Index a = 0; a < k; ++a) {
                const auto j = active[static_cast<std::size_t>(a)];
                xa.col(a) = x_.col(j);
                signed_gamma[a] = std::copysign(gamma_[j], candidate[j]);
            }
            const Eigen::FullPivLU<Matrix> lu(xa);
            if (lu.rank() == k) {
                const Eigen::LLT<Matrix> llt(xa.transpose() * xa);
                if (llt.info() != Eigen::Success) return;
                const Vector v = llt.solve(xa.transpose() * y_ - signed_gamma);
                if (!v.allFinite()) return;
                for (Eigen::Index a = 0; a < k; ++a) {
                    const auto j = active[static_cast<std::size_t>(a)];
                    const bool penalised = gamma_[j] > 0.0;
                    if (penalised && (v[a] == 0.0 || std::signbit(v[a]) != std::signbit(candidate[j])))
                        return;
                    candidate[j] = v[a];
                }
                break;
            }
            Vector z = lu.kernel().col(0);
            const double slope = signed_gamma.dot(z);
            if (slope == 0.0) return;
            if (slope > 0.0) z = -z;
            double step = std::numeric_limits<double>::infinity();
            Eigen::Index blocking = -1;
            for (Eigen::Index a = 0; a < k; ++a) {
                const auto j = active[static_cast<std::size_t>(a)];
                const double wa = candidate[j];
                if (gamma_[j] > 0.0 && wa * z[a] < 0.0 && -wa / z[a] < step) {
                    step = -wa / z[a];
                    blocking = a;
                }
            }
            if (blocking < 0) return;
            for (Eigen::Index a = 0; a < k; ++a)
                candidate[active[static_cast<std::size_t>(a)]] += step * z[a];
            candidate[active[static_cast<std::size_t>(blocking)]] = 0.0;
            active.erase(active.begin() + blocking);
        }
        const Vector residual = y_ - x_ * candidate;
        if (objective(candidate, residual) > before) return;
        w_ = std::move(candidate);
        r_ = residual;
    }

    const Vector& weights() const { return w_; }

private:
    double objective(const Vector& w, const Vector& r) const {
        return 0.5 * r.squaredNorm() + gamma_.dot(w.cwiseAbs());
    }

    const Matrix& x_;
    const Vector& y_;
    const Vector& lambdas_;
    Vector w_;
    Vector r_;
    Vector gamma_;
    Vector col_sq_;
    double scale_ = 0.0;
};

constexpr std::size_t kActiveSweepsPerCycle = 100;

TaskResult solve_task(const Matrix& design, const Vector& response, const Vector& penalties,
                      std::size_t tasks, Vector start, const SolverOptions& options,
                      std::size_t task_index) {
    CoordinateDescent cd(design, response, penalties, tasks, std::move(start));
    TaskResult result;
    auto notify = [&] {
        if (options.on_sweep) options.on_sweep(task_index, result.sweeps, cd.weights());
    };

    while (result.sweeps < options.max_sweeps) {
        cd.full_sweep();
        ++result.sweeps;
        cd.refresh_residual();
        notify();
        result.kkt = cd.kkt();
        if (result.kkt <= options.tolerance) {
            result.converged = true;
            break;
        }
        const auto active = cd.active_set();
        if (active.empty()) continue;
        // Polish the active set; the next full sweep decides whether it is complete.
        for (std::size_t k = 0; k < kActiveSweepsPerCycle && result.sweeps < options.max_sweeps; ++k) {
            cd.active_sweep(active);
            ++result.sweeps;
            notify();
            if (cd.kkt(active) <= 0.5 * options.tolerance) break;
        }
        cd.refresh_residual();
        cd.solve_face(active);
    }
    if (!result.converged) result.kkt = cd.kkt();
    result.weights = cd.weights();
    return result;
}

} // namespace

double soft_threshold(double a, double b) {
    if (a > b) return a - b;
    if (a < -b) return a + b;
    return 0.0;
}

double effective_penalty(double lambda, std::size_t tasks, std::size_t samples) {
    return 0.5 * static_cast<double>(tasks) * static_cast<double>(samples) * lambda;
}

void SolverOptions::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("SolverOptions: tolerance must be > 0");
    if (max_sweeps == 0) throw std::invalid_argument("SolverOptions: max_sweeps must be >= 1");
}

bool SolverReport::all_converged() const {
    return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

double SolverReport::max_kkt_residual() const {
    return kkt_residual.empty() ? 0.0 : *std::max_element(kkt_residual.begin(), kkt_residual.end());
}

SolverReport solve_weighted_l1(const TaskDataset& data, const PenaltyVector& penalties,
                               const SolverOptions& options) {
    options.validate();
    const auto d = data.feature_count();
    const auto m = data.task_count();
    if (penalties.size() != d) {
        throw DimensionError("solve_weighted_l1: penalty vector has length " +
                             std::to_string(penalties.size()) + ", expected " + std::to_string(d));
    }
    if (options.warm_start) check_dimensions(data, *options.warm_start);

    Matrix solution(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
    SolverReport report;
    report.sweeps_used.resize(m);
    report.kkt_residual.resize(m);
    report.converged.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        Vector start = options.warm_start
                           ? Vector(options.warm_start->column(i))
                           : Vector::Zero(static_cast<Eigen::Index>(d));
        auto result = solve_task(data.design(i), data.response(i), penalties.values(), m,
                                 std::move(start), options, i);
        solution.col(static_cast<Eigen::Index>(i)) = result.weights;
        report.sweeps_used[i] = result.sweeps;
        report.kkt_residual[i] = result.kkt;
        report.converged[i] = result.converged;
    }
    if (!solution.allFinite()) {
        throw NumericalError("solve_weighted_l1: iterate diverged to non-finite values");
    }
    report.solution = WeightMatrix(std::move(solution));
    return report;
}

double task_kkt_residual(const Matrix& design, const Vector& response, const Vector& weights,
                         const Vector& penalties, std::size_t tasks) {
    const double scale = 2.0 / (static_cast<double>(tasks) * static_cast<double>(design.rows()));
    const Vector gradient = scale * (design.transpose() * (design * weights - response));
    double worst = 0.0;
    for (Eigen::Index j = 0; j < weights.size(); ++j) {
        const double g = gradient[j];
        const double lambda = penalties[j];
        const double v = weights[j] == 0.0 ? std::max(0.0, std::abs(g) - lambda)
                                           : std::abs(g + std::copysign(lambda, weights[j]));
        worst = std::max(worst, v);
    }
    return worst;
}

double kkt_residual(const TaskDataset& data, const WeightMatrix& weights,
                    const PenaltyVector& penalties) {
    check_dimensions(data, weights);
    double worst = 0.0;
    for (std::size_t i = 0; i < data.task_count(); ++i) {
        worst = std::max(worst, task_kkt_residual(data.design(i), data.response(i),
                                                  Vector(weights.column(i)), penalties.values(),
                                                  data.task_count()));
    }
    return worst;
}

double weighted_l1_objective(const TaskDataset& data, const WeightMatrix& weights,
                             const PenaltyVector& penalties) {
    const double loss = quadratic_loss(data, weights);
    if (penalties.size() != weights.features()) {
        throw DimensionError("weighted_l1_objective: penalty length mismatch");
    }
    return loss + penalties.values().dot(weights.values().cwiseAbs().rowwise().sum());
}

} // namespace mtfl
