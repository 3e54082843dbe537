#include "core/qp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hsfp::qp {

namespace {

struct EqpSolution {
    Eigen::VectorXd x;
    Eigen::VectorXd nu;
    bool ok = false;
};

// Equality-constrained subproblem with the working-set variables fixed
// at zero: bordered KKT system over the free coordinates.
EqpSolution solve_eqp(const Eigen::MatrixXd& q, const Eigen::MatrixXd& a,
                      const Eigen::VectorXd& b, const std::vector<int>& free_idx) {
    const auto nf = static_cast<Eigen::Index>(free_idx.size());
    const Eigen::Index m = a.rows();
    EqpSolution out;
    out.x = Eigen::VectorXd::Zero(q.rows());
    out.nu = Eigen::VectorXd::Zero(m);
    if (nf == 0)
        return out;

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nf + m, nf + m);
    for (Eigen::Index i = 0; i < nf; ++i)
        for (Eigen::Index j = 0; j < nf; ++j)
            kkt(i, j) = q(free_idx[static_cast<std::size_t>(i)],
                          free_idx[static_cast<std::size_t>(j)]);
    double ridge = 1e-12 * std::max(1.0, kkt.topLeftCorner(nf, nf).trace());
    kkt.topLeftCorner(nf, nf).diagonal().array() += ridge;
    for (Eigen::Index i = 0; i < nf; ++i)
        for (Eigen::Index r = 0; r < m; ++r) {
            kkt(i, nf + r) = a(r, free_idx[static_cast<std::size_t>(i)]);
            kkt(nf + r, i) = a(r, free_idx[static_cast<std::size_t>(i)]);
        }

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + m);
    rhs.tail(m) = b;

    Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    if (!sol.allFinite())
        return out;
    for (Eigen::Index i = 0; i < nf; ++i)
        out.x(free_idx[static_cast<std::size_t>(i)]) = sol(i);
    out.nu = sol.tail(m);
    out.ok = true;
    return out;
}

} // namespace

Result solve_nonneg(const Eigen::MatrixXd& q, const Eigen::MatrixXd& a,
                    const Eigen::VectorXd& b, const Eigen::VectorXd& x0) {
    const Eigen::Index n = q.rows();
    constexpr double kBoundTol = 1e-12;
    constexpr double kMultiplierTol = 1e-10;

    Result res;
    res.x = x0;
    std::vector<bool> clamped(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i)
        if (res.x(i) <= kBoundTol) {
            res.x(i) = 0.0;
            clamped[static_cast<std::size_t>(i)] = true;
        }

    Eigen::VectorXd nu = Eigen::VectorXd::Zero(a.rows());
    const int max_iter = static_cast<int>(50 * n + 50);
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::vector<int> free_idx;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!clamped[static_cast<std::size_t>(i)])
                free_idx.push_back(static_cast<int>(i));

        EqpSolution eqp = solve_eqp(q, a, b, free_idx);
        if (!eqp.ok) {
            // Singular subproblem; release the most promising clamped
            // variable and retry.
            Eigen::VectorXd lambda = q * res.x + a.transpose() * nu;
            int worst = -1;
            double worst_val = -kMultiplierTol;
            for (Eigen::Index i = 0; i < n; ++i)
                if (clamped[static_cast<std::size_t>(i)] && lambda(i) < worst_val) {
                    worst_val = lambda(i);
                    worst = static_cast<int>(i);
                }
            if (worst < 0)
                break;
            clamped[static_cast<std::size_t>(worst)] = false;
            continue;
        }
        nu = eqp.nu;

        Eigen::VectorXd step = eqp.x - res.x;
        if (step.lpNorm<Eigen::Infinity>() < 1e-13) {
            // At the working-set optimum; check bound multipliers.
            Eigen::VectorXd lambda = q * res.x + a.transpose() * nu;
            int worst = -1;
            double worst_val = -kMultiplierTol;
            for (Eigen::Index i = 0; i < n; ++i)
                if (clamped[static_cast<std::size_t>(i)] && lambda(i) < worst_val) {
                    worst_val = lambda(i);
                    worst = static_cast<int>(i);
                }
            if (worst < 0) {
                res.converged = true;
                break;
            }
            clamped[static_cast<std::size_t>(worst)] = false;
            continue;
        }

        double alpha = 1.0;
        int blocking = -1;
        for (int i : free_idx) {
            if (step(i) < -1e-15) {
                double limit = -res.x(i) / step(i);
                if (limit < alpha) {
                    alpha = limit;
                    blocking = i;
                }
            }
        }
        res.x += std::max(0.0, alpha) * step;
        for (Eigen::Index i = 0; i < n; ++i)
            if (res.x(i) < 0.0)
                res.x(i) = 0.0;
        if (blocking >= 0 && alpha < 1.0) {
            res.x(blocking) = 0.0;
            clamped[static_cast<std::size_t>(blocking)] = true;
        }
    }
    res.iterations = iter;
    res.eq_multipliers = -nu;

    // KKT residual: feasibility, stationarity, complementary slackness.
    Eigen::VectorXd lambda = q * res.x + a.transpose() * nu;
    double r = (a * res.x - b).lpNorm<Eigen::Infinity>();
    r = std::max(r, std::max(0.0, -res.x.minCoeff()));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (clamped[static_cast<std::size_t>(i)]) {
            r = std::max(r, std::max(0.0, -lambda(i)));
            r = std::max(r, std::abs(lambda(i) * res.x(i)));
        } else {
            r = std::max(r, std::abs(lambda(i)));
        }
    }
    res.kkt_residual = r;
    return res;
}

} // namespace hsfp::qp
