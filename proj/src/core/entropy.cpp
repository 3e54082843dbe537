#include "core/entropy.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hsfp::entropy {

namespace {

constexpr double kGradTol = 1e-10;
constexpr int kMaxIterations = 1000;

void check_views(const prob::ProbabilityVector& prior, const ViewConstraintSet& views) {
    const auto n = static_cast<Eigen::Index>(prior.size());
    int idx = 0;
    for (const auto& row : views.equalities) {
        if (row.coefficients.size() != n)
            throw DataError("entropy: equality row " + std::to_string(idx) +
                            " length mismatch");
        double lo = row.coefficients.minCoeff();
        double hi = row.coefficients.maxCoeff();
        if (row.target < lo - 1e-12 || row.target > hi + 1e-12)
            throw NumericError("entropy: equality row " + std::to_string(idx) +
                               " is infeasible: target " + std::to_string(row.target) +
                               " outside coefficient range [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
        ++idx;
    }
    idx = 0;
    for (const auto& row : views.inequalities) {
        if (row.coefficients.size() != n)
            throw DataError("entropy: inequality row " + std::to_string(idx) +
                            " length mismatch");
        if (row.target < row.coefficients.minCoeff() - 1e-12)
            throw NumericError("entropy: inequality row " + std::to_string(idx) +
                               " is infeasible: bound " + std::to_string(row.target) +
                               " below smallest coefficient");
        ++idx;
    }
}

} // namespace

DualProblem::DualProblem(const prob::ProbabilityVector& prior, const ViewConstraintSet& views) {
    const auto n = static_cast<Eigen::Index>(prior.size());
    const auto rows = static_cast<Eigen::Index>(views.total_rows());
    n_eq_ = static_cast<int>(views.equalities.size());

    v_.resize(rows, n);
    mu_.resize(rows);
    scale_ = Eigen::VectorXd::Ones(rows);

    Eigen::Index j = 0;
    auto add_row = [&](const ViewRow& row) {
        double mean = row.coefficients.mean();
        double sd = std::sqrt((row.coefficients.array() - mean).square().mean());
        double scale = std::max(row.coefficients.cwiseAbs().maxCoeff(), 1e-300);
        if (sd <= 1e-12 * scale)
            sd = 0.0; // constant row up to rounding
        if (sd > 0.0) {
            v_.row(j) = (row.coefficients.array() - mean) / sd;
            mu_(j) = (row.target - mean) / sd;
            scale_(j) = sd;
        } else {
            v_.row(j) = row.coefficients;
            mu_(j) = row.target;
            flags_.push_back("row " + std::to_string(j) +
                             " has zero spread; left unstandardized");
        }
        ++j;
    };
    for (const auto& row : views.equalities)
        add_row(row);
    for (const auto& row : views.inequalities)
        add_row(row);

    log_prior_.resize(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        if (!(prior.weights[static_cast<std::size_t>(t)] > 0.0))
            throw DataError("entropy: prior must be strictly positive on every date "
                            "(exclude zero-prior dates from the support first)");
        log_prior_(t) = std::log(prior.weights[static_cast<std::size_t>(t)]);
    }
}

double DualProblem::value(const Eigen::VectorXd& duals) const {
    Eigen::VectorXd s = log_prior_ + v_.transpose() * duals;
    double shift = s.maxCoeff();
    double acc = (s.array() - shift).exp().sum();
    return shift + std::log(acc) - duals.dot(mu_);
}

Eigen::VectorXd DualProblem::posterior(const Eigen::VectorXd& duals) const {
    Eigen::VectorXd s = log_prior_ + v_.transpose() * duals;
    double shift = s.maxCoeff();
    Eigen::VectorXd p = (s.array() - shift).exp();
    return p / p.sum();
}

Eigen::VectorXd DualProblem::gradient(const Eigen::VectorXd& duals) const {
    return v_ * posterior(duals) - mu_;
}

Eigen::MatrixXd DualProblem::hessian(const Eigen::VectorXd& duals) const {
    Eigen::VectorXd p = posterior(duals);
    Eigen::VectorXd mean = v_ * p;
    Eigen::MatrixXd centered = v_.colwise() - mean;
    return centered * p.asDiagonal() * centered.transpose();
}

EntropySolution min_rel_entropy(const prob::ProbabilityVector& prior,
                                const ViewConstraintSet& views) {
    prior.validate();

    EntropySolution sol;
    if (views.empty()) {
        sol.posterior = prior;
        sol.kl_divergence = 0.0;
        sol.dual_variables = Eigen::VectorXd::Zero(0);
        sol.converged = true;
        return sol;
    }
    check_views(prior, views);

    DualProblem dual(prior, views);
    const int rows = dual.rows();
    Eigen::VectorXd l = Eigen::VectorXd::Zero(rows);

    auto project = [&](Eigen::VectorXd x) {
        for (int j = 0; j < rows; ++j)
            if (dual.is_inequality_row(j) && x(j) > 0.0)
                x(j) = 0.0;
        return x;
    };
    auto kkt_residual = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
        double res = 0.0;
        for (int j = 0; j < rows; ++j) {
            if (dual.is_inequality_row(j) && x(j) >= 0.0)
                res = std::max(res, std::max(0.0, g(j)));
            else
                res = std::max(res, std::abs(g(j)));
        }
        return res;
    };

    double residual = 0.0;
    int iter = 0;
    for (; iter < kMaxIterations; ++iter) {
        Eigen::VectorXd g = dual.gradient(l);
        residual = kkt_residual(l, g);
        if (residual < kGradTol)
            break;

        // Inequality duals pinned at zero with a non-violated view stay fixed.
        std::vector<int> free;
        for (int j = 0; j < rows; ++j) {
            bool pinned = dual.is_inequality_row(j) && l(j) >= 0.0 && g(j) <= 0.0;
            if (!pinned)
                free.push_back(j);
        }
        if (free.empty())
            break;

        const auto nf = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd h = dual.hessian(l);
        Eigen::MatrixXd hff(nf, nf);
        Eigen::VectorXd gf(nf);
        for (Eigen::Index a = 0; a < nf; ++a) {
            gf(a) = g(free[static_cast<std::size_t>(a)]);
            for (Eigen::Index b = 0; b < nf; ++b)
                hff(a, b) = h(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
        }
        double ridge = 1e-12 * std::max(1.0, hff.trace());
        hff.diagonal().array() += ridge;

        Eigen::VectorXd df = hff.ldlt().solve(-gf);
        if (!df.allFinite() || gf.dot(df) >= 0.0)
            df = -gf; // fall back to steepest descent

        double h0 = dual.value(l);
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            Eigen::VectorXd trial = l;
            for (Eigen::Index a = 0; a < nf; ++a)
                trial(free[static_cast<std::size_t>(a)]) += step * df(a);
            trial = project(std::move(trial));
            double decrease = g.dot(trial - l);
            if ((trial - l).lpNorm<Eigen::Infinity>() == 0.0)
                break;
            if (dual.value(trial) <= h0 + 1e-4 * decrease) {
                l = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // Near the optimum the objective decrease drops below floating
            // resolution; take the full Newton step if it shrinks the KKT
            // residual instead.
            Eigen::VectorXd trial = l;
            for (Eigen::Index a = 0; a < nf; ++a)
                trial(free[static_cast<std::size_t>(a)]) += df(a);
            trial = project(std::move(trial));
            if (kkt_residual(trial, dual.gradient(trial)) < residual) {
                l = trial;
                accepted = true;
            }
        }
        if (!accepted)
            break; // stalled; residual reported below
    }

    if (residual >= kGradTol) {
        Eigen::VectorXd g = dual.gradient(l);
        residual = kkt_residual(l, g);
        if (residual >= kGradTol) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3e", residual);
            throw NumericError("entropy: solver did not converge within " +
                               std::to_string(kMaxIterations) +
                               " iterations; last dual-gradient residual " + buf);
        }
    }

    Eigen::VectorXd p = dual.posterior(l);
    sol.posterior.weights.assign(p.data(), p.data() + p.size());

    double kl = 0.0;
    for (std::size_t t = 0; t < prior.size(); ++t)
        if (sol.posterior.weights[t] > 0.0)
            kl += sol.posterior.weights[t] *
                  std::log(sol.posterior.weights[t] / prior.weights[t]);
    sol.kl_divergence = kl;

    sol.dual_variables = l.array() / dual.row_scales().array();
    sol.iterations = iter;
    sol.converged = true;
    sol.flags = dual.flags();
    return sol;
}

TimeStateResult time_state_condition(const std::vector<double>& state, double target,
                                     double leeway, double prior_half_life) {
    TimeStateResult res;
    res.crisp = prob::crisp(state, target, leeway);

    const auto n = static_cast<Eigen::Index>(state.size());
    Eigen::VectorXd z(n), z2(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        z(t) = state[static_cast<std::size_t>(t)];
        z2(t) = z(t) * z(t);
    }

    double m = 0.0, m2 = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        double w = res.crisp.probabilities.weights[static_cast<std::size_t>(t)];
        m += w * z(t);
        m2 += w * z2(t);
    }
    double s2 = std::max(0.0, m2 - m * m);
    res.crisp_mean = m;
    res.crisp_std = std::sqrt(s2);

    res.views.equalities.push_back({z, m});
    res.views.inequalities.push_back({z2, m * m + s2});

    prob::ProbabilityVector prior = prob::exp_decay(state.size(), prior_half_life);
    res.solution = min_rel_entropy(prior, res.views);
    return res;
}

} // namespace hsfp::entropy
