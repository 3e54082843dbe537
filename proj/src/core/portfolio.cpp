#include "core/portfolio.hpp"

#include "core/errors.hpp"
#include "core/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsfp::portfolio {

namespace {

constexpr double kKktTol = 1e-8;

Eigen::VectorXd feasible_start(const Eigen::VectorXd& mean, double target) {
    Eigen::Index i_max, i_min;
    mean.maxCoeff(&i_max);
    mean.minCoeff(&i_min);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(mean.size());
    double span = mean(i_max) - mean(i_min);
    double theta = span > 0.0 ? std::clamp((target - mean(i_min)) / span, 0.0, 1.0) : 1.0;
    w(i_max) += theta;
    w(i_min) += 1.0 - theta;
    return w;
}

qp::Result solve_target(const FpMoments& m, double target) {
    const auto n = static_cast<Eigen::Index>(m.n_assets());
    Eigen::MatrixXd a(2, n);
    a.row(0).setOnes();
    a.row(1) = m.mean.transpose();
    Eigen::VectorXd b(2);
    b << 1.0, target;
    return qp::solve_nonneg(m.cov, a, b, feasible_start(m.mean, target));
}

FrontierPoint make_point(const FpMoments& m, double target, const qp::Result& sol) {
    FrontierPoint pt;
    pt.weights = sol.x;
    pt.target_return = target;
    pt.monthly_return = m.mean.dot(sol.x);
    pt.monthly_vol = std::sqrt(std::max(0.0, sol.x.dot(m.cov * sol.x)));
    pt.kkt_residual = sol.kkt_residual;
    return pt;
}

double annualized_sharpe(const FrontierPoint& pt, double rf) {
    double ann_ret = 12.0 * pt.monthly_return;
    double ann_vol = std::sqrt(12.0) * pt.monthly_vol;
    return (ann_ret - rf) / ann_vol;
}

} // namespace

FpMoments fp_moments(const ReturnPanel& window, const prob::ProbabilityVector& p) {
    if (p.size() != window.rows())
        throw DataError("fp_moments: probability vector length " + std::to_string(p.size()) +
                        " does not match window rows " + std::to_string(window.rows()));
    p.validate();

    const auto n = static_cast<Eigen::Index>(window.n_assets());
    const auto rows = static_cast<Eigen::Index>(window.rows());

    FpMoments m;
    m.mean = Eigen::VectorXd::Zero(n);
    for (Eigen::Index t = 0; t < rows; ++t)
        m.mean += p.weights[static_cast<std::size_t>(t)] * window.values.row(t).transpose();

    m.cov = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index t = 0; t < rows; ++t) {
        Eigen::VectorXd c = window.values.row(t).transpose() - m.mean;
        m.cov += p.weights[static_cast<std::size_t>(t)] * (c * c.transpose());
    }
    m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
    return m;
}

Frontier efficient_frontier(const FpMoments& m, int n_points) {
    if (n_points < 2)
        throw ConfigError("efficient_frontier: need at least 2 grid points");
    const auto n = static_cast<Eigen::Index>(m.n_assets());
    if (n == 0)
        throw DataError("efficient_frontier: no assets");

    Frontier frontier;

    // Lower end of the grid: the long-only minimum-variance return.
    Eigen::MatrixXd a_budget = Eigen::MatrixXd::Ones(1, n);
    Eigen::VectorXd b_budget = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    qp::Result minvar = qp::solve_nonneg(m.cov, a_budget, b_budget, uniform);
    double r_low = m.mean.dot(minvar.x);
    double r_high = m.mean.maxCoeff();

    if (r_high - r_low < 1e-12) {
        frontier.degenerate = true;
        frontier.flags.push_back("degenerate frontier: achievable return range is a point");
        FrontierPoint pt;
        pt.weights = minvar.x;
        pt.target_return = r_low;
        pt.monthly_return = r_low;
        pt.monthly_vol = std::sqrt(std::max(0.0, minvar.x.dot(m.cov * minvar.x)));
        pt.kkt_residual = minvar.kkt_residual;
        frontier.points.push_back(std::move(pt));
        return frontier;
    }

    for (int k = 0; k < n_points; ++k) {
        double target = r_low + (r_high - r_low) * static_cast<double>(k) /
                                    static_cast<double>(n_points - 1);
        qp::Result sol = solve_target(m, target);
        if (!sol.converged || sol.kkt_residual > kKktTol) {
            frontier.flags.push_back("target " + std::to_string(target) +
                                     " skipped (KKT residual " +
                                     std::to_string(sol.kkt_residual) + ")");
            continue;
        }
        frontier.points.push_back(make_point(m, target, sol));
    }
    if (frontier.points.empty())
        throw NumericError("efficient_frontier: no frontier point satisfied the KKT tolerance");
    return frontier;
}

PortfolioWeights max_sharpe(const FpMoments& m, double annual_risk_free, int n_points) {
    Frontier frontier = efficient_frontier(m, n_points);

    int best = -1;
    double best_sharpe = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < frontier.points.size(); ++k) {
        if (frontier.points[k].monthly_vol <= 0.0)
            continue;
        double s = annualized_sharpe(frontier.points[k], annual_risk_free);
        if (s > best_sharpe) {
            best_sharpe = s;
            best = static_cast<int>(k);
        }
    }
    if (best < 0)
        throw NumericError("max_sharpe: every frontier portfolio has zero volatility");

    FrontierPoint best_pt = frontier.points[static_cast<std::size_t>(best)];

    // Golden-section refinement of the target return between the best grid
    // point's neighbours.
    if (!frontier.degenerate && frontier.points.size() > 1) {
        double lo = frontier.points[static_cast<std::size_t>(std::max(best - 1, 0))].target_return;
        double hi = frontier
                        .points[std::min(static_cast<std::size_t>(best + 1),
                                         frontier.points.size() - 1)]
                        .target_return;
        auto eval = [&](double target) {
            qp::Result sol = solve_target(m, target);
            FrontierPoint pt = make_point(m, target, sol);
            double s = (sol.converged && sol.kkt_residual <= kKktTol && pt.monthly_vol > 0.0)
                           ? annualized_sharpe(pt, annual_risk_free)
                           : -std::numeric_limits<double>::infinity();
            return std::make_pair(s, pt);
        };
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - phi * (hi - lo);
        double x2 = lo + phi * (hi - lo);
        auto [f1, p1] = eval(x1);
        auto [f2, p2] = eval(x2);
        for (int it = 0; it < 40; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                p1 = p2;
                x2 = lo + phi * (hi - lo);
                std::tie(f2, p2) = eval(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                p2 = p1;
                x1 = hi - phi * (hi - lo);
                std::tie(f1, p1) = eval(x1);
            }
        }
        if (f1 > best_sharpe && p1.monthly_vol > 0.0) {
            best_sharpe = f1;
            best_pt = p1;
        }
        if (f2 > best_sharpe && p2.monthly_vol > 0.0) {
            best_sharpe = f2;
            best_pt = p2;
        }
    }

    // When every excess return is negative the simplex-wide maximizer can
    // leave the minimum-variance frontier: per return level it then wants
    // the largest variance, which sits on a two-asset edge. Scanning the
    // edges covers that regime (and cannot beat the frontier otherwise).
    const auto n = static_cast<Eigen::Index>(m.n_assets());
    Eigen::VectorXd edge_w = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            auto eval_edge = [&](double theta) {
                edge_w.setZero();
                edge_w(i) = theta;
                edge_w(j) += 1.0 - theta;
                double vol = std::sqrt(std::max(0.0, edge_w.dot(m.cov * edge_w)));
                if (vol <= 0.0)
                    return -std::numeric_limits<double>::infinity();
                return (12.0 * m.mean.dot(edge_w) - annual_risk_free) /
                       (std::sqrt(12.0) * vol);
            };
            double best_theta = 0.0;
            double best_edge = eval_edge(0.0);
            for (int k = 1; k <= 100; ++k) {
                double theta = static_cast<double>(k) / 100.0;
                double s = eval_edge(theta);
                if (s > best_edge) {
                    best_edge = s;
                    best_theta = theta;
                }
            }
            double lo = std::max(0.0, best_theta - 0.01);
            double hi = std::min(1.0, best_theta + 0.01);
            const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
            double x1 = hi - phi * (hi - lo);
            double x2 = lo + phi * (hi - lo);
            double f1 = eval_edge(x1), f2 = eval_edge(x2);
            for (int it = 0; it < 30; ++it) {
                if (f1 < f2) {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = eval_edge(x2);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = eval_edge(x1);
                }
            }
            for (double theta : {best_theta, x1, x2}) {
                double s = eval_edge(theta);
                if (s > best_sharpe) {
                    best_sharpe = s;
                    edge_w.setZero();
                    edge_w(i) = theta;
                    edge_w(j) += 1.0 - theta;
                    best_pt.weights = edge_w;
                    best_pt.monthly_return = m.mean.dot(edge_w);
                    best_pt.monthly_vol = std::sqrt(std::max(0.0, edge_w.dot(m.cov * edge_w)));
                }
            }
        }
    }

    PortfolioWeights out;
    out.weights = best_pt.weights;
    out.flags = frontier.flags;
    if (frontier.degenerate)
        out.flags.push_back("degenerate moment set; weights are not unique");
    return out;
}

PortfolioWeights benchmark_ew(std::size_t n_assets) {
    if (n_assets == 0)
        throw DataError("benchmark_ew: no assets");
    PortfolioWeights out;
    out.weights =
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_assets),
                                  1.0 / static_cast<double>(n_assets));
    out.label = "EW";
    return out;
}

PortfolioWeights benchmark_mvo(const ReturnPanel& window, double annual_risk_free,
                               int n_points) {
    prob::ProbabilityVector uniform;
    uniform.weights.assign(window.rows(), 1.0 / static_cast<double>(window.rows()));
    PortfolioWeights out = max_sharpe(fp_moments(window, uniform), annual_risk_free, n_points);
    out.label = "MVO";
    return out;
}

} // namespace hsfp::portfolio
