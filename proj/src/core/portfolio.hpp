#pragma once

#include "core/flexprob.hpp"
#include "core/series.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hsfp::portfolio {

/// Probability-weighted first and second moments of monthly asset returns.
struct FpMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    std::size_t n_assets() const { return static_cast<std::size_t>(mean.size()); }
};

struct PortfolioWeights {
    Eigen::VectorXd weights;
    std::string label;
    std::vector<std::string> flags;
};

struct FrontierPoint {
    Eigen::VectorXd weights;
    double target_return = 0.0; // monthly
    double monthly_return = 0.0;
    double monthly_vol = 0.0;
    double kkt_residual = 0.0;
};

struct Frontier {
    std::vector<FrontierPoint> points;
    bool degenerate = false;
    std::vector<std::string> flags;
};

/// Mean and covariance under scenario probabilities p:
///   E[R]   = sum_t p_t r_t
///   Cov[R] = sum_t p_t r_t r_t' - E[R] E[R]'
/// computed in centered form (algebraically identical, PSD-stable).
FpMoments fp_moments(const ReturnPanel& window, const prob::ProbabilityVector& p);

/// Long-only minimum-variance portfolios across a grid of target monthly
/// returns between the minimum-variance return and the best single-asset
/// mean. Each point solves min w'Cw s.t. w'mu = target, sum w = 1, w >= 0.
Frontier efficient_frontier(const FpMoments& m, int n_points);

/// Frontier portfolio maximizing annualized Sharpe: (12*mu_p - rf) /
/// (sqrt(12)*vol_p). Grid search over the frontier followed by a
/// golden-section refinement of the target return between the best grid
/// point's neighbours.
PortfolioWeights max_sharpe(const FpMoments& m, double annual_risk_free, int n_points = 100);

/// 1/n benchmark.
PortfolioWeights benchmark_ew(std::size_t n_assets);

/// Classic mean-variance benchmark: max-Sharpe under uniform scenario
/// probabilities over the window.
PortfolioWeights benchmark_mvo(const ReturnPanel& window, double annual_risk_free,
                               int n_points = 100);

} // namespace hsfp::portfolio
