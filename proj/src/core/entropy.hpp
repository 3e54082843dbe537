#pragma once

#include "core/flexprob.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hsfp::entropy {

/// One linear moment view: sum_t a_t p_t (= or <=) b.
struct ViewRow {
    Eigen::VectorXd coefficients;
    double target = 0.0;
};

/// Moment views fed to the relative-entropy solver. Equality rows bind
/// exactly; inequality rows bind from above.
struct ViewConstraintSet {
    std::vector<ViewRow> equalities;
    std::vector<ViewRow> inequalities;

    std::size_t total_rows() const { return equalities.size() + inequalities.size(); }
    bool empty() const { return total_rows() == 0; }
};

struct EntropySolution {
    prob::ProbabilityVector posterior;
    double kl_divergence = 0.0;
    /// One dual per row, equalities first then inequalities, in original
    /// (un-standardized) units. Inequality duals are <= 0.
    Eigen::VectorXd dual_variables;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> flags;
};

/// Dual of the minimum-relative-entropy problem over standardized views.
/// The posterior has the exponential-family form
///   p_t(l) ∝ prior_t · exp(sum_j l_j v_{j,t})
/// and the dual objective is h(l) = ln sum_t prior_t exp(l·(v_t - mu)),
/// minimized over l with inequality-row duals constrained to l_j <= 0.
/// Exposed so the analytic gradient/Hessian can be checked against finite
/// differences independently of the solver loop.
class DualProblem {
public:
    DualProblem(const prob::ProbabilityVector& prior, const ViewConstraintSet& views);

    int rows() const { return static_cast<int>(v_.rows()); }
    int n_equalities() const { return n_eq_; }
    bool is_inequality_row(int j) const { return j >= n_eq_; }

    double value(const Eigen::VectorXd& duals) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& duals) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& duals) const;
    Eigen::VectorXd posterior(const Eigen::VectorXd& duals) const;

    /// Scale factors applied per row during standardization; original-unit
    /// duals are standardized duals divided by these.
    const Eigen::VectorXd& row_scales() const { return scale_; }
    const std::vector<std::string>& flags() const { return flags_; }

private:
    Eigen::MatrixXd v_;  // rows x dates, standardized coefficients
    Eigen::VectorXd mu_; // standardized targets
    Eigen::VectorXd log_prior_;
    Eigen::VectorXd scale_;
    int n_eq_ = 0;
    std::vector<std::string> flags_;
};

/// Posterior closest to `prior` in Kullback-Leibler divergence among
/// probability vectors satisfying the views. Damped Newton on the dual
/// with backtracking line search; inequality duals projected onto the
/// nonpositive orthant. Throws NumericError carrying the last residual
/// if the iteration cap (1000) is exhausted.
EntropySolution min_rel_entropy(const prob::ProbabilityVector& prior,
                                const ViewConstraintSet& views);

struct TimeStateResult {
    EntropySolution solution;
    prob::CrispResult crisp;
    double crisp_mean = 0.0;
    double crisp_std = 0.0;
    ViewConstraintSet views;
};

/// Full time-and-state conditioning: crisp-select dates near the target,
/// take the crisp mean/std of the state as moment views (equality on the
/// first moment, upper inequality on the second), and distort an
/// exponential-decay prior as little as possible subject to them.
TimeStateResult time_state_condition(const std::vector<double>& state, double target,
                                     double leeway, double prior_half_life);

} // namespace hsfp::entropy
