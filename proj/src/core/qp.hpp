#pragma once

#include <Eigen/Dense>

namespace hsfp::qp {

struct Result {
    Eigen::VectorXd x;
    Eigen::VectorXd eq_multipliers;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Solve  min 1/2 x'Qx  s.t.  Ax = b,  x >= 0  (Q positive semidefinite)
/// by a primal active-set method on the bound constraints: repeatedly
/// solve the equality-constrained subproblem with the working set of
/// variables clamped at zero, step to the nearest blocking bound, and
/// release clamped variables whose bound multiplier is negative.
/// `x0` must be feasible. The reported kkt_residual covers primal
/// feasibility, stationarity and complementary slackness.
Result solve_nonneg(const Eigen::MatrixXd& q, const Eigen::MatrixXd& a,
                    const Eigen::VectorXd& b, const Eigen::VectorXd& x0);

} // namespace hsfp::qp
