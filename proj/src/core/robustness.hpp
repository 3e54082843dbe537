#pragma once

#include "core/dates.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace hsfp::robust {

/// Parameters behind one backtest configuration (one trial column).
struct TrialParams {
    double leeway = 0.1;
    int rebalance_months = 6;
    double prior_half_life = 60.0;
    double fast_half_life = 3.0;
    double slow_half_life = 12.0;
};

/// T x N per-period returns across backtest configurations.
struct TrialMatrix {
    std::vector<Month> months;
    std::vector<std::string> names;
    Eigen::MatrixXd returns;
    std::vector<TrialParams> params; // empty when loaded without a sidecar

    std::size_t rows() const { return static_cast<std::size_t>(returns.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(returns.cols()); }
};

/// Per-period Sharpe ratio (population std). A zero-dispersion series
/// maps to +/-1e12 by the sign of its mean (0 if flat at zero).
double series_sharpe(const Eigen::VectorXd& r);

struct SeriesMoments {
    double mean = 0.0;
    double std_dev = 0.0;
    double skew = 0.0;
    double kurt = 3.0; // raw kurtosis, 3 under normality
};
SeriesMoments series_moments(const Eigen::VectorXd& r);

/// Probabilistic Sharpe ratio: probability that the true SR exceeds
/// `sr_benchmark` given `t_obs` observations and the return series'
/// skewness and raw kurtosis. All Sharpe inputs are per-period.
double psr(double sr_observed, double sr_benchmark, double t_obs, double skew, double kurt);

/// Smallest track length T with psr(...) >= confidence; +infinity when
/// the observed SR does not exceed the benchmark.
double min_trl(double sr_observed, double sr_benchmark, double skew, double kurt,
               double confidence);

struct DegradationFit {
    double slope = 0.0;
    double intercept = 0.0;
};

struct DominanceGrid {
    std::vector<double> sr_grid;
    std::vector<double> cdf_optimized; // OOS SR of the IS winner
    std::vector<double> cdf_overall;   // OOS SR pooled over all columns
    std::vector<double> sd2_optimized; // integrated CDFs
    std::vector<double> sd2_overall;
};

struct OverfitReport {
    double pbo = 0.0;
    std::vector<double> logits;
    DegradationFit degradation;
    double prob_loss = 0.0;
    DominanceGrid dominance;
    std::vector<std::pair<double, double>> is_oos_pairs; // winner (IS SR, OOS SR)
    std::size_t n_combinations = 0;
    std::size_t rows_used = 0;
    std::size_t rows_dropped = 0;
    std::vector<int> kept_columns;
    std::vector<std::string> flags;
};

/// All S-choose-S/2 in-sample block selections as bitmasks, in
/// lexicographic order.
std::vector<std::uint32_t> cscv_masks(int partitions);

/// Probability of backtest overfitting via combinatorially symmetric
/// cross validation: rows split into `partitions` contiguous blocks, all
/// C(S, S/2) block subsets tried as in-sample, the IS winner ranked by
/// OOS Sharpe among all columns. Logit lambda = ln(w/(1-w)) of the
/// winner's relative rank; PBO is the share of non-positive logits.
OverfitReport pbo_cscv(const TrialMatrix& trials, int partitions, double sr_threshold);

struct DsrResult {
    double dsr = 0.0;
    int k = 0;
    double sr_star = 0.0;
    double variance_cluster_sr = 0.0;
    std::vector<int> assignment;
    std::vector<double> cluster_sharpes;
    std::vector<std::string> flags;
};

/// Deflated Sharpe ratio: K-means on the correlation-distance matrix
/// sqrt(2(1-rho)) reduces the N trials to K effectively independent ones
/// (K selected by mean silhouette over [2, min(N-1, 25)]); each cluster
/// aggregates by inverse-variance weights; the benchmark SR* follows the
/// expected-maximum formula on the K cluster Sharpe ratios. All SR inputs
/// per-period.
DsrResult dsr(const TrialMatrix& trials, double sr_observed, double t_obs, double skew,
              double kurt, std::uint64_t seed);

struct AuditParams {
    int partitions = 16;
    double sr_threshold = 0.0;
    double confidence = 0.95;
    std::string observed_column;           // empty: best full-sample SR
    std::vector<std::string> psr_columns;  // empty: all columns when N <= 16
    std::uint64_t seed = 0;
};

struct AuditReport {
    OverfitReport overfit;
    DsrResult deflated;
    std::vector<std::string> psr_names;
    Eigen::MatrixXd psr_matrix;          // row candidate vs column benchmark
    std::vector<double> min_trl_months;  // observed vs each psr benchmark
    std::string observed_name;
    int observed_column = 0;
    double observed_sr = 0.0;
    SeriesMoments observed_moments;
    std::size_t t_obs = 0;
    AuditParams params;
};

/// Full overfitting screen over a trial matrix: PSR cross-matrix,
/// MinTRL of the observed column against each benchmark, CSCV and DSR.
AuditReport run_audit(const TrialMatrix& trials, const AuditParams& params);

} // namespace hsfp::robust
