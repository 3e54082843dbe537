#pragma once

#include "core/ensemble.hpp"
#include "core/entropy.hpp"
#include "core/ingest.hpp"
#include "core/series.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hsfp::backtest {

enum class Model { HSFP, MVO, EW };

std::string model_name(Model m);

/// How one raw signal column becomes a state variable: optional quarterly
/// interpolation, publication lag, and smoothing half-lives (non-positive
/// values fall back to the run-level ones).
struct SignalSpec {
    std::string name;
    bool quarterly = false;
    int lag_months = 0;
    double fast_half_life = 0.0;
    double slow_half_life = 0.0;
};

struct BacktestConfig {
    int train_months = 60;
    int rebalance_months = 6;
    double tc_bps = 0.0;
    double leeway = 0.1;
    double prior_half_life = 60.0;
    double fast_half_life = 3.0;
    double slow_half_life = 12.0;
    ensemble::Method combination = ensemble::Method::DCC;
    Model model = Model::HSFP;
    double risk_free_rate = 0.0725;
    int frontier_points = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SummaryStats {
    double ann_return_log = 0.0;       // 12 x mean monthly log return
    double ann_return_geometric = 0.0; // exp(ann_return_log) - 1
    double ann_vol = 0.0;              // sqrt(12) x monthly std (sample)
    double sharpe = 0.0;               // (ann_return_log - rf) / ann_vol
    double max_drawdown = 0.0;         // peak-to-trough fraction, positive
    double cvar_95 = 0.0;              // mean monthly return at/below the 5% quantile, positive
    double avg_monthly_turnover = 0.0;
    bool low_confidence = false;       // series shorter than 12 months
};

/// Final-rebalance conditioning snapshot (HS-FP runs): the figure-data
/// behind the allocation decision.
struct ConditioningDiagnostics {
    std::vector<Month> grid;
    prob::ProbabilityVector prior;
    std::vector<std::string> variable_names;
    std::vector<prob::ProbabilityVector> posteriors;
    std::vector<double> kl_divergences;
    std::vector<int> iterations;
    prob::ProbabilityVector combined;
    ensemble::EnsembleWeights ensemble_weights;
};

struct BacktestResult {
    Model model = Model::HSFP;
    std::vector<std::string> asset_names;
    std::vector<Month> months;        // out-of-sample months
    std::vector<double> gross;        // monthly log returns
    std::vector<double> net;          // gross minus transaction costs
    std::vector<double> turnover;     // per out-of-sample month, 0 off-rebalance
    std::vector<Month> rebalance_dates;
    std::vector<Eigen::VectorXd> weight_history; // per rebalance, post-trade
    SummaryStats stats;
    std::vector<std::string> warnings;
    std::optional<ConditioningDiagnostics> diagnostics;
    BacktestConfig config;
};

/// One-sided turnover: half the L1 distance between the drifted previous
/// weights and the new target.
double turnover(const Eigen::VectorXd& prev_drifted, const Eigen::VectorXd& next);

/// Performance, risk and turnover statistics over a monthly log-return
/// series. CVaR is taken at the 5% level.
SummaryStats summary_stats(const std::vector<double>& monthly_log_returns, double annual_rf,
                           const std::vector<double>* turnover_series = nullptr);

/// Walk-forward backtest: growing estimation window, decisions every
/// rebalance_months, weights drifting buy-and-hold in between, costs of
/// tc_bps per unit turnover deducted from the rebalance month's net
/// return. All signal preparation is redone from raw data truncated at
/// each decision date, so no decision can see past its own month.
BacktestResult run_backtest(const TimeSeriesPanel& prices, const TimeSeriesPanel& signals,
                            const std::vector<SignalSpec>& specs, const BacktestConfig& cfg);

} // namespace hsfp::backtest
