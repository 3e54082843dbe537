#include "core/backtest.hpp"

#include "core/errors.hpp"
#include "core/flexprob.hpp"
#include "core/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsfp::backtest {

std::string model_name(Model m) {
    switch (m) {
    case Model::HSFP:
        return "HS-FP";
    case Model::MVO:
        return "MVO";
    case Model::EW:
        return "EW";
    }
    return "?";
}

void BacktestConfig::validate() const {
    if (train_months < 2)
        throw ConfigError("backtest: train_months must be at least 2");
    if (rebalance_months < 1)
        throw ConfigError("backtest: rebalance_months must be positive");
    if (tc_bps < 0.0)
        throw ConfigError("backtest: tc_bps must be non-negative");
    if (!(leeway > 0.0 && leeway < 1.0))
        throw ConfigError("backtest: leeway must lie in (0, 1)");
    if (!(prior_half_life > 0.0))
        throw ConfigError("backtest: prior half-life must be positive");
    if (!(fast_half_life > 0.0) || !(slow_half_life >= fast_half_life))
        throw ConfigError("backtest: need 0 < fast half-life <= slow half-life");
    if (frontier_points < 2)
        throw ConfigError("backtest: frontier_points must be at least 2");
}

double turnover(const Eigen::VectorXd& prev_drifted, const Eigen::VectorXd& next) {
    if (prev_drifted.size() != next.size())
        throw DataError("turnover: weight vector length mismatch");
    return 0.5 * (next - prev_drifted).lpNorm<1>();
}

SummaryStats summary_stats(const std::vector<double>& r, double annual_rf,
                           const std::vector<double>* turnover_series) {
    if (r.empty())
        throw DataError("summary_stats: empty return series");
    const auto n = static_cast<double>(r.size());

    SummaryStats s;
    s.low_confidence = r.size() < 12;

    double mean = 0.0;
    for (double x : r)
        mean += x;
    mean /= n;
    s.ann_return_log = 12.0 * mean;
    s.ann_return_geometric = std::exp(s.ann_return_log) - 1.0;

    double var = 0.0;
    if (r.size() > 1) {
        for (double x : r)
            var += (x - mean) * (x - mean);
        var /= (n - 1.0);
        if (var <= 1e-24 * mean * mean)
            var = 0.0; // rounding residue of a constant series
    }
    s.ann_vol = std::sqrt(12.0 * var);
    s.sharpe = s.ann_vol > 0.0 ? (s.ann_return_log - annual_rf) / s.ann_vol
                               : std::numeric_limits<double>::quiet_NaN();

    double wealth = 1.0, peak = 1.0, max_dd = 0.0;
    for (double x : r) {
        wealth *= std::exp(x);
        peak = std::max(peak, wealth);
        max_dd = std::max(max_dd, 1.0 - wealth / peak);
    }
    s.max_drawdown = max_dd;

    std::vector<double> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    std::size_t k = static_cast<std::size_t>(std::ceil(0.05 * n));
    k = std::max<std::size_t>(k, 1);
    double q = sorted[k - 1];
    double tail_sum = 0.0;
    std::size_t tail_n = 0;
    for (double x : sorted) {
        if (x <= q) {
            tail_sum += x;
            ++tail_n;
        } else {
            break;
        }
    }
    s.cvar_95 = -(tail_sum / static_cast<double>(tail_n));

    if (turnover_series && !turnover_series->empty()) {
        double t_sum = 0.0;
        for (double t : *turnover_series)
            t_sum += t;
        s.avg_monthly_turnover = t_sum / static_cast<double>(turnover_series->size());
    }
    return s;
}

namespace {

/// Re-derive one state variable from raw data visible at `as_of`.
ingest::StateVariable prepare_signal(const TimeSeriesPanel& signals, const SignalSpec& spec,
                                     const BacktestConfig& cfg, Month as_of) {
    TimeSeriesPanel s = signals.select({spec.name}).truncate(as_of);
    if (spec.quarterly)
        s = ingest::interpolate_quarterly(s);
    if (spec.lag_months > 0)
        s = ingest::lag_series(s, spec.lag_months).truncate(as_of);

    // Contiguous non-missing stretch; interior gaps are not imputed.
    const auto& col = s.column(0);
    std::size_t first = 0;
    while (first < col.size() && std::isnan(col[first]))
        ++first;
    std::size_t last = col.size();
    while (last > first && std::isnan(col[last - 1]))
        --last;
    if (first == last)
        throw DataError("signal '" + spec.name + "' has no usable data at " +
                        as_of.to_string());
    for (std::size_t i = first; i < last; ++i)
        if (std::isnan(col[i]))
            throw DataError("signal '" + spec.name + "' has an interior gap at " +
                            s.months()[i].to_string());

    std::vector<Month> months(s.months().begin() + static_cast<long>(first),
                              s.months().begin() + static_cast<long>(last));
    std::vector<double> values(col.begin() + static_cast<long>(first),
                               col.begin() + static_cast<long>(last));
    double fast = spec.fast_half_life > 0.0 ? spec.fast_half_life : cfg.fast_half_life;
    double slow = spec.slow_half_life > 0.0 ? spec.slow_half_life : cfg.slow_half_life;
    return ingest::smooth_and_score(spec.name, months, values, fast, slow);
}

std::vector<double> restrict_scores(const ingest::StateVariable& sv, Month first, Month last) {
    std::vector<double> out;
    for (std::size_t i = 0; i < sv.months.size(); ++i)
        if (sv.months[i] >= first && sv.months[i] <= last)
            out.push_back(sv.scores[i]);
    return out;
}

void require_consecutive_months(const TimeSeriesPanel& panel, const std::string& what) {
    const auto& m = panel.months();
    for (std::size_t i = 1; i < m.size(); ++i)
        if (m[i].serial() != m[i - 1].serial() + 1)
            throw DataError(what + ": months not consecutive around " + m[i].to_string());
}

ReturnPanel slice_rows(const ReturnPanel& panel, std::size_t first_row, std::size_t last_row) {
    ReturnPanel out;
    out.assets = panel.assets;
    out.months.assign(panel.months.begin() + static_cast<long>(first_row),
                      panel.months.begin() + static_cast<long>(last_row + 1));
    out.values = panel.values.middleRows(static_cast<Eigen::Index>(first_row),
                                         static_cast<Eigen::Index>(last_row - first_row + 1));
    return out;
}

} // namespace

BacktestResult run_backtest(const TimeSeriesPanel& prices, const TimeSeriesPanel& signals,
                            const std::vector<SignalSpec>& specs, const BacktestConfig& cfg) {
    cfg.validate();
    require_consecutive_months(prices, "price panel");
    if (cfg.model == Model::HSFP) {
        if (specs.empty())
            throw ConfigError("backtest: HS-FP model needs at least one state variable");
        require_consecutive_months(signals, "signal panel");
        for (const auto& spec : specs)
            if (!signals.has_column(spec.name))
                throw DataError("backtest: signals panel has no column '" + spec.name + "'");
    }

    ReturnPanel returns = ingest::log_returns(prices);
    const std::size_t t_total = returns.rows();
    if (t_total <= static_cast<std::size_t>(cfg.train_months))
        throw DataError("backtest: need more than " + std::to_string(cfg.train_months) +
                        " return observations, have " + std::to_string(t_total));

    const auto n_assets = static_cast<Eigen::Index>(returns.n_assets());
    Eigen::MatrixXd simple = returns.values.array().exp() - 1.0;

    BacktestResult res;
    res.model = cfg.model;
    res.config = cfg;
    res.asset_names = returns.assets;

    // Derive target weights from data visible at the end of return row t.
    auto decide = [&](std::size_t t) -> Eigen::VectorXd {
        const Month as_of = returns.months[t];
        if (cfg.model == Model::EW)
            return portfolio::benchmark_ew(returns.n_assets()).weights;

        if (cfg.model == Model::MVO) {
            ReturnPanel window = slice_rows(returns, 0, t);
            return portfolio::benchmark_mvo(window, cfg.risk_free_rate, cfg.frontier_points)
                .weights;
        }

        // HS-FP: rebuild every state variable from raw data up to as_of.
        std::vector<ingest::StateVariable> states;
        states.reserve(specs.size());
        for (const auto& spec : specs) {
            try {
                states.push_back(prepare_signal(signals, spec, cfg, as_of));
            } catch (const std::exception& e) {
                throw DataError("rebalance " + as_of.to_string() + ": " + e.what());
            }
        }

        // Common conditioning grid: months where returns and every state
        // variable are available.
        Month grid_first = returns.months.front();
        Month grid_last = as_of;
        for (const auto& sv : states) {
            grid_first = std::max(grid_first, sv.months.front());
            grid_last = std::min(grid_last, sv.months.back());
        }
        if (grid_last < grid_first)
            throw DataError("rebalance " + as_of.to_string() +
                            ": conditioning grid is empty");
        std::size_t row_first = 0;
        while (row_first < t_total && returns.months[row_first] < grid_first)
            ++row_first;
        std::size_t row_last = t;
        while (row_last > row_first && returns.months[row_last] > grid_last)
            --row_last;
        const std::size_t grid_len = row_last - row_first + 1;
        if (grid_len < 2)
            throw DataError("rebalance " + as_of.to_string() +
                            ": conditioning grid has fewer than 2 dates");
        grid_first = returns.months[row_first];
        grid_last = returns.months[row_last];

        ConditioningDiagnostics diag;
        diag.grid.assign(returns.months.begin() + static_cast<long>(row_first),
                         returns.months.begin() + static_cast<long>(row_last + 1));
        diag.prior = prob::exp_decay(grid_len, cfg.prior_half_life);

        std::vector<prob::ProbabilityVector> posteriors;
        for (const auto& sv : states) {
            std::vector<double> z = restrict_scores(sv, grid_first, grid_last);
            try {
                entropy::TimeStateResult tsr =
                    entropy::time_state_condition(z, sv.target, cfg.leeway,
                                                  cfg.prior_half_life);
                posteriors.push_back(tsr.solution.posterior);
                diag.variable_names.push_back(sv.name);
                diag.kl_divergences.push_back(tsr.solution.kl_divergence);
                diag.iterations.push_back(tsr.solution.iterations);
            } catch (const std::exception& e) {
                res.warnings.push_back("rebalance " + as_of.to_string() +
                                       ": dropped state variable '" + sv.name +
                                       "': " + e.what());
            }
        }

        prob::ProbabilityVector combined;
        if (posteriors.empty()) {
            res.warnings.push_back("rebalance " + as_of.to_string() +
                                   ": all state variables failed; using the "
                                   "time-conditioned prior alone");
            combined = diag.prior;
            diag.ensemble_weights.method = cfg.combination;
        } else if (posteriors.size() == 1) {
            combined = posteriors.front();
            diag.ensemble_weights.method = cfg.combination;
            diag.ensemble_weights.weights = {1.0};
            diag.ensemble_weights.effective_scenarios = {
                prob::effective_scenarios(posteriors.front())};
            diag.ensemble_weights.diversity = {0.0};
        } else {
            ensemble::CombineResult comb = cfg.combination == ensemble::Method::DCC
                                               ? ensemble::combine_dcc(posteriors)
                                               : ensemble::combine_eq(posteriors);
            combined = comb.combined;
            diag.ensemble_weights = comb.weights;
        }
        diag.posteriors = posteriors;
        diag.combined = combined;
        res.diagnostics = std::move(diag);

        ReturnPanel window = slice_rows(returns, row_first, row_last);
        portfolio::FpMoments m = portfolio::fp_moments(window, combined);
        portfolio::PortfolioWeights w;
        try {
            w = portfolio::max_sharpe(m, cfg.risk_free_rate, cfg.frontier_points);
        } catch (const std::exception& e) {
            throw NumericError("rebalance " + as_of.to_string() + ": " + e.what());
        }
        return w.weights;
    };

    const double cost_rate = cfg.tc_bps / 1e4;
    Eigen::VectorXd current = Eigen::VectorXd::Zero(n_assets);
    bool invested = false;

    const auto first_decision = static_cast<std::size_t>(cfg.train_months - 1);
    auto is_decision_row = [&](std::size_t t) {
        if (t < first_decision || t + 1 >= t_total)
            return false;
        return (t - first_decision) % static_cast<std::size_t>(cfg.rebalance_months) == 0;
    };

    for (std::size_t t = first_decision; t < t_total; ++t) {
        const bool oos = t > first_decision;
        double gross_log = 0.0;
        if (oos) {
            double r_p = 0.0;
            for (Eigen::Index i = 0; i < n_assets; ++i)
                r_p += current(i) * simple(static_cast<Eigen::Index>(t), i);
            gross_log = std::log1p(r_p);
            // Buy-and-hold drift through the month.
            for (Eigen::Index i = 0; i < n_assets; ++i)
                current(i) = current(i) * (1.0 + simple(static_cast<Eigen::Index>(t), i)) /
                             (1.0 + r_p);
        }

        double month_turnover = 0.0;
        if (is_decision_row(t)) {
            Eigen::VectorXd target = decide(t);
            month_turnover = invested ? turnover(current, target) : 0.0;
            current = target;
            invested = true;
            res.rebalance_dates.push_back(returns.months[t]);
            res.weight_history.push_back(current);
        }

        if (oos) {
            res.months.push_back(returns.months[t]);
            res.gross.push_back(gross_log);
            res.net.push_back(gross_log - cost_rate * month_turnover);
            res.turnover.push_back(month_turnover);
        }
    }

    res.stats = summary_stats(res.net, cfg.risk_free_rate, &res.turnover);
    return res;
}

} // namespace hsfp::backtest
