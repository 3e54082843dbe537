#pragma once

#include "core/backtest.hpp"
#include "core/robustness.hpp"

#include <cstddef>
#include <vector>

namespace hsfp::sweep {

/// Cartesian mesh over the five swept parameters. Expansion order is
/// leeway (outermost), rebalance, prior, fast, slow (innermost).
struct MeshSpec {
    std::vector<double> leeway;
    std::vector<int> rebalance_months;
    std::vector<double> prior_half_life;
    std::vector<double> fast_half_life;
    std::vector<double> slow_half_life;

    std::size_t size() const;
    std::vector<robust::TrialParams> expand() const;
};

/// One backtest per mesh point; net monthly returns per column. Columns
/// are independent, so `workers` threads split them; the result does not
/// depend on the schedule.
robust::TrialMatrix run_sweep(const TimeSeriesPanel& prices, const TimeSeriesPanel& signals,
                              const std::vector<backtest::SignalSpec>& specs,
                              const backtest::BacktestConfig& base, const MeshSpec& mesh,
                              int workers);

} // namespace hsfp::sweep
