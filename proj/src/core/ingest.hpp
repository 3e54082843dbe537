#pragma once

#include "core/series.hpp"

#include <string>
#include <vector>

namespace hsfp::ingest {

/// Smoothed, standardized market-state signal. The score series is the
/// z-scored EWMA of the raw signal; `target` is the latest score and is
/// the value the conditioning step centers on.
struct StateVariable {
    std::string name;
    std::vector<Month> months;
    std::vector<double> scores;
    double target = 0.0;
    double leeway = 0.1;
    std::vector<std::string> flags;
};

/// Monthly log returns ln(v_t / v_{t-1}) per column; output row count is
/// one less than the input, dated at the later month of each pair.
/// Rejects non-positive prices, naming the column and date.
ReturnPanel log_returns(const TimeSeriesPanel& prices);

/// Convert a sparse quarterly column (NaN on non-quarter months) to a
/// gap-free monthly series via a natural cubic spline through the
/// quarterly knots. Knot values are reproduced exactly; months outside
/// the knot range stay missing. Fewer than 4 knots falls back to linear
/// interpolation, noted in the panel's metadata.
TimeSeriesPanel interpolate_quarterly(const TimeSeriesPanel& series);

/// Report the raw value of month t - months at month t. Shifts coverage
/// forward: the first `months` dates of the raw sample become unusable
/// and the series extends `months` past the last raw observation.
TimeSeriesPanel lag_series(const TimeSeriesPanel& series, int months);

/// EWMA-smooth a raw signal with half-life fast_hl, then z-score the
/// smoothed series against EWMA mean/std with half-life slow_hl. EWMA
/// weights are renormalized over the available history (no warm-up
/// correction). A zero EWMA std yields score 0 at that date, flagged.
StateVariable smooth_and_score(const std::string& name, const std::vector<Month>& months,
                               const std::vector<double>& signal, double fast_hl,
                               double slow_hl);

/// Natural cubic spline through (x, y) knots evaluated at query points.
/// Exposed for reuse; x strictly increasing, >= 2 knots.
std::vector<double> natural_spline(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& query);

} // namespace hsfp::ingest
