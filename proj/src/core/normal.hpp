#pragma once

namespace hsfp::normal {

/// Standard normal CDF.
double cdf(double x);

/// Standard normal quantile (inverse CDF) via the AS241 rational
/// approximation (absolute error below 1e-12 over the open unit interval).
double quantile(double p);

} // namespace hsfp::normal
