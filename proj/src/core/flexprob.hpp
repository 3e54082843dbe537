#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hsfp::prob {

/// Nonnegative weights over historical dates, summing to 1. The scenario
/// weighting that turns history into a forward-looking distribution.
struct ProbabilityVector {
    std::vector<double> weights;
    std::vector<std::string> flags;

    std::size_t size() const { return weights.size(); }
    double operator[](std::size_t i) const { return weights[i]; }

    /// Throws if any weight is negative or the total strays from 1
    /// by more than 1e-12.
    void validate() const;
};

/// Equal weight 1/lambda on the most recent lambda dates, zero elsewhere.
/// lambda > length is clipped with a warning flag.
ProbabilityVector rolling_window(std::size_t length, long lambda);

/// Exponential-decay weights: w_t proportional to 2^(-(length-1-t)/half_life),
/// renormalized. Most recent date carries the largest weight.
ProbabilityVector exp_decay(std::size_t length, double half_life);

struct CrispResult {
    ProbabilityVector probabilities;
    double lower = 0.0;
    double upper = 0.0;
};

/// Equal weights on dates whose state value falls within a band holding
/// probability mass `leeway` around the empirical CDF value of `target`;
/// the CDF value is clamped to [leeway/2, 1-leeway/2] and targets outside
/// the sample quantile range pin the band to the sample extreme. The CDF
/// uses weights 1/n with linear interpolation between order statistics
/// (ties share the highest rank); the quantile is its inverse.
CrispResult crisp(const std::vector<double>& state, double target, double leeway);

/// Smooth state conditioning: w_t proportional to
/// exp(-|z_t - target|^gamma / bandwidth), gamma in {1, 2}.
ProbabilityVector kernel(const std::vector<double>& state, double target, double bandwidth,
                         int gamma);

/// Effective number of scenarios: exp(-sum p ln p) with 0 ln 0 = 0, or the
/// generalized form [sum p^gamma]^(-1/(gamma-1)) when an exponent is given.
double effective_scenarios(const ProbabilityVector& p,
                           std::optional<double> gamma = std::nullopt);

/// Empirical CDF / quantile helpers shared with the conditioning logic.
/// `sorted` must be ascending.
double empirical_cdf(const std::vector<double>& sorted, double x);
double smooth_quantile(const std::vector<double>& sorted, double u);

} // namespace hsfp::prob
