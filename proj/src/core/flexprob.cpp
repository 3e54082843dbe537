#include "core/flexprob.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hsfp::prob {

void ProbabilityVector::validate() const {
    if (weights.empty())
        throw DataError("probability vector is empty");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0)
            throw NumericError("probability vector has a negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw NumericError("probability vector sums to " + std::to_string(sum));
}

namespace {

ProbabilityVector normalized(std::vector<double> w) {
    double sum = 0.0;
    for (double v : w)
        sum += v;
    if (!(sum > 0.0))
        throw NumericError("cannot normalize: total weight is zero");
    for (double& v : w)
        v /= sum;
    ProbabilityVector p;
    p.weights = std::move(w);
    return p;
}

} // namespace

ProbabilityVector rolling_window(std::size_t length, long lambda) {
    if (length == 0)
        throw DataError("rolling_window: empty sample");
    if (lambda <= 0)
        throw ConfigError("rolling_window: window must be positive");
    ProbabilityVector p;
    if (static_cast<std::size_t>(lambda) > length) {
        p.flags.push_back("window " + std::to_string(lambda) + " clipped to sample length " +
                          std::to_string(length));
        lambda = static_cast<long>(length);
    }
    p.weights.assign(length, 0.0);
    double w = 1.0 / static_cast<double>(lambda);
    for (std::size_t t = length - static_cast<std::size_t>(lambda); t < length; ++t)
        p.weights[t] = w;
    return p;
}

ProbabilityVector exp_decay(std::size_t length, double half_life) {
    if (length == 0)
        throw DataError("exp_decay: empty sample");
    if (!(half_life > 0.0))
        throw ConfigError("exp_decay: half-life must be positive");
    std::vector<double> w(length);
    double rate = std::log(2.0) / half_life;
    for (std::size_t t = 0; t < length; ++t)
        w[t] = std::exp(-rate * static_cast<double>(length - 1 - t));
    return normalized(std::move(w));
}

double empirical_cdf(const std::vector<double>& sorted, double x) {
    const std::size_t n = sorted.size();
    // Rank of the last element <= x (ties share the highest rank).
    if (x < sorted.front())
        return 1.0 / static_cast<double>(n);
    if (x >= sorted.back())
        return 1.0;
    auto hi = std::upper_bound(sorted.begin(), sorted.end(), x);
    std::size_t i = static_cast<std::size_t>(hi - sorted.begin()); // # values <= x
    double f_lo = static_cast<double>(i) / static_cast<double>(n);
    double v_lo = sorted[i - 1];
    double v_hi = *hi;
    if (x == v_lo)
        return f_lo;
    // Next distinct value and its (highest-tie) rank.
    auto hi2 = std::upper_bound(hi, sorted.end(), v_hi);
    double f_hi = static_cast<double>(hi2 - sorted.begin()) / static_cast<double>(n);
    return f_lo + (x - v_lo) / (v_hi - v_lo) * (f_hi - f_lo);
}

double smooth_quantile(const std::vector<double>& sorted, double u) {
    const std::size_t n = sorted.size();
    double f0 = 1.0 / static_cast<double>(n);
    if (u <= f0)
        return sorted.front();
    if (u >= 1.0)
        return sorted.back();
    // Walk distinct values; interpolate between (value, rank/n) points.
    std::size_t i = 0;
    double f_lo = f0;
    double v_lo = sorted.front();
    while (i < n) {
        // Advance to the highest tie of sorted[i].
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i])
            ++j;
        double f = static_cast<double>(j + 1) / static_cast<double>(n);
        if (f >= u && sorted[i] > v_lo)
            return v_lo + (u - f_lo) / (f - f_lo) * (sorted[i] - v_lo);
        if (f >= u)
            return sorted[i];
        f_lo = f;
        v_lo = sorted[i];
        i = j + 1;
    }
    return sorted.back();
}

CrispResult crisp(const std::vector<double>& state, double target, double leeway) {
    if (state.empty())
        throw DataError("crisp: empty state series");
    if (!(leeway > 0.0 && leeway < 1.0))
        throw ConfigError("crisp: leeway must lie in (0, 1)");

    std::vector<double> sorted = state;
    std::sort(sorted.begin(), sorted.end());
    const double half = leeway / 2.0;

    double f_target = empirical_cdf(sorted, target);
    f_target = std::clamp(f_target, half, 1.0 - half);

    const double q_lo = smooth_quantile(sorted, half);
    const double q_hi = smooth_quantile(sorted, 1.0 - half);

    CrispResult res;
    if (target <= q_lo) {
        res.lower = sorted.front();
        res.upper = smooth_quantile(sorted, f_target + half);
    } else if (target >= q_hi) {
        res.lower = smooth_quantile(sorted, f_target - half);
        res.upper = sorted.back();
    } else {
        res.lower = smooth_quantile(sorted, f_target - half);
        res.upper = smooth_quantile(sorted, f_target + half);
    }

    std::vector<double> w(state.size(), 0.0);
    std::size_t selected = 0;
    for (std::size_t t = 0; t < state.size(); ++t) {
        if (state[t] >= res.lower && state[t] <= res.upper) {
            w[t] = 1.0;
            ++selected;
        }
    }
    if (selected == 0)
        throw NumericError("crisp: no historical date falls in the band (target " +
                           std::to_string(target) + ", leeway " + std::to_string(leeway) +
                           "); widen the leeway");
    res.probabilities = normalized(std::move(w));
    return res;
}

ProbabilityVector kernel(const std::vector<double>& state, double target, double bandwidth,
                         int gamma) {
    if (state.empty())
        throw DataError("kernel: empty state series");
    if (!(bandwidth > 0.0))
        throw ConfigError("kernel: bandwidth must be positive");
    if (gamma != 1 && gamma != 2)
        throw ConfigError("kernel: exponent must be 1 (exponential) or 2 (Gaussian)");
    std::vector<double> w(state.size());
    for (std::size_t t = 0; t < state.size(); ++t) {
        double d = std::abs(state[t] - target);
        double e = gamma == 1 ? d : d * d;
        w[t] = std::exp(-e / bandwidth);
    }
    return normalized(std::move(w));
}

double effective_scenarios(const ProbabilityVector& p, std::optional<double> gamma) {
    p.validate();
    if (!gamma) {
        double h = 0.0;
        for (double w : p.weights)
            if (w > 0.0)
                h -= w * std::log(w);
        return std::exp(h);
    }
    double g = *gamma;
    if (!(g > 0.0) || g == 1.0)
        throw ConfigError("effective_scenarios: exponent must be positive and != 1");
    double s = 0.0;
    for (double w : p.weights)
        s += std::pow(w, g);
    return std::pow(s, -1.0 / (g - 1.0));
}

} // namespace hsfp::prob
