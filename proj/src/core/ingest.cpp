#include "core/ingest.hpp"

#include "core/errors.hpp"

#include <cmath>
#include <limits>

namespace hsfp::ingest {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

ReturnPanel log_returns(const TimeSeriesPanel& prices) {
    if (prices.rows() < 2)
        throw DataError("log_returns: need at least 2 price rows");
    if (prices.has_missing())
        throw DataError("log_returns: price panel has missing values");
    for (std::size_t c = 0; c < prices.cols(); ++c)
        for (std::size_t r = 0; r < prices.rows(); ++r)
            if (!(prices.value(r, c) > 0.0))
                throw DataError("log_returns: non-positive price in column '" +
                                prices.names()[c] + "' at " +
                                prices.months()[r].to_string());

    ReturnPanel out;
    out.assets = prices.names();
    out.months.assign(prices.months().begin() + 1, prices.months().end());
    out.values.resize(static_cast<Eigen::Index>(prices.rows() - 1),
                      static_cast<Eigen::Index>(prices.cols()));
    for (std::size_t c = 0; c < prices.cols(); ++c)
        for (std::size_t r = 1; r < prices.rows(); ++r)
            out.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
                std::log(prices.value(r, c) / prices.value(r - 1, c));
    return out;
}

std::vector<double> natural_spline(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<double>& query) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw DataError("natural_spline: need >= 2 knots");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1]))
            throw DataError("natural_spline: knots not strictly increasing");

    // Second derivatives M_i, natural boundary M_0 = M_{n-1} = 0,
    // by the Thomas algorithm on the standard tridiagonal system.
    std::vector<double> m(n, 0.0);
    if (n > 2) {
        const std::size_t k = n - 2;
        std::vector<double> diag(k), rhs(k), upper(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            double h0 = x[i + 1] - x[i];
            double h1 = x[i + 2] - x[i + 1];
            diag[i] = (h0 + h1) / 3.0;
            if (i + 1 < k)
                upper[i] = h1 / 6.0;
            rhs[i] = (y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0;
        }
        for (std::size_t i = 1; i < k; ++i) {
            double lower = (x[i + 1] - x[i]) / 6.0;
            double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m[k] = rhs[k - 1] / diag[k - 1];
        for (std::size_t i = k - 1; i >= 1; --i)
            m[i] = (rhs[i - 1] - upper[i - 1] * m[i + 1]) / diag[i - 1];
    }

    std::vector<double> out;
    out.reserve(query.size());
    for (double q : query) {
        if (q < x.front() || q > x.back()) {
            out.push_back(kNaN);
            continue;
        }
        std::size_t i = 0;
        while (i + 2 < n && q > x[i + 1])
            ++i;
        double h = x[i + 1] - x[i];
        double a = (x[i + 1] - q) / h;
        double b = (q - x[i]) / h;
        double v = a * y[i] + b * y[i + 1] +
                   ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
        out.push_back(v);
    }
    return out;
}

TimeSeriesPanel interpolate_quarterly(const TimeSeriesPanel& series) {
    std::vector<std::vector<double>> cols;
    cols.reserve(series.cols());
    std::vector<std::string> notes = series.notes();

    for (std::size_t c = 0; c < series.cols(); ++c) {
        const auto& raw = series.column(c);
        std::vector<double> kx, ky;
        for (std::size_t r = 0; r < series.rows(); ++r) {
            if (!std::isnan(raw[r])) {
                kx.push_back(static_cast<double>(series.months()[r].serial()));
                ky.push_back(raw[r]);
            }
        }
        if (kx.size() < 2)
            throw DataError("interpolate_quarterly: column '" + series.names()[c] +
                            "' has fewer than 2 observations");

        std::vector<double> qx;
        qx.reserve(series.rows());
        for (const auto& mth : series.months())
            qx.push_back(static_cast<double>(mth.serial()));

        std::vector<double> filled;
        if (kx.size() < 4) {
            // Too few knots for a cubic fit; piecewise linear instead.
            filled.reserve(qx.size());
            for (double q : qx) {
                if (q < kx.front() || q > kx.back()) {
                    filled.push_back(kNaN);
                    continue;
                }
                std::size_t i = 0;
                while (i + 2 < kx.size() && q > kx[i + 1])
                    ++i;
                double t = (q - kx[i]) / (kx[i + 1] - kx[i]);
                filled.push_back((1.0 - t) * ky[i] + t * ky[i + 1]);
            }
            notes.push_back("column '" + series.names()[c] +
                            "': linear interpolation fallback (" +
                            std::to_string(kx.size()) + " knots)");
        } else {
            filled = natural_spline(kx, ky, qx);
        }
        // Knot months keep their observed values exactly.
        std::size_t k = 0;
        for (std::size_t r = 0; r < series.rows(); ++r) {
            if (k < kx.size() && qx[r] == kx[k]) {
                filled[r] = ky[k];
                ++k;
            }
        }
        cols.push_back(std::move(filled));
    }

    TimeSeriesPanel out(series.months(), series.names(), std::move(cols));
    for (auto& n : notes)
        out.add_note(std::move(n));
    return out;
}

TimeSeriesPanel lag_series(const TimeSeriesPanel& series, int months) {
    if (months < 0)
        throw ConfigError("lag_series: negative lag");
    if (static_cast<std::size_t>(months) >= series.rows())
        throw DataError("lag_series: lag " + std::to_string(months) +
                        " >= series length " + std::to_string(series.rows()));
    if (months == 0)
        return series;

    std::vector<Month> out_months;
    out_months.reserve(series.rows());
    for (const auto& m : series.months())
        out_months.push_back(m.plus_months(months));

    std::vector<std::vector<double>> cols;
    cols.reserve(series.cols());
    for (std::size_t c = 0; c < series.cols(); ++c)
        cols.push_back(series.column(c));

    TimeSeriesPanel out(std::move(out_months), series.names(), std::move(cols));
    for (const auto& n : series.notes())
        out.add_note(n);
    return out;
}

namespace {

/// Renormalized EWMA over available history: numerator and denominator
/// both decay by 2^(-1/half_life) per month.
struct EwmaState {
    double decay;
    double num = 0.0;
    double den = 0.0;

    explicit EwmaState(double half_life) : decay(std::pow(2.0, -1.0 / half_life)) {}

    double push(double x) {
        num = decay * num + x;
        den = decay * den + 1.0;
        return num / den;
    }
};

} // namespace

StateVariable smooth_and_score(const std::string& name, const std::vector<Month>& months,
                               const std::vector<double>& signal, double fast_hl,
                               double slow_hl) {
    if (!(fast_hl > 0.0))
        throw ConfigError("smooth_and_score: fast half-life must be positive");
    if (!(slow_hl >= fast_hl))
        throw ConfigError("smooth_and_score: slow half-life must be >= fast half-life");
    if (signal.size() != months.size())
        throw DataError("smooth_and_score: signal/date length mismatch for '" + name + "'");
    if (static_cast<double>(signal.size()) <= slow_hl)
        throw DataError("smooth_and_score: signal '" + name + "' too short (" +
                        std::to_string(signal.size()) + " <= slow half-life)");
    for (double v : signal)
        if (std::isnan(v))
            throw DataError("smooth_and_score: signal '" + name + "' has missing values");

    StateVariable sv;
    sv.name = name;
    sv.months = months;
    sv.scores.reserve(signal.size());

    EwmaState fast(fast_hl);
    EwmaState slow_mean(slow_hl);
    EwmaState slow_sq(slow_hl);
    bool flagged_zero_std = false;

    for (std::size_t t = 0; t < signal.size(); ++t) {
        double smoothed = fast.push(signal[t]);
        double mean = slow_mean.push(smoothed);
        double second = slow_sq.push(smoothed * smoothed);
        double var = second - mean * mean;
        // Cancellation in second - mean^2 leaves ~1e-16 relative noise on
        // degenerate stretches; treat that as zero dispersion.
        if (var <= 1e-12 * std::max(second, mean * mean))
            var = 0.0;
        double sd = var > 0.0 ? std::sqrt(var) : 0.0;
        if (sd > 0.0) {
            sv.scores.push_back((smoothed - mean) / sd);
        } else {
            // The first date has no dispersion by construction; only a
            // degenerate stretch after it is worth surfacing.
            sv.scores.push_back(0.0);
            if (t > 0 && !flagged_zero_std) {
                sv.flags.push_back("zero EWMA std at " + months[t].to_string() +
                                   "; score set to 0");
                flagged_zero_std = true;
            }
        }
    }
    sv.target = sv.scores.back();
    return sv;
}

} // namespace hsfp::ingest
