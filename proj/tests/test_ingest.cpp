#include "core/ingest.hpp"

#include "core/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace hsfp;

namespace {

TimeSeriesPanel monthly_panel(const std::string& name, const std::vector<double>& values,
                              Month first = Month(2000, 1)) {
    std::vector<Month> months;
    for (std::size_t t = 0; t < values.size(); ++t)
        months.push_back(first.plus_months(static_cast<int>(t)));
    return TimeSeriesPanel(months, {name}, {values});
}

} // namespace

TEST_CASE("log returns of simple price moves") {
    auto panel = monthly_panel("a", {100.0, 110.0});
    ReturnPanel r = ingest::log_returns(panel);
    REQUIRE(r.rows() == 1);
    CHECK(r.values(0, 0) == doctest::Approx(std::log(1.1)).epsilon(1e-12));
    CHECK(r.months[0] == Month(2000, 2));

    auto flat = ingest::log_returns(monthly_panel("a", {100.0, 100.0, 100.0}));
    CHECK(flat.values(0, 0) == 0.0);
    CHECK(flat.values(1, 0) == 0.0);

    auto halved = ingest::log_returns(monthly_panel("a", {100.0, 50.0}));
    CHECK(halved.values(0, 0) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("log returns reject non-positive prices with context") {
    auto panel = monthly_panel("spot", {100.0, -1.0, 100.0});
    try {
        ingest::log_returns(panel);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string msg = e.what();
        CHECK(msg.find("spot") != std::string::npos);
        CHECK(msg.find("2000-02") != std::string::npos);
    }
}

TEST_CASE("log returns invert back to prices through cumulative sums") {
    testsup::Rng rng(11);
    std::vector<double> prices = {50.0};
    for (int t = 0; t < 80; ++t)
        prices.push_back(prices.back() * std::exp(0.002 + 0.04 * rng.normal()));
    ReturnPanel r = ingest::log_returns(monthly_panel("a", prices));
    double level = prices.front();
    for (std::size_t t = 0; t < r.rows(); ++t) {
        level *= std::exp(r.values(static_cast<Eigen::Index>(t), 0));
        CHECK(level == doctest::Approx(prices[t + 1]).epsilon(1e-9));
    }
}

namespace {

// Straight-line natural-spline oracle: assemble and solve the tridiagonal
// system for the interior second derivatives by Gaussian elimination.
std::vector<double> spline_oracle(const std::vector<double>& x, const std::vector<double>& y,
                                  const std::vector<double>& q) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    const std::size_t k = n - 2;
    std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
    std::vector<double> rhs(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double h0 = x[i + 1] - x[i];
        double h1 = x[i + 2] - x[i + 1];
        a[i][i] = (h0 + h1) / 3.0;
        if (i > 0)
            a[i][i - 1] = h0 / 6.0;
        if (i + 1 < k)
            a[i][i + 1] = h1 / 6.0;
        rhs[i] = (y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0;
    }
    for (std::size_t col = 0; col < k; ++col) {
        for (std::size_t row = col + 1; row < k; ++row) {
            if (a[row][col] == 0.0)
                continue;
            double f = a[row][col] / a[col][col];
            for (std::size_t c2 = col; c2 < k; ++c2)
                a[row][c2] -= f * a[col][c2];
            rhs[row] -= f * rhs[col];
        }
    }
    for (std::size_t row = k; row-- > 0;) {
        double acc = rhs[row];
        for (std::size_t c2 = row + 1; c2 < k; ++c2)
            acc -= a[row][c2] * m[c2 + 1];
        m[row + 1] = acc / a[row][row];
    }
    std::vector<double> out;
    for (double xv : q) {
        std::size_t i = 0;
        while (i + 2 < n && xv > x[i + 1])
            ++i;
        double h = x[i + 1] - x[i];
        double t0 = (x[i + 1] - xv) / h;
        double t1 = (xv - x[i]) / h;
        out.push_back(t0 * y[i] + t1 * y[i + 1] +
                      ((t0 * t0 * t0 - t0) * m[i] + (t1 * t1 * t1 - t1) * m[i + 1]) * h * h /
                          6.0);
    }
    return out;
}

TimeSeriesPanel quarterly_panel(const std::vector<double>& knot_values, int n_months) {
    std::vector<Month> months;
    std::vector<double> col(static_cast<std::size_t>(n_months),
                            std::numeric_limits<double>::quiet_NaN());
    Month first(2010, 3);
    for (int t = 0; t < n_months; ++t)
        months.push_back(first.plus_months(t));
    for (std::size_t k = 0; k < knot_values.size(); ++k)
        col[3 * k] = knot_values[k];
    return TimeSeriesPanel(months, {"gdp"}, {col});
}

} // namespace

TEST_CASE("quarterly interpolation reproduces knots exactly") {
    auto panel = quarterly_panel({1.0, 4.0, 2.0, 8.0, 5.0}, 13);
    auto out = ingest::interpolate_quarterly(panel);
    CHECK(out.value(0, 0) == 1.0);
    CHECK(out.value(3, 0) == 4.0);
    CHECK(out.value(6, 0) == 2.0);
    CHECK(out.value(9, 0) == 8.0);
    CHECK(out.value(12, 0) == 5.0);
    for (std::size_t r = 0; r < out.rows(); ++r)
        CHECK(!std::isnan(out.value(r, 0)));
}

TEST_CASE("natural spline of collinear knots stays linear") {
    auto panel = quarterly_panel({0.0, 3.0, 6.0, 9.0, 12.0}, 13);
    auto out = ingest::interpolate_quarterly(panel);
    for (std::size_t r = 0; r < out.rows(); ++r)
        CHECK(out.value(r, 0) == doctest::Approx(static_cast<double>(r)).epsilon(1e-12));
}

TEST_CASE("interior months match an independently solved spline system") {
    std::vector<double> knots;
    for (int k = 0; k < 5; ++k) {
        double x = 3.0 * k;
        knots.push_back((x - 6.0) * (x - 6.0));
    }
    auto panel = quarterly_panel(knots, 13);
    auto out = ingest::interpolate_quarterly(panel);

    std::vector<double> kx = {0, 3, 6, 9, 12};
    std::vector<double> q;
    for (int t = 0; t < 13; ++t)
        q.push_back(static_cast<double>(t));
    auto expected = spline_oracle(kx, knots, q);
    for (std::size_t r = 0; r < out.rows(); ++r)
        CHECK(out.value(r, 0) == doctest::Approx(expected[r]).epsilon(1e-9));
}

TEST_CASE("too few knots fall back to linear interpolation, flagged") {
    auto panel = quarterly_panel({2.0, 8.0, 5.0}, 7);
    auto out = ingest::interpolate_quarterly(panel);
    CHECK(out.value(1, 0) == doctest::Approx(4.0));
    CHECK(out.value(2, 0) == doctest::Approx(6.0));
    REQUIRE(!out.notes().empty());
    CHECK(out.notes()[0].find("linear") != std::string::npos);
}

TEST_CASE("lagging shifts dates forward and composes") {
    auto panel = monthly_panel("s", {1.0, 2.0, 3.0});

    auto same = ingest::lag_series(panel, 0);
    CHECK(same.months() == panel.months());

    auto lagged = ingest::lag_series(panel, 1);
    CHECK(lagged.months()[0] == Month(2000, 2));
    CHECK(lagged.value(0, 0) == 1.0);
    CHECK(lagged.value(1, 0) == 2.0);

    auto twice = ingest::lag_series(ingest::lag_series(panel, 1), 1);
    auto direct = ingest::lag_series(panel, 2);
    CHECK(twice.months() == direct.months());
    for (std::size_t r = 0; r < twice.rows(); ++r)
        CHECK(twice.value(r, 0) == direct.value(r, 0));

    CHECK_THROWS_AS(ingest::lag_series(panel, 3), DataError);
}

TEST_CASE("per-signal lag alignment on a synthetic two-signal fixture") {
    auto gdp = ingest::lag_series(monthly_panel("gdp", {10.0, 11.0, 12.0, 13.0, 14.0}), 3);
    auto cpi = ingest::lag_series(monthly_panel("cpi", {1.0, 2.0, 3.0, 4.0, 5.0}), 1);
    // At 2000-06 the visible gdp value is the raw 2000-03 one, and cpi the
    // raw 2000-05 one.
    Month probe(2000, 6);
    std::size_t gi = 0, ci = 0;
    while (gdp.months()[gi] != probe)
        ++gi;
    while (cpi.months()[ci] != probe)
        ++ci;
    CHECK(gdp.value(gi, 0) == 12.0);
    CHECK(cpi.value(ci, 0) == 5.0);
}

namespace {

// Explicit weight-sum EWMA, renormalized over available history.
double ewma_oracle(const std::vector<double>& x, std::size_t t, double hl) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k <= t; ++k) {
        double w = std::pow(2.0, -static_cast<double>(t - k) / hl);
        num += w * x[k];
        den += w;
    }
    return num / den;
}

} // namespace

TEST_CASE("constant signals score zero everywhere") {
    std::vector<Month> months;
    std::vector<double> sig(40, 3.25);
    for (int t = 0; t < 40; ++t)
        months.push_back(Month(2001, 1).plus_months(t));
    auto sv = ingest::smooth_and_score("flat", months, sig, 3.0, 12.0);
    for (double s : sv.scores)
        CHECK(s == 0.0);
    CHECK(sv.target == 0.0);
    CHECK(!sv.flags.empty());
}

TEST_CASE("step response decays at the fast half-life rate") {
    std::vector<Month> months;
    std::vector<double> sig;
    for (int t = 0; t < 60; ++t) {
        months.push_back(Month(2001, 1).plus_months(t));
        sig.push_back(t < 10 ? 0.0 : 1.0);
    }
    // Recover the smoothed series through the oracle and check the gap to 1
    // shrinks by 2^(-1/3) per month once the weights have saturated.
    double gap_50 = 1.0 - ewma_oracle(sig, 50, 3.0);
    double gap_51 = 1.0 - ewma_oracle(sig, 51, 3.0);
    CHECK(gap_51 / gap_50 == doctest::Approx(std::pow(2.0, -1.0 / 3.0)).epsilon(1e-4));
}

TEST_CASE("scores match the explicit weight-sum oracle") {
    testsup::Rng rng(23);
    std::vector<Month> months;
    std::vector<double> sig;
    double level = 5.0;
    for (int t = 0; t < 90; ++t) {
        months.push_back(Month(1999, 6).plus_months(t));
        level = 0.9 * level + 0.5 + 0.8 * rng.normal();
        sig.push_back(level);
    }
    auto sv = ingest::smooth_and_score("cpi", months, sig, 3.0, 12.0);

    std::vector<double> smoothed(sig.size());
    for (std::size_t t = 0; t < sig.size(); ++t)
        smoothed[t] = ewma_oracle(sig, t, 3.0);
    for (std::size_t t = 0; t < sig.size(); ++t) {
        double mean = ewma_oracle(smoothed, t, 12.0);
        std::vector<double> sq(smoothed.size());
        for (std::size_t k = 0; k < smoothed.size(); ++k)
            sq[k] = smoothed[k] * smoothed[k];
        double var = ewma_oracle(sq, t, 12.0) - mean * mean;
        double expected = var > 0.0 ? (smoothed[t] - mean) / std::sqrt(var) : 0.0;
        CHECK(sv.scores[t] == doctest::Approx(expected).epsilon(1e-10));
    }
    CHECK(sv.target == sv.scores.back());
}

TEST_CASE("scores are invariant to a constant signal shift") {
    testsup::Rng rng(29);
    std::vector<Month> months;
    std::vector<double> sig, shifted;
    for (int t = 0; t < 70; ++t) {
        months.push_back(Month(2002, 1).plus_months(t));
        double v = std::sin(0.3 * t) + 0.4 * rng.normal();
        sig.push_back(v);
        shifted.push_back(v + 100.0);
    }
    auto base = ingest::smooth_and_score("s", months, sig, 3.0, 12.0);
    auto moved = ingest::smooth_and_score("s", months, shifted, 3.0, 12.0);
    for (std::size_t t = 1; t < sig.size(); ++t)
        CHECK(base.scores[t] == doctest::Approx(moved.scores[t]).epsilon(1e-9));
}

TEST_CASE("smoothing rejects bad half-life combinations") {
    std::vector<Month> months;
    std::vector<double> sig;
    for (int t = 0; t < 20; ++t) {
        months.push_back(Month(2002, 1).plus_months(t));
        sig.push_back(static_cast<double>(t));
    }
    CHECK_THROWS_AS(ingest::smooth_and_score("s", months, sig, 0.0, 12.0), ConfigError);
    CHECK_THROWS_AS(ingest::smooth_and_score("s", months, sig, 6.0, 3.0), ConfigError);
    CHECK_THROWS_AS(ingest::smooth_and_score("s", months, sig, 3.0, 25.0), DataError);
}
