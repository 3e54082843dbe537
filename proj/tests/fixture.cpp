#include "fixture.hpp"

#include "core/csv.hpp"
#include "support.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

namespace testsup {

Fixture make_fixture(std::size_t months, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n_assets = 4;

    // Two slow AR(1) factors; asset drifts load on them with different
    // signs so that state conditioning has something to find.
    std::vector<double> f1(months), f2(months);
    double a = 0.0, b = 0.0;
    for (std::size_t t = 0; t < months; ++t) {
        a = 0.94 * a + 0.25 * rng.normal();
        b = 0.90 * b + 0.30 * rng.normal();
        f1[t] = a;
        f2[t] = b;
    }

    const double base_drift[n_assets] = {0.006, 0.004, 0.005, 0.003};
    const double load1[n_assets] = {0.010, -0.006, 0.002, 0.000};
    const double load2[n_assets] = {-0.004, 0.008, 0.000, 0.003};
    const double vol[n_assets] = {0.045, 0.035, 0.040, 0.015};

    std::vector<hsfp::Month> dates;
    dates.reserve(months);
    hsfp::Month first(2000, 1);
    for (std::size_t t = 0; t < months; ++t)
        dates.push_back(first.plus_months(static_cast<int>(t)));

    std::vector<std::vector<double>> price_cols(n_assets,
                                                std::vector<double>(months, 0.0));
    double level[n_assets] = {100.0, 100.0, 100.0, 100.0};
    for (std::size_t t = 0; t < months; ++t) {
        for (std::size_t i = 0; i < n_assets; ++i) {
            double r = base_drift[i] + load1[i] * f1[t] + load2[i] * f2[t] +
                       vol[i] * rng.normal();
            level[i] *= std::exp(r);
            price_cols[i][t] = level[i];
        }
    }

    // Observable signals: noisy reads of the factors. The quarterly one is
    // only published every third month and arrives three months late.
    std::vector<double> cpi(months), gdp(months, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = 0; t < months; ++t) {
        cpi[t] = f1[t] + 0.15 * rng.normal();
        if (dates[t].month() % 3 == 0)
            gdp[t] = f2[t] + 0.10 * rng.normal();
    }

    Fixture fx;
    fx.prices = hsfp::TimeSeriesPanel(dates, {"equity_a", "equity_b", "equity_c", "bond"},
                                      std::move(price_cols));
    fx.signals = hsfp::TimeSeriesPanel(dates, {"cpi", "gdp"},
                                       {std::move(cpi), std::move(gdp)});

    hsfp::backtest::SignalSpec cpi_spec;
    cpi_spec.name = "cpi";
    cpi_spec.lag_months = 1;
    hsfp::backtest::SignalSpec gdp_spec;
    gdp_spec.name = "gdp";
    gdp_spec.quarterly = true;
    gdp_spec.lag_months = 3;
    fx.specs = {cpi_spec, gdp_spec};
    return fx;
}

void write_fixture_csvs(const Fixture& fx, const std::string& dir) {
    std::filesystem::create_directories(dir);
    hsfp::csv::write_panel(fx.prices, dir + "/prices.csv");
    hsfp::csv::write_panel(fx.signals, dir + "/signals.csv");
}

} // namespace testsup
