#pragma once

#include "core/backtest.hpp"
#include "core/series.hpp"

#include <string>
#include <vector>

namespace testsup {

/// Synthetic monthly dataset: four risky assets whose drifts load on two
/// slow latent factors, plus two observable state signals tracking those
/// factors (one monthly, one quarterly with gaps). Fully deterministic.
struct Fixture {
    hsfp::TimeSeriesPanel prices;
    hsfp::TimeSeriesPanel signals;
    std::vector<hsfp::backtest::SignalSpec> specs;
};

Fixture make_fixture(std::size_t months = 220, std::uint64_t seed = 7);

/// Write the fixture as the CSV pair the CLI consumes.
void write_fixture_csvs(const Fixture& fx, const std::string& dir);

} // namespace testsup
