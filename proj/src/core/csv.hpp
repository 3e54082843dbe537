#pragma once

#include "core/series.hpp"

#include <string>
#include <vector>

namespace hsfp::csv {

/// Load a panel from CSV: header row required, first column `date`
/// (ISO-8601), remaining columns numeric. Empty cells become NaN
/// (pre-alignment gaps, e.g. quarterly series on a monthly grid).
TimeSeriesPanel load_panel(const std::string& path);

/// Write a panel as CSV with month-end date labels. Numbers use
/// shortest-round-trip formatting so identical data gives identical bytes.
void write_panel(const TimeSeriesPanel& panel, const std::string& path);

/// Locale-independent double formatting (shortest round-trip).
std::string format_double(double v);

/// One CSV line from cells (no quoting; values must not contain commas).
std::string join_row(const std::vector<std::string>& cells);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Raw CSV parse, no type conversion.
Table read_table(const std::string& path);

} // namespace hsfp::csv
