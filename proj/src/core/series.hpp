#pragma once

#include "core/dates.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hsfp {

/// Monthly panel of named series. Values may be NaN before alignment
/// (e.g. a quarterly column carried on a monthly date grid); model-facing
/// code requires a gap-free panel and rejects anything else.
class TimeSeriesPanel {
public:
    TimeSeriesPanel() = default;
    TimeSeriesPanel(std::vector<Month> months, std::vector<std::string> names,
                    std::vector<std::vector<double>> columns);

    std::size_t rows() const { return months_.size(); }
    std::size_t cols() const { return names_.size(); }

    const std::vector<Month>& months() const { return months_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<double>& column(std::size_t i) const { return columns_[i]; }
    const std::vector<double>& column(const std::string& name) const;
    std::size_t column_index(const std::string& name) const;
    bool has_column(const std::string& name) const;

    double value(std::size_t row, std::size_t col) const { return columns_[col][row]; }

    /// Single-column view as its own panel.
    TimeSeriesPanel select(const std::vector<std::string>& names) const;

    /// Rows with month <= cutoff (raw truncation; NaNs preserved).
    TimeSeriesPanel truncate(Month cutoff) const;

    bool has_missing() const;

    /// Notes accumulated by transforms (e.g. interpolation fallback).
    const std::vector<std::string>& notes() const { return notes_; }
    void add_note(std::string note) { notes_.push_back(std::move(note)); }

private:
    std::vector<Month> months_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_; // column-major
    std::vector<std::string> notes_;
};

/// Monthly log returns, one column per asset. Row t is dated at the later
/// month of the price pair it was computed from.
struct ReturnPanel {
    std::vector<Month> months;
    std::vector<std::string> assets;
    Eigen::MatrixXd values; // rows x assets, log returns

    std::size_t rows() const { return months.size(); }
    std::size_t n_assets() const { return assets.size(); }
};

} // namespace hsfp
