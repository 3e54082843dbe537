#include "core/series.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hsfp {

TimeSeriesPanel::TimeSeriesPanel(std::vector<Month> months, std::vector<std::string> names,
                                 std::vector<std::vector<double>> columns)
    : months_(std::move(months)), names_(std::move(names)), columns_(std::move(columns)) {
    if (columns_.size() != names_.size())
        throw DataError("panel: column count does not match name count");
    for (std::size_t c = 0; c < columns_.size(); ++c)
        if (columns_[c].size() != months_.size())
            throw DataError("panel: column '" + names_[c] + "' length mismatch");
    for (std::size_t i = 1; i < months_.size(); ++i)
        if (!(months_[i - 1] < months_[i]))
            throw DataError("panel: dates not strictly increasing at row " +
                            std::to_string(i) + " (" + months_[i].to_string() + ")");
}

std::size_t TimeSeriesPanel::column_index(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
        throw DataError("panel: no column named '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

bool TimeSeriesPanel::has_column(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& TimeSeriesPanel::column(const std::string& name) const {
    return columns_[column_index(name)];
}

TimeSeriesPanel TimeSeriesPanel::select(const std::vector<std::string>& names) const {
    std::vector<std::vector<double>> cols;
    cols.reserve(names.size());
    for (const auto& n : names)
        cols.push_back(column(n));
    return TimeSeriesPanel(months_, names, std::move(cols));
}

TimeSeriesPanel TimeSeriesPanel::truncate(Month cutoff) const {
    std::size_t n = 0;
    while (n < months_.size() && months_[n] <= cutoff)
        ++n;
    std::vector<Month> months(months_.begin(), months_.begin() + n);
    std::vector<std::vector<double>> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_)
        cols.emplace_back(c.begin(), c.begin() + n);
    return TimeSeriesPanel(std::move(months), names_, std::move(cols));
}

bool TimeSeriesPanel::has_missing() const {
    for (const auto& c : columns_)
        for (double v : c)
            if (std::isnan(v))
                return true;
    return false;
}

} // namespace hsfp
