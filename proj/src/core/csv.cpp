#include "core/csv.hpp"

#include "core/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hsfp::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open CSV file: " + path);
    Table t;
    std::string line;
    if (!std::getline(in, line))
        throw DataError("empty CSV file: " + path);
    for (auto& h : split_line(line))
        t.header.push_back(strip(h));
    while (std::getline(in, line)) {
        if (strip(line).empty())
            continue;
        auto cells = split_line(line);
        for (auto& c : cells)
            c = strip(c);
        t.rows.push_back(std::move(cells));
    }
    return t;
}

TimeSeriesPanel load_panel(const std::string& path) {
    Table t = read_table(path);
    if (t.header.empty() || strip(t.header[0]) != "date")
        throw DataError(path + ": first CSV column must be 'date'");
    if (t.header.size() < 2)
        throw DataError(path + ": no data columns");

    std::vector<std::string> names(t.header.begin() + 1, t.header.end());
    std::vector<Month> months;
    std::vector<std::vector<double>> cols(names.size());

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() != t.header.size())
            throw DataError(path + ": row " + std::to_string(r + 2) + " has " +
                            std::to_string(row.size()) + " cells, expected " +
                            std::to_string(t.header.size()));
        months.push_back(Month::parse(row[0]));
        for (std::size_t c = 0; c < names.size(); ++c) {
            const std::string& cell = row[c + 1];
            if (cell.empty()) {
                cols[c].push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            double v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw DataError(path + ": column '" + names[c] + "', date " + row[0] +
                                ": bad numeric value '" + cell + "'");
            cols[c].push_back(v);
        }
    }
    return TimeSeriesPanel(std::move(months), std::move(names), std::move(cols));
}

std::string format_double(double v) {
    if (std::isnan(v))
        return "";
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string join_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

void write_panel(const TimeSeriesPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write CSV file: " + path);
    std::vector<std::string> header = {"date"};
    for (const auto& n : panel.names())
        header.push_back(n);
    out << join_row(header);
    for (std::size_t r = 0; r < panel.rows(); ++r) {
        std::vector<std::string> cells = {panel.months()[r].to_string()};
        for (std::size_t c = 0; c < panel.cols(); ++c)
            cells.push_back(format_double(panel.value(r, c)));
        out << join_row(cells);
    }
}

} // namespace hsfp::csv
