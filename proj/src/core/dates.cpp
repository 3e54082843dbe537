#include "core/dates.hpp"

#include "core/errors.hpp"

#include <array>
#include <charconv>

namespace hsfp {

Month::Month(int year, int month) {
    if (month < 1 || month > 12)
        throw DataError("month out of range: " + std::to_string(month));
    serial_ = year * 12 + month - 1;
}

Month Month::from_serial(int serial) {
    Month m;
    m.serial_ = serial;
    return m;
}

namespace {

int parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError("bad date field: '" + std::string(s) + "'");
    return v;
}

} // namespace

Month Month::parse(const std::string& iso_date) {
    // YYYY-MM-DD (day is tolerated but ignored; YYYY-MM also accepted)
    if (iso_date.size() < 7 || iso_date[4] != '-')
        throw DataError("bad ISO date: '" + iso_date + "'");
    int y = parse_int(std::string_view(iso_date).substr(0, 4));
    int m = parse_int(std::string_view(iso_date).substr(5, 2));
    if (iso_date.size() > 7 && iso_date[7] != '-')
        throw DataError("bad ISO date: '" + iso_date + "'");
    return Month(y, m);
}

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> days = {31, 28, 31, 30, 31, 30,
                                                 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return days[month - 1];
}

std::string Month::to_string() const {
    char buf[32];
    int y = year();
    int m = month();
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, days_in_month(y, m));
    return buf;
}

std::vector<Month> month_range(Month first, Month last) {
    std::vector<Month> out;
    for (int s = first.serial(); s <= last.serial(); ++s)
        out.push_back(Month::from_serial(s));
    return out;
}

} // namespace hsfp
