#pragma once

#include <compare>
#include <string>
#include <vector>

namespace hsfp {

/// Calendar month, stored as a serial index (year * 12 + month - 1).
/// All panel data is aligned to month granularity; labels render as the
/// last calendar day of the month in ISO-8601.
class Month {
public:
    Month() = default;
    Month(int year, int month);

    static Month from_serial(int serial);
    /// Parse an ISO-8601 date (YYYY-MM-DD); the day is dropped.
    static Month parse(const std::string& iso_date);

    int year() const { return serial_ / 12; }
    int month() const { return serial_ % 12 + 1; }
    int serial() const { return serial_; }

    Month plus_months(int n) const { return from_serial(serial_ + n); }

    /// Month-end label, e.g. "2017-12-31".
    std::string to_string() const;

    auto operator<=>(const Month&) const = default;

private:
    int serial_ = 0;
};

int days_in_month(int year, int month);

std::vector<Month> month_range(Month first, Month last);

} // namespace hsfp
