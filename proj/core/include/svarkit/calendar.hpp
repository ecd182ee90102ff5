#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace svarkit {

/// A calendar month. Monthly frequency is the only one the library knows.
struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  /// Months since year 0, January.
  [[nodiscard]] constexpr long serial() const { return static_cast<long>(year) * 12 + (month - 1); }

  [[nodiscard]] static constexpr YearMonth from_serial(long serial) {
    long y = serial >= 0 ? serial / 12 : -((-serial + 11) / 12);
    return {static_cast<int>(y), static_cast<int>(serial - y * 12) + 1};
  }

  [[nodiscard]] constexpr YearMonth plus_months(long n) const { return from_serial(serial() + n); }

  friend constexpr auto operator<=>(const YearMonth& a, const YearMonth& b) {
    return a.serial() <=> b.serial();
  }
  friend constexpr bool operator==(const YearMonth&, const YearMonth&) = default;
};

/// Number of months from `a` to `b` (b - a).
[[nodiscard]] constexpr long months_between(YearMonth a, YearMonth b) { return b.serial() - a.serial(); }

/// Parses "YYYY-MM". Throws DataError on malformed text.
YearMonth parse_year_month(std::string_view text);

std::string format_year_month(YearMonth ym);

}  // namespace svarkit
