#include "svarkit/calendar.hpp"

#include "svarkit/error.hpp"

#include <charconv>
#include <cstdio>

namespace svarkit {

YearMonth parse_year_month(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 >= text.size()) {
    throw DataError("malformed date '" + std::string(text) + "', expected YYYY-MM");
  }
  YearMonth ym;
  const auto ys = text.substr(0, dash);
  const auto ms = text.substr(dash + 1);
  auto [yp, yec] = std::from_chars(ys.data(), ys.data() + ys.size(), ym.year);
  auto [mp, mec] = std::from_chars(ms.data(), ms.data() + ms.size(), ym.month);
  if (yec != std::errc{} || mec != std::errc{} || yp != ys.data() + ys.size() ||
      mp != ms.data() + ms.size() || ym.month < 1 || ym.month > 12) {
    throw DataError("malformed date '" + std::string(text) + "', expected YYYY-MM");
  }
  return ym;
}

std::string format_year_month(YearMonth ym) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", ym.year, ym.month);
  return buf;
}

}  // namespace svarkit
