#include "kgcast/dates.hpp"

#include <charconv>
#include <chrono>

#include "kgcast/errors.hpp"

namespace kgcast {

namespace {

using days_t = std::chrono::sys_days;

constexpr std::chrono::year_month_day kEpochYmd{std::chrono::year{1990}, std::chrono::month{1},
                                                std::chrono::day{1}};
const days_t kEpoch = days_t{kEpochYmd};

}  // namespace

int64_t date_to_days(int year, int month, int day) {
  if (month < 1 || month > 12) {
    throw ValidationError("month " + std::to_string(month) + " is out of range");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) {
    throw ValidationError("day " + std::to_string(day) + " does not exist in " + std::to_string(year) + "-" +
                          std::to_string(month));
  }
  return (days_t{ymd} - kEpoch).count();
}

Ymd days_to_date(int64_t days) {
  const days_t d = kEpoch + std::chrono::days{days};
  const std::chrono::year_month_day ymd{d};
  return Ymd{int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))};
}

int year_of_day(int64_t days) { return days_to_date(days).year; }

int64_t year_end_day(int year) { return date_to_days(year, 12, 31); }

int64_t parse_iso_date(std::string_view text) {
  auto fail = [&](const char* field) {
    throw ValidationError("bad ISO date '" + std::string(text) + "': " + field);
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail("expected YYYY-MM-DD");

  auto parse_int = [&](size_t off, size_t len, const char* field) {
    int v = 0;
    const char* first = text.data() + off;
    auto [p, ec] = std::from_chars(first, first + len, v);
    if (ec != std::errc{} || p != first + len) fail(field);
    return v;
  };
  const int y = parse_int(0, 4, "year");
  const int m = parse_int(5, 2, "month");
  const int d = parse_int(8, 2, "day");
  if (m < 1 || m > 12) fail("month out of range");
  if (d < 1 || d > 31) fail("day out of range");
  return date_to_days(y, m, d);
}

std::string format_iso_date(int64_t days) {
  const Ymd ymd = days_to_date(days);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", ymd.year, ymd.month, ymd.day);
  return buf;
}

}  // namespace kgcast
