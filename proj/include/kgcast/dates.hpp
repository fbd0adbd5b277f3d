#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace kgcast {

// Calendar dates are stored as whole days since 1990-01-01 (day 0).
// Negative values are valid and refer to earlier dates.

struct Ymd {
  int year;
  int month;  // 1..12
  int day;    // 1..31
};

int64_t date_to_days(int year, int month, int day);
Ymd days_to_date(int64_t days);

// Calendar year containing the given day number.
int year_of_day(int64_t days);

// Day number of Dec 31 of the given year; snapshots "until year y" include
// every edge stamped on or before this day.
int64_t year_end_day(int year);

// Strict ISO-8601 date ("YYYY-MM-DD"). Throws ValidationError naming the
// offending field.
int64_t parse_iso_date(std::string_view text);
std::string format_iso_date(int64_t days);

}  // namespace kgcast
