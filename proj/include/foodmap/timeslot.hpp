#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "foodmap/datetime.hpp"

namespace foodmap {

// Daily meal windows. The three named slots cover 05:00-02:00; the 02:00-05:00
// gap is kept as Unassigned so that no post silently disappears. All intervals
// are half-open [start, end), which makes the four slots an exact partition of
// the day.
enum class TimeSlot : std::uint8_t {
  Breakfast = 0,  // [05:00, 12:00)
  Lunch,          // [12:00, 18:00)
  Dinner,         // [18:00, 24:00) and [00:00, 02:00)
  Unassigned,     // [02:00, 05:00)
};

inline constexpr std::array<TimeSlot, 3> named_slots() {
  return {TimeSlot::Breakfast, TimeSlot::Lunch, TimeSlot::Dinner};
}

constexpr std::string_view slot_name(TimeSlot s) {
  switch (s) {
    case TimeSlot::Breakfast: return "breakfast";
    case TimeSlot::Lunch: return "lunch";
    case TimeSlot::Dinner: return "dinner";
    case TimeSlot::Unassigned: return "unassigned";
  }
  return "";
}

inline std::optional<TimeSlot> parse_slot(std::string_view s) {
  if (s == "breakfast") return TimeSlot::Breakfast;
  if (s == "lunch") return TimeSlot::Lunch;
  if (s == "dinner") return TimeSlot::Dinner;
  if (s == "unassigned") return TimeSlot::Unassigned;
  return std::nullopt;
}

// Total over valid local clock times (0 <= second_of_day < 86400).
constexpr TimeSlot assign_time_slot(int second_of_day) {
  constexpr int h = 3600;
  if (second_of_day >= 5 * h && second_of_day < 12 * h) return TimeSlot::Breakfast;
  if (second_of_day >= 12 * h && second_of_day < 18 * h) return TimeSlot::Lunch;
  if (second_of_day >= 18 * h || second_of_day < 2 * h) return TimeSlot::Dinner;
  return TimeSlot::Unassigned;
}

constexpr TimeSlot assign_time_slot(const Timestamp& t) {
  return assign_time_slot(t.local_second_of_day);
}

// Day a post counts toward. A dinner that runs past midnight belongs to the
// evening it started, so 00:00-02:00 posts attribute to the previous date.
constexpr CivilDate attributed_day(const Timestamp& t) {
  if (t.local_second_of_day < 2 * 3600) return add_days(t.local_date, -1);
  return t.local_date;
}

}  // namespace foodmap
