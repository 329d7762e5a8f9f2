#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "foodmap/categories.hpp"
#include "foodmap/datetime.hpp"
#include "foodmap/timeslot.hpp"

namespace foodmap {

struct BusinessRecord {
  std::string id;
  std::string name;
  std::string hashtag;  // derived from name
  double latitude = 0;
  double longitude = 0;
  std::vector<FoodCategory> categories;  // sorted, unique
  std::optional<double> rating;          // [0, 5]
};

struct PostRecord {
  std::string id;
  std::string business_id;
  Timestamp timestamp;
  double latitude = 0;
  double longitude = 0;
  bool coords_inherited = false;  // true when taken from the venue
  FoodCategory category = FoodCategory::Ramen;
  TimeSlot slot = TimeSlot::Unassigned;
  CivilDate day;  // attributed day (midnight-wrap applied)
};

struct Dataset {
  std::vector<PostRecord> posts;
  std::map<std::string, BusinessRecord> businesses;
  CivilDate reference_date;
  int window_days = 365;
  std::string provenance;  // digests of the source files

  // First calendar day of the analysis window; the window is
  // [reference_date - (window_days - 1), reference_date], inclusive.
  CivilDate window_start() const {
    return add_days(reference_date, -(window_days - 1));
  }
};

}  // namespace foodmap
