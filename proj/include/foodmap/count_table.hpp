#pragma once

#include <string>
#include <vector>

#include "foodmap/categories.hpp"
#include "foodmap/errors.hpp"
#include "foodmap/records.hpp"

namespace foodmap {

// Observation matrix for structure learning: one row per calendar day of the
// analysis window, one column per variable. The application always uses the
// 8 food categories in canonical order; tests may build smaller tables.
struct CountTable {
  TimeSlot slot = TimeSlot::Unassigned;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;        // row-major
  std::vector<std::string> labels;   // column names, size n_cols

  double at(std::size_t row, std::size_t col) const {
    return values[row * n_cols + col];
  }
  double& at(std::size_t row, std::size_t col) { return values[row * n_cols + col]; }

  static CountTable zeros(TimeSlot slot, std::size_t rows,
                          std::vector<std::string> labels) {
    CountTable t;
    t.slot = slot;
    t.n_rows = rows;
    t.n_cols = labels.size();
    t.labels = std::move(labels);
    t.values.assign(rows * t.n_cols, 0.0);
    return t;
  }
};

inline std::vector<std::string> category_labels() {
  std::vector<std::string> labels;
  labels.reserve(kNumCategories);
  for (FoodCategory c : all_categories()) labels.emplace_back(canonical_name(c));
  return labels;
}

// Daily per-category post counts for one named slot. Every day of the window
// appears as a row, zero days included, so N equals the window length. Posts
// whose attributed day falls before the window start (a midnight-wrapped
// dinner on the first day) are not counted.
inline CountTable build_count_table(const Dataset& ds, TimeSlot slot) {
  if (slot == TimeSlot::Unassigned)
    throw Error("build_count_table: slot must be a named slot");

  CountTable table = CountTable::zeros(slot, static_cast<std::size_t>(ds.window_days),
                                       category_labels());
  const std::int64_t first_day = days_from_civil(ds.window_start());

  std::size_t counted = 0;
  for (const PostRecord& p : ds.posts) {
    if (p.slot != slot) continue;
    const std::int64_t row = days_from_civil(p.day) - first_day;
    if (row < 0 || row >= static_cast<std::int64_t>(table.n_rows)) continue;
    table.at(static_cast<std::size_t>(row), category_index(p.category)) += 1.0;
    ++counted;
  }
  if (counted == 0)
    throw EmptyWindow("build_count_table: no posts assigned to slot " +
                      std::string(slot_name(slot)));
  return table;
}

}  // namespace foodmap
