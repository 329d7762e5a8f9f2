#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace foodmap {

// The eight tracked food categories. The enumerator order is canonical: it is
// the column order of every count matrix and the tie-breaking order of every
// search, so it must never change.
enum class FoodCategory : std::uint8_t {
  Ramen = 0,
  Sushi,
  Waffles,
  Burgers,
  HotWings,
  Nachos,
  Bagels,
  Pizza,
};

inline constexpr std::size_t kNumCategories = 8;

constexpr std::array<FoodCategory, kNumCategories> all_categories() {
  return {FoodCategory::Ramen,    FoodCategory::Sushi,  FoodCategory::Waffles,
          FoodCategory::Burgers,  FoodCategory::HotWings,
          FoodCategory::Nachos,   FoodCategory::Bagels, FoodCategory::Pizza};
}

constexpr std::size_t category_index(FoodCategory c) {
  return static_cast<std::size_t>(c);
}

// Lowercase snake-case identifier used in all file formats.
constexpr std::string_view canonical_name(FoodCategory c) {
  switch (c) {
    case FoodCategory::Ramen: return "ramen";
    case FoodCategory::Sushi: return "sushi";
    case FoodCategory::Waffles: return "waffles";
    case FoodCategory::Burgers: return "burgers";
    case FoodCategory::HotWings: return "hot_wings";
    case FoodCategory::Nachos: return "nachos";
    case FoodCategory::Bagels: return "bagels";
    case FoodCategory::Pizza: return "pizza";
  }
  return "";
}

// Human-readable form used in rendered graphs and reports.
constexpr std::string_view display_name(FoodCategory c) {
  switch (c) {
    case FoodCategory::Ramen: return "Ramen";
    case FoodCategory::Sushi: return "Sushi";
    case FoodCategory::Waffles: return "Waffles";
    case FoodCategory::Burgers: return "Burgers";
    case FoodCategory::HotWings: return "Hot Wings";
    case FoodCategory::Nachos: return "Nachos";
    case FoodCategory::Bagels: return "Bagels";
    case FoodCategory::Pizza: return "Pizza";
  }
  return "";
}

inline std::optional<FoodCategory> parse_category(std::string_view s) {
  for (FoodCategory c : all_categories()) {
    if (s == canonical_name(c)) return c;
  }
  return std::nullopt;
}

}  // namespace foodmap
