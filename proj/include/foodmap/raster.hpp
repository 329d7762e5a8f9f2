#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "foodmap/categories.hpp"
#include "foodmap/errors.hpp"
#include "foodmap/geo.hpp"
#include "foodmap/kde.hpp"
#include "foodmap/timeslot.hpp"

namespace foodmap {

inline constexpr double kGridPaddingBandwidths = 4.0;
inline constexpr std::size_t kMaxGridCells = 10'000'000;

// Rasterized density surface in a local planar frame. Values are densities per
// square meter at cell centers, stored row-major with row 0 at the southern
// edge (yll).
struct DensityField {
  LocalFrame frame;
  double cell_size = 0;  // meters
  int nx = 0;
  int ny = 0;
  double xll = 0;  // west edge of the grid, frame meters
  double yll = 0;  // south edge
  std::vector<double> values;
  Bandwidth bandwidth;
  std::optional<FoodCategory> category;  // empty for a pooled run
  std::optional<TimeSlot> slot;
  std::size_t n_points = 0;

  double at(int ix, int iy) const {
    return values[static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
                  static_cast<std::size_t>(ix)];
  }
  double cell_center_x(int ix) const { return xll + (ix + 0.5) * cell_size; }
  double cell_center_y(int iy) const { return yll + (iy + 0.5) * cell_size; }

  double mass() const {
    double sum = 0;
    for (double v : values) sum += v;
    return sum * cell_size * cell_size;
  }
};

// Evaluates the estimate at every cell center over the bounding box of the
// points padded by 4h per side. Requires cell_size <= h/2 so the grid resolves
// the kernel.
inline DensityField rasterize(std::span<const PlanarPoint> points, Bandwidth h,
                              const LocalFrame& frame, double cell_size,
                              std::optional<FoodCategory> category = std::nullopt,
                              std::optional<TimeSlot> slot = std::nullopt) {
  if (points.empty()) throw EmptySample("rasterize: no sample points");
  if (!(h.meters > 0)) throw Error("rasterize: bandwidth must be positive");
  if (!(cell_size > 0) || cell_size > h.meters / 2.0)
    throw Error("rasterize: cell_size must be in (0, h/2]");

  double min_x = points[0].x, max_x = points[0].x;
  double min_y = points[0].y, max_y = points[0].y;
  for (const PlanarPoint& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double pad = kGridPaddingBandwidths * h.meters;

  DensityField field;
  field.frame = frame;
  field.cell_size = cell_size;
  field.xll = min_x - pad;
  field.yll = min_y - pad;
  field.nx = static_cast<int>(std::ceil((max_x + pad - field.xll) / cell_size));
  field.ny = static_cast<int>(std::ceil((max_y + pad - field.yll) / cell_size));
  field.bandwidth = h;
  field.category = category;
  field.slot = slot;
  field.n_points = points.size();

  const std::size_t cells =
      static_cast<std::size_t>(field.nx) * static_cast<std::size_t>(field.ny);
  if (cells > kMaxGridCells)
    throw GridTooLarge("rasterize: grid would need " + std::to_string(cells) +
                       " cells");

  field.values.resize(cells);
  for (int iy = 0; iy < field.ny; ++iy) {
    const double cy = field.cell_center_y(iy);
    for (int ix = 0; ix < field.nx; ++ix) {
      field.values[static_cast<std::size_t>(iy) * static_cast<std::size_t>(field.nx) +
                   static_cast<std::size_t>(ix)] =
          kde_at(points, h, PlanarPoint{field.cell_center_x(ix), cy});
    }
  }
  return field;
}

}  // namespace foodmap
