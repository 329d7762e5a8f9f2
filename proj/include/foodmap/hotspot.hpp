#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "foodmap/errors.hpp"
#include "foodmap/geo.hpp"
#include "foodmap/raster.hpp"

namespace foodmap {

// A 4-connected component of grid cells whose density reaches the extraction
// threshold.
struct HotSpot {
  PlanarPoint centroid;        // density-weighted mean of member cell centers
  LatLon centroid_geo;         // centroid back-projected through the frame
  double peak_density = 0;     // max member cell value, per m^2
  std::vector<std::pair<int, int>> member_cells;  // (ix, iy)
  double mass = 0;             // member density / total field density
};

// Threshold = the given upper quantile (nearest-rank) of the positive cell
// values; components are 4-connected sets of cells >= threshold, returned in
// descending peak density (stable for ties).
inline std::vector<HotSpot> extract_hotspots(const DensityField& field,
                                             double quantile = 0.95) {
  if (!(quantile > 0) || !(quantile < 1))
    throw Error("extract_hotspots: quantile must be in (0,1)");

  std::vector<double> positive;
  positive.reserve(field.values.size());
  double total = 0;
  for (double v : field.values) {
    total += v;
    if (v > 0) positive.push_back(v);
  }
  if (positive.empty()) return {};

  std::sort(positive.begin(), positive.end());
  const std::size_t m = positive.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(quantile * static_cast<double>(m)));
  if (rank > 0) --rank;
  if (rank >= m) rank = m - 1;
  const double threshold = positive[rank];

  const int nx = field.nx, ny = field.ny;
  std::vector<int> label(field.values.size(), -1);
  auto idx = [nx](int ix, int iy) {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(ix);
  };

  std::vector<HotSpot> spots;
  std::vector<std::pair<int, int>> stack;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (label[idx(ix, iy)] != -1 || field.at(ix, iy) < threshold) continue;
      const int spot_id = static_cast<int>(spots.size());
      HotSpot spot;
      stack.assign(1, {ix, iy});
      label[idx(ix, iy)] = spot_id;
      double weighted_x = 0, weighted_y = 0, member_sum = 0;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        const double v = field.at(cx, cy);
        spot.member_cells.emplace_back(cx, cy);
        spot.peak_density = std::max(spot.peak_density, v);
        weighted_x += v * field.cell_center_x(cx);
        weighted_y += v * field.cell_center_y(cy);
        member_sum += v;
        const int nbr[4][2] = {{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}};
        for (auto [nx_, ny_] : nbr) {
          if (nx_ < 0 || nx_ >= nx || ny_ < 0 || ny_ >= ny) continue;
          if (label[idx(nx_, ny_)] != -1 || field.at(nx_, ny_) < threshold) continue;
          label[idx(nx_, ny_)] = spot_id;
          stack.emplace_back(nx_, ny_);
        }
      }
      spot.centroid = {weighted_x / member_sum, weighted_y / member_sum};
      spot.centroid_geo = unproject(field.frame, spot.centroid);
      spot.mass = member_sum / total;
      std::sort(spot.member_cells.begin(), spot.member_cells.end());
      spots.push_back(std::move(spot));
    }
  }

  std::stable_sort(spots.begin(), spots.end(), [](const HotSpot& a, const HotSpot& b) {
    return a.peak_density > b.peak_density;
  });
  return spots;
}

}  // namespace foodmap
