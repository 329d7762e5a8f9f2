#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "foodmap/errors.hpp"

namespace foodmap {

inline constexpr double kEarthRadiusM = 6371008.8;  // IUGG mean radius
inline constexpr double kMetersPerDegreeLat =
    kEarthRadiusM * std::numbers::pi / 180.0;
inline constexpr double kFrameSpanLimitM = 100'000.0;

struct LatLon {
  double latitude = 0;
  double longitude = 0;
};

// Meters east/north of a LocalFrame origin.
struct PlanarPoint {
  double x = 0;
  double y = 0;

  friend constexpr bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

// Equirectangular projection anchored at the data centroid. Over a city-scale
// extent the distortion is orders of magnitude below the bandwidths of
// interest, so a full map projection is not warranted.
struct LocalFrame {
  double origin_latitude = 0;
  double origin_longitude = 0;
  double meters_per_degree_lat = kMetersPerDegreeLat;
  double meters_per_degree_lon = kMetersPerDegreeLat;
};

inline LocalFrame make_frame(std::span<const LatLon> points) {
  if (points.empty()) throw EmptyInput("make_frame: no points");

  double sum_lat = 0, sum_lon = 0;
  double min_lat = points[0].latitude, max_lat = points[0].latitude;
  double min_lon = points[0].longitude, max_lon = points[0].longitude;
  for (const LatLon& p : points) {
    sum_lat += p.latitude;
    sum_lon += p.longitude;
    min_lat = std::min(min_lat, p.latitude);
    max_lat = std::max(max_lat, p.latitude);
    min_lon = std::min(min_lon, p.longitude);
    max_lon = std::max(max_lon, p.longitude);
  }

  LocalFrame frame;
  frame.origin_latitude = sum_lat / static_cast<double>(points.size());
  frame.origin_longitude = sum_lon / static_cast<double>(points.size());
  frame.meters_per_degree_lat = kMetersPerDegreeLat;
  frame.meters_per_degree_lon =
      kMetersPerDegreeLat *
      std::cos(frame.origin_latitude * std::numbers::pi / 180.0);

  const double span_y = (max_lat - min_lat) * frame.meters_per_degree_lat;
  const double span_x = (max_lon - min_lon) * frame.meters_per_degree_lon;
  if (std::hypot(span_x, span_y) > kFrameSpanLimitM)
    throw SpanTooLarge("make_frame: input spans more than 100 km");
  return frame;
}

inline PlanarPoint project(const LocalFrame& frame, double latitude, double longitude) {
  PlanarPoint p{(longitude - frame.origin_longitude) * frame.meters_per_degree_lon,
                (latitude - frame.origin_latitude) * frame.meters_per_degree_lat};
  if (std::hypot(p.x, p.y) > kFrameSpanLimitM)
    throw OutOfSpan("project: point outside the frame's validity span");
  return p;
}

inline PlanarPoint project(const LocalFrame& frame, const LatLon& p) {
  return project(frame, p.latitude, p.longitude);
}

inline LatLon unproject(const LocalFrame& frame, PlanarPoint p) {
  return LatLon{frame.origin_latitude + p.y / frame.meters_per_degree_lat,
                frame.origin_longitude + p.x / frame.meters_per_degree_lon};
}

inline double planar_distance(PlanarPoint a, PlanarPoint b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace foodmap
