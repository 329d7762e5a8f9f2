#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "foodmap/errors.hpp"
#include "foodmap/geo.hpp"
#include "foodmap/rng.hpp"

namespace foodmap {

// Smoothing length scale in meters.
struct Bandwidth {
  double meters = 0;
};

inline constexpr double kJitterRadiusM = 5.0;

// K(u) = exp(-u^2/2) / sqrt(2*pi)
inline double gaussian_kernel_1d(double u) {
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

// Isotropic bivariate density estimate:
//   f(q) = 1/(n * 2*pi*h^2) * sum_i exp(-|q - p_i|^2 / (2 h^2))
inline double kde_at(std::span<const PlanarPoint> points, Bandwidth h,
                     PlanarPoint query) {
  if (points.empty()) throw EmptySample("kde_at: no sample points");
  const double inv_2h2 = 1.0 / (2.0 * h.meters * h.meters);
  double sum = 0;
  for (const PlanarPoint& p : points) {
    const double dx = query.x - p.x;
    const double dy = query.y - p.y;
    sum += std::exp(-(dx * dx + dy * dy) * inv_2h2);
  }
  return sum / (static_cast<double>(points.size()) * 2.0 * std::numbers::pi *
                h.meters * h.meters);
}

// Per-point seed for the duplicate jitter, mixed from the record id and a
// run-level base seed.
inline std::uint64_t jitter_seed(std::string_view record_id, std::uint64_t base_seed) {
  std::uint64_t s = hash64(record_id) ^ (base_seed * 0x9e3779b97f4a7c15ull);
  return splitmix64(s);
}

// Venue-anchored posts collapse onto identical coordinates, which breaks
// leave-one-out scoring. Every member of a coordinate-duplicate group is
// displaced uniformly within a small disc, deterministically from its seed.
// Singleton points are left untouched.
inline void jitter_duplicates(std::vector<PlanarPoint>& points,
                              std::span<const std::uint64_t> seeds,
                              double radius_m = kJitterRadiusM) {
  std::map<std::pair<double, double>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < points.size(); ++i)
    groups[{points[i].x, points[i].y}].push_back(i);

  for (const auto& [coords, members] : groups) {
    if (members.size() < 2) continue;
    for (std::size_t i : members) {
      std::uint64_t state = i < seeds.size() ? seeds[i] : static_cast<std::uint64_t>(i);
      const double r = radius_m * std::sqrt(u64_to_unit(splitmix64(state)));
      const double theta = 2.0 * std::numbers::pi * u64_to_unit(splitmix64(state));
      points[i].x += r * std::cos(theta);
      points[i].y += r * std::sin(theta);
    }
  }
}

// Candidate grid and per-candidate mean leave-one-out log-density.
struct BandwidthSelection {
  std::vector<Bandwidth> candidates;
  std::vector<double> scores;
  Bandwidth chosen;
  bool clamped = false;  // chosen sits on the first or last grid point
};

inline std::vector<Bandwidth> log_spaced_grid(double min_m, double max_m, int count) {
  if (!(min_m > 0) || !(max_m > min_m) || count < 2)
    throw Error("log_spaced_grid: need 0 < min < max and count >= 2");
  std::vector<Bandwidth> grid(static_cast<std::size_t>(count));
  const double step = std::log(max_m / min_m) / (count - 1);
  for (int i = 0; i < count; ++i)
    grid[static_cast<std::size_t>(i)] = Bandwidth{min_m * std::exp(step * i)};
  return grid;
}

// First index of the maximum; ties resolve to the earliest candidate.
inline std::size_t first_argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

// Leave-one-out maximum-likelihood bandwidth selection.
//
//   score(h) = 1/n * sum_i log f_{-i}(x_i)
//
// where f_{-i} is the estimate built on the other n-1 points. The inner sum is
// evaluated in log space so scores stay finite even when a point is far from
// the rest of the sample. Coordinate duplicates are jittered first (seeded per
// point; the point index is the fallback seed when no seeds are given).
inline BandwidthSelection select_bandwidth(std::vector<PlanarPoint> points,
                                           std::span<const Bandwidth> candidates,
                                           std::span<const std::uint64_t> seeds = {}) {
  const std::size_t n = points.size();
  if (n < 10) throw TooFewPoints("select_bandwidth: need at least 10 points, got " +
                                 std::to_string(n));
  if (candidates.size() < 2)
    throw Error("select_bandwidth: need at least 2 candidates");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!(candidates[i].meters > 0))
      throw Error("select_bandwidth: candidate bandwidths must be positive");
    if (i > 0 && !(candidates[i].meters > candidates[i - 1].meters))
      throw Error("select_bandwidth: candidates must be strictly increasing");
  }

  jitter_duplicates(points, seeds);

  bool all_identical = true;
  for (std::size_t i = 1; i < n && all_identical; ++i)
    all_identical = points[i] == points[0];
  if (all_identical)
    throw DegenerateSample("select_bandwidth: all points identical after jitter");

  BandwidthSelection sel;
  sel.candidates.assign(candidates.begin(), candidates.end());
  sel.scores.assign(candidates.size(), 0.0);

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    double min_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = points[i].x - points[j].x;
      const double dy = points[i].y - points[j].y;
      d2[j] = dx * dx + dy * dy;
      if (j != i && d2[j] < min_d2) min_d2 = d2[j];
    }
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double h = candidates[c].meters;
      const double inv_2h2 = 1.0 / (2.0 * h * h);
      // log-sum-exp with the nearest neighbour as pivot
      const double pivot = -min_d2 * inv_2h2;
      double sum = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        sum += std::exp(-d2[j] * inv_2h2 - pivot);
      }
      const double log_f = pivot + std::log(sum) -
                           std::log(static_cast<double>(n - 1) * 2.0 *
                                    std::numbers::pi * h * h);
      sel.scores[c] += log_f;
    }
  }
  for (double& s : sel.scores) s /= static_cast<double>(n);

  const std::size_t best = first_argmax(sel.scores);
  sel.chosen = sel.candidates[best];
  sel.clamped = best == 0 || best + 1 == sel.candidates.size();
  return sel;
}

}  // namespace foodmap
