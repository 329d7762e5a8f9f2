#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "foodmap/csv.hpp"
#include "foodmap/errors.hpp"
#include "foodmap/hashtag.hpp"
#include "foodmap/records.hpp"

namespace foodmap {

inline constexpr int kDefaultWindowDays = 365;
inline constexpr std::size_t kMaxPostsPerBusiness = 300;

namespace detail {

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Locale-independent strict double parse.
inline bool parse_double(std::string_view s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

inline bool blank_row(const std::vector<std::string>& row) {
  return row.size() == 1 && row[0].empty();
}

inline void expect_header(const std::vector<std::string>& row,
                          std::initializer_list<std::string_view> expected,
                          std::size_t row_number) {
  if (row.size() != expected.size() ||
      !std::equal(row.begin(), row.end(), expected.begin())) {
    throw ParseError("unexpected header", row_number);
  }
}

}  // namespace detail

// businesses CSV: id,name,latitude,longitude,categories,rating
// `categories` is a |-separated list of canonical category names.
inline std::map<std::string, BusinessRecord> load_businesses(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  CsvReader reader(in);

  auto header = reader.next_row();
  if (!header) throw ParseError("empty businesses file", 1);
  detail::expect_header(*header,
                        {"id", "name", "latitude", "longitude", "categories", "rating"},
                        reader.row_number());

  std::map<std::string, BusinessRecord> out;
  while (auto row = reader.next_row()) {
    if (detail::blank_row(*row)) continue;
    const std::size_t rn = reader.row_number();
    if (row->size() != 6) throw ParseError("expected 6 fields", rn);

    BusinessRecord b;
    b.id = (*row)[0];
    b.name = (*row)[1];
    if (b.id.empty()) throw ParseError("empty business id", rn);
    try {
      b.hashtag = derive_hashtag(b.name);
    } catch (const EmptyName&) {
      throw ParseError("business name yields empty hashtag", rn);
    }
    if (!detail::parse_double((*row)[2], b.latitude) ||
        !detail::parse_double((*row)[3], b.longitude))
      throw ParseError("bad coordinate", rn);
    if (b.latitude < -90 || b.latitude > 90 || b.longitude < -180 || b.longitude > 180)
      throw InvalidCoordinate("row " + std::to_string(rn) + ": coordinate out of range");

    std::string_view cats = (*row)[4];
    while (!cats.empty()) {
      auto bar = cats.find('|');
      std::string_view token = cats.substr(0, bar);
      cats = bar == std::string_view::npos ? std::string_view{} : cats.substr(bar + 1);
      if (token.empty()) continue;
      auto cat = parse_category(token);
      if (!cat) throw ParseError("unknown category \"" + std::string(token) + "\"", rn);
      b.categories.push_back(*cat);
    }
    std::sort(b.categories.begin(), b.categories.end());
    b.categories.erase(std::unique(b.categories.begin(), b.categories.end()),
                       b.categories.end());

    if (!(*row)[5].empty()) {
      double r;
      if (!detail::parse_double((*row)[5], r) || r < 0 || r > 5)
        throw ParseError("rating must be in [0,5]", rn);
      b.rating = r;
    }
    if (!out.emplace(b.id, std::move(b)).second)
      throw ParseError("duplicate business id", rn);
  }
  return out;
}

// posts CSV: id,business_id,timestamp,latitude,longitude,category
// Blank coordinates inherit the venue's location.
inline std::vector<PostRecord> load_posts(
    const std::string& path, const std::map<std::string, BusinessRecord>& businesses) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  CsvReader reader(in);

  auto header = reader.next_row();
  if (!header) throw ParseError("empty posts file", 1);
  detail::expect_header(
      *header, {"id", "business_id", "timestamp", "latitude", "longitude", "category"},
      reader.row_number());

  std::vector<PostRecord> out;
  while (auto row = reader.next_row()) {
    if (detail::blank_row(*row)) continue;
    const std::size_t rn = reader.row_number();
    if (row->size() != 6) throw ParseError("expected 6 fields", rn);

    PostRecord p;
    p.id = (*row)[0];
    p.business_id = (*row)[1];
    if (p.id.empty()) throw ParseError("empty post id", rn);

    auto biz = businesses.find(p.business_id);
    if (biz == businesses.end())
      throw DanglingReference("row " + std::to_string(rn) + ": unknown business_id \"" +
                              p.business_id + "\"");

    auto ts = parse_rfc3339((*row)[2]);
    if (!ts) throw ParseError("bad timestamp \"" + (*row)[2] + "\"", rn);
    p.timestamp = *ts;

    const std::string& lat_s = (*row)[3];
    const std::string& lon_s = (*row)[4];
    if (lat_s.empty() != lon_s.empty())
      throw ParseError("latitude and longitude must be both present or both blank", rn);
    if (lat_s.empty()) {
      p.latitude = biz->second.latitude;
      p.longitude = biz->second.longitude;
      p.coords_inherited = true;
    } else {
      if (!detail::parse_double(lat_s, p.latitude) ||
          !detail::parse_double(lon_s, p.longitude))
        throw ParseError("bad coordinate", rn);
      if (p.latitude < -90 || p.latitude > 90 || p.longitude < -180 ||
          p.longitude > 180)
        throw InvalidCoordinate("row " + std::to_string(rn) +
                                ": coordinate out of range");
    }

    auto cat = parse_category((*row)[5]);
    if (!cat) throw ParseError("unknown category \"" + (*row)[5] + "\"", rn);
    p.category = *cat;
    p.slot = assign_time_slot(p.timestamp);
    p.day = attributed_day(p.timestamp);
    out.push_back(std::move(p));
  }
  return out;
}

// Loads both files and applies the filtering rules: posts outside the trailing
// window are dropped, each venue keeps its 300 most recent posts, venues with
// no surviving post are removed. Posts in the 02:00-05:00 gap survive with
// slot = Unassigned. Retained posts keep their source-file order.
inline Dataset load_dataset(const std::string& posts_path,
                            const std::string& businesses_path,
                            CivilDate reference_date,
                            int window_days = kDefaultWindowDays) {
  Dataset ds;
  ds.reference_date = reference_date;
  ds.window_days = window_days;
  ds.businesses = load_businesses(businesses_path);
  std::vector<PostRecord> posts = load_posts(posts_path, ds.businesses);

  const std::int64_t window_end = days_from_civil(reference_date);
  const std::int64_t window_start = window_end - (window_days - 1);

  // Recency window on the post's own local date.
  std::erase_if(posts, [&](const PostRecord& p) {
    const std::int64_t day = days_from_civil(p.timestamp.local_date);
    return day < window_start || day > window_end;
  });

  // Per-venue cap: keep the most recent kMaxPostsPerBusiness, breaking
  // timestamp ties by post id so the result is deterministic.
  std::map<std::string, std::vector<std::size_t>> by_business;
  for (std::size_t i = 0; i < posts.size(); ++i)
    by_business[posts[i].business_id].push_back(i);

  std::set<std::size_t> dropped;
  for (auto& [biz, indices] : by_business) {
    if (indices.size() <= kMaxPostsPerBusiness) continue;
    std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
      if (posts[a].timestamp.utc_seconds != posts[b].timestamp.utc_seconds)
        return posts[a].timestamp.utc_seconds > posts[b].timestamp.utc_seconds;
      return posts[a].id < posts[b].id;
    });
    dropped.insert(indices.begin() + kMaxPostsPerBusiness, indices.end());
  }
  if (!dropped.empty()) {
    std::vector<PostRecord> kept;
    kept.reserve(posts.size() - dropped.size());
    for (std::size_t i = 0; i < posts.size(); ++i)
      if (!dropped.contains(i)) kept.push_back(std::move(posts[i]));
    posts = std::move(kept);
  }
  ds.posts = std::move(posts);

  std::set<std::string> active;
  for (const PostRecord& p : ds.posts) active.insert(p.business_id);
  std::erase_if(ds.businesses, [&](const auto& kv) { return !active.contains(kv.first); });

  ds.provenance = "posts:" + detail::hex64(detail::fnv1a64(detail::read_file(posts_path))) +
                  " businesses:" +
                  detail::hex64(detail::fnv1a64(detail::read_file(businesses_path)));
  return ds;
}

// Partitions posts by slot, Unassigned included, preserving dataset order.
// The three named groups are the analysis strata; the Unassigned group exists
// only so nothing is lost.
inline std::map<TimeSlot, std::vector<PostRecord>> stratify(const Dataset& ds) {
  std::map<TimeSlot, std::vector<PostRecord>> out;
  out[TimeSlot::Breakfast];
  out[TimeSlot::Lunch];
  out[TimeSlot::Dinner];
  out[TimeSlot::Unassigned];
  for (const PostRecord& p : ds.posts) out[p.slot].push_back(p);
  return out;
}

}  // namespace foodmap
