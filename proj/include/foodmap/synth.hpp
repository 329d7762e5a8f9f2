#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foodmap/categories.hpp"
#include "foodmap/csv.hpp"
#include "foodmap/dag.hpp"
#include "foodmap/datetime.hpp"
#include "foodmap/errors.hpp"
#include "foodmap/geo.hpp"
#include "foodmap/rng.hpp"
#include "foodmap/timeslot.hpp"

namespace foodmap {

struct ClusterSpec {
  double latitude = 0.0;
  double longitude = 0.0;
  double sigma_m = 100.0;
  double posts_per_day_per_slot = 1.0;
  std::array<double, kNumCategories> category_mix{};
};

// Linear Gaussian ground-truth model over the category counts. Each day
// draws, in topological order,
//   z_j = base_mean * (1 - sum_p w_pj) + sum_p w_pj * z_p + noise
// with root_sigma noise at roots and noise_sigma elsewhere, so every node
// keeps marginal mean base_mean. A count is the latent rounded and
// truncated at zero.
struct PlantedEdge {
  int parent = 0;
  int child = 0;
  double weight = 0.0;
};

struct PlantedDag {
  Dag graph{kNumCategories};
  std::vector<PlantedEdge> edges;
  double base_mean = 50.0;
  double root_sigma = 3.0;
  double noise_sigma = 1.0;
};

struct SynthSpec {
  std::uint64_t seed = 1;
  CivilDate reference_date{2012, 10, 31};
  int n_days = 60;
  int n_businesses = 8;
  int utc_offset_minutes = -240;
  std::vector<ClusterSpec> clusters;
  std::optional<PlantedDag> planted_dag;
};

struct SlotSample {
  std::vector<double> latents;      // day-major, n_days x 8; planted mode only
  std::vector<long> counts;         // day-major, n_days x 8
  std::vector<std::vector<long>> cluster_counts;  // [cluster][day*8 + cat]
};

struct SynthOutput {
  std::string businesses_csv;
  std::string posts_csv;
  std::string manifest_json;
};

namespace detail {

inline double planted_weight(const PlantedDag& planted, int parent, int child) {
  for (const PlantedEdge& e : planted.edges)
    if (e.parent == parent && e.child == child) return e.weight;
  return 0.0;
}

inline std::vector<int> topological_order(const Dag& dag) {
  const int n = static_cast<int>(dag.node_count());
  std::vector<int> order;
  std::uint32_t placed = 0;
  while (static_cast<int>(order.size()) < n) {
    bool progressed = false;
    for (int j = 0; j < n; ++j) {
      if ((placed >> j) & 1u) continue;
      if ((dag.parent_mask(static_cast<std::size_t>(j)) & ~placed) == 0) {
        order.push_back(j);
        placed |= 1u << j;
        progressed = true;
      }
    }
    if (!progressed) throw Error("topological_order: graph has a cycle");
  }
  return order;
}

}  // namespace detail

inline void validate_synth_spec(const SynthSpec& spec) {
  if (spec.n_days < 1 || spec.n_days > 365)
    throw InvalidSpec("n_days must be in [1, 365]");
  if (spec.clusters.empty()) throw InvalidSpec("at least one cluster required");
  if (spec.n_businesses < static_cast<int>(spec.clusters.size()))
    throw InvalidSpec("need at least one business per cluster");
  if (!valid_date(spec.reference_date))
    throw InvalidSpec("reference_date is not a valid calendar date");
  if (spec.utc_offset_minutes < -14 * 60 || spec.utc_offset_minutes > 14 * 60)
    throw InvalidSpec("utc_offset_minutes out of range");
  for (std::size_t i = 0; i < spec.clusters.size(); ++i) {
    const ClusterSpec& c = spec.clusters[i];
    const std::string where = "cluster " + std::to_string(i) + ": ";
    if (!(c.sigma_m > 0)) throw InvalidSpec(where + "sigma_m must be positive");
    if (c.latitude < -90 || c.latitude > 90 || c.longitude < -180 || c.longitude > 180)
      throw InvalidSpec(where + "center out of range");
    if (c.posts_per_day_per_slot < 0)
      throw InvalidSpec(where + "posts_per_day_per_slot must be non-negative");
    double mix_sum = 0.0;
    for (double m : c.category_mix) {
      if (m < 0) throw InvalidSpec(where + "category_mix entries must be non-negative");
      mix_sum += m;
    }
    if (std::abs(mix_sum - 1.0) > 1e-9)
      throw InvalidSpec(where + "category_mix must sum to 1");
  }
  if (spec.planted_dag) {
    const PlantedDag& p = *spec.planted_dag;
    if (p.graph.node_count() != kNumCategories)
      throw InvalidSpec("planted_dag must span all categories");
    if (!(p.root_sigma > 0) || !(p.noise_sigma > 0))
      throw InvalidSpec("planted_dag sigmas must be positive");
    for (const PlantedEdge& e : p.edges)
      if (!p.graph.has_edge(static_cast<std::size_t>(e.parent),
                            static_cast<std::size_t>(e.child)))
        throw InvalidSpec("planted_dag weight on a missing edge");
  }
}

// Draws n_days rows of latents and truncated counts from the planted
// model. One normal per (day, node in topological order), so the stream
// layout is reproducible. Exposed separately so structure-recovery tests
// can feed count tables to the learner without going through files.
inline SlotSample sample_dag_counts(const PlantedDag& planted, int n_days,
                                    PortableRng& rng) {
  const int n = static_cast<int>(planted.graph.node_count());
  const std::vector<int> order = detail::topological_order(planted.graph);

  SlotSample out;
  out.latents.assign(static_cast<std::size_t>(n_days) * n, 0.0);
  out.counts.assign(static_cast<std::size_t>(n_days) * n, 0);

  for (int day = 0; day < n_days; ++day) {
    double* z = &out.latents[static_cast<std::size_t>(day) * n];
    for (int j : order) {
      const std::uint32_t mask = planted.graph.parent_mask(static_cast<std::size_t>(j));
      double weight_sum = 0.0;
      double value = 0.0;
      for (int p = 0; p < n; ++p) {
        if (!((mask >> p) & 1u)) continue;
        const double w = detail::planted_weight(planted, p, j);
        weight_sum += w;
        value += w * z[p];
      }
      const double sigma = mask == 0 ? planted.root_sigma : planted.noise_sigma;
      z[j] = planted.base_mean * (1.0 - weight_sum) + value + rng.normal(0.0, sigma);
      out.counts[static_cast<std::size_t>(day) * n + j] =
          std::max<long>(0, std::lround(z[j]));
    }
  }
  return out;
}

namespace detail {

inline SlotSample sample_independent_counts(const SynthSpec& spec, PortableRng& rng) {
  const int n = static_cast<int>(kNumCategories);
  SlotSample out;
  out.counts.assign(static_cast<std::size_t>(spec.n_days) * n, 0);
  out.cluster_counts.assign(spec.clusters.size(),
                            std::vector<long>(static_cast<std::size_t>(spec.n_days) * n, 0));
  for (int day = 0; day < spec.n_days; ++day)
    for (std::size_t c = 0; c < spec.clusters.size(); ++c)
      for (int cat = 0; cat < n; ++cat) {
        const double lambda = spec.clusters[c].posts_per_day_per_slot *
                              spec.clusters[c].category_mix[static_cast<std::size_t>(cat)];
        const long k = rng.poisson(lambda);
        out.cluster_counts[c][static_cast<std::size_t>(day) * n + cat] = k;
        out.counts[static_cast<std::size_t>(day) * n + cat] += k;
      }
  return out;
}

// Slot windows used by the generator. Dinner stops before midnight so a
// generated post's calendar date always equals the day it counts toward.
inline std::pair<int, int> slot_seconds(TimeSlot slot) {
  switch (slot) {
    case TimeSlot::Breakfast: return {5 * 3600, 12 * 3600};
    case TimeSlot::Lunch: return {12 * 3600, 18 * 3600};
    case TimeSlot::Dinner: return {18 * 3600, 24 * 3600};
    case TimeSlot::Unassigned: break;
  }
  throw Error("slot_seconds: no generator window for this slot");
}

}  // namespace detail

// Deterministic dataset generator. The RNG stream is consumed in a fixed
// order: business placement, then per-slot count sampling, then per-post
// attributes in (day, slot, category, copy) order.
inline SynthOutput generate(const SynthSpec& spec) {
  validate_synth_spec(spec);
  PortableRng rng(spec.seed);

  const int n_cat = static_cast<int>(kNumCategories);
  const std::size_t n_clusters = spec.clusters.size();
  const auto slots = named_slots();

  std::vector<LocalFrame> frames;
  frames.reserve(n_clusters);
  for (const ClusterSpec& c : spec.clusters) {
    const LatLon center{c.latitude, c.longitude};
    frames.push_back(make_frame(std::span<const LatLon>(&center, 1)));
  }

  std::ostringstream businesses;
  write_csv_row(businesses, {"id", "name", "latitude", "longitude", "categories", "rating"});
  std::string all_categories_field;
  for (int cat = 0; cat < n_cat; ++cat) {
    if (cat) all_categories_field += '|';
    all_categories_field += canonical_name(static_cast<FoodCategory>(cat));
  }
  std::vector<std::vector<std::string>> cluster_business_ids(n_clusters);
  for (int b = 0; b < spec.n_businesses; ++b) {
    const std::size_t c = static_cast<std::size_t>(b) % n_clusters;
    const double dx = rng.normal(0.0, spec.clusters[c].sigma_m);
    const double dy = rng.normal(0.0, spec.clusters[c].sigma_m);
    const LatLon pos = unproject(frames[c], PlanarPoint{dx, dy});
    char id[16];
    std::snprintf(id, sizeof(id), "b%03d", b + 1);
    char name[32];
    std::snprintf(name, sizeof(name), "Venue %03d", b + 1);
    char rating[16];
    std::snprintf(rating, sizeof(rating), "%.1f", 3.0 + 0.1 * (b % 21));
    char lat[32], lon[32];
    std::snprintf(lat, sizeof(lat), "%.7f", pos.latitude);
    std::snprintf(lon, sizeof(lon), "%.7f", pos.longitude);
    write_csv_row(businesses, {id, name, lat, lon, all_categories_field, rating});
    cluster_business_ids[c].push_back(id);
  }

  std::vector<SlotSample> samples;
  samples.reserve(slots.size());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (spec.planted_dag)
      samples.push_back(sample_dag_counts(*spec.planted_dag, spec.n_days, rng));
    else
      samples.push_back(detail::sample_independent_counts(spec, rng));
  }

  const CivilDate first_day = add_days(spec.reference_date, -(spec.n_days - 1));

  std::vector<double> cluster_weights(n_clusters, 0.0);
  double weight_total = 0.0;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    cluster_weights[c] = spec.clusters[c].posts_per_day_per_slot;
    weight_total += cluster_weights[c];
  }
  if (weight_total <= 0)
    for (std::size_t c = 0; c < n_clusters; ++c) cluster_weights[c] = 1.0;

  auto draw_cluster = [&]() {
    double total = 0.0;
    for (double w : cluster_weights) total += w;
    double u = rng.uniform() * total;
    for (std::size_t c = 0; c + 1 < n_clusters; ++c) {
      if (u < cluster_weights[c]) return c;
      u -= cluster_weights[c];
    }
    return n_clusters - 1;
  };

  std::ostringstream posts;
  write_csv_row(posts, {"id", "business_id", "timestamp", "latitude", "longitude", "category"});
  std::vector<std::size_t> business_cursor(n_clusters, 0);
  std::vector<std::vector<long>> slot_cluster_totals(
      slots.size(), std::vector<long>(n_clusters, 0));
  long total_posts = 0;
  std::array<long, kNumCategories> category_totals{};

  long next_post_id = 1;
  for (int day = 0; day < spec.n_days; ++day) {
    const CivilDate date = add_days(first_day, day);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto [slot_begin, slot_end] = detail::slot_seconds(slots[s]);
      for (int cat = 0; cat < n_cat; ++cat) {
        auto emit_post = [&](std::size_t c) {
          const ClusterSpec& cluster = spec.clusters[c];
          const double dx = rng.normal(0.0, cluster.sigma_m);
          const double dy = rng.normal(0.0, cluster.sigma_m);
          const LatLon pos = unproject(frames[c], PlanarPoint{dx, dy});
          const int sod = slot_begin + static_cast<int>(rng.uniform() *
                              static_cast<double>(slot_end - slot_begin));
          Timestamp ts;
          ts.local_date = date;
          ts.local_second_of_day = sod;
          ts.offset_minutes = spec.utc_offset_minutes;
          ts.utc_seconds = days_from_civil(date) * 86400 + sod -
                           static_cast<std::int64_t>(spec.utc_offset_minutes) * 60;

          const std::vector<std::string>& ids = cluster_business_ids[c];
          const std::string& business = ids[business_cursor[c] % ids.size()];
          ++business_cursor[c];

          char pid[16];
          std::snprintf(pid, sizeof(pid), "p%06ld", next_post_id++);
          char lat[32], lon[32];
          std::snprintf(lat, sizeof(lat), "%.7f", pos.latitude);
          std::snprintf(lon, sizeof(lon), "%.7f", pos.longitude);
          write_csv_row(posts, {pid, business, format_rfc3339(ts), lat, lon,
                                std::string(canonical_name(static_cast<FoodCategory>(cat)))});
          ++slot_cluster_totals[s][c];
          ++total_posts;
          ++category_totals[static_cast<std::size_t>(cat)];
        };

        if (spec.planted_dag) {
          const long count =
              samples[s].counts[static_cast<std::size_t>(day) * n_cat + cat];
          for (long i = 0; i < count; ++i) emit_post(draw_cluster());
        } else {
          for (std::size_t c = 0; c < n_clusters; ++c) {
            const long count =
                samples[s].cluster_counts[c][static_cast<std::size_t>(day) * n_cat + cat];
            for (long i = 0; i < count; ++i) emit_post(c);
          }
        }
      }
    }
  }

  nlohmann::json manifest;
  manifest["generator"] = "mt19937_64-v1";
  manifest["seed"] = spec.seed;
  manifest["reference_date"] = format_date(spec.reference_date);
  manifest["first_date"] = format_date(first_day);
  manifest["n_days"] = spec.n_days;
  manifest["n_businesses"] = spec.n_businesses;
  manifest["utc_offset_minutes"] = spec.utc_offset_minutes;

  nlohmann::json categories = nlohmann::json::array();
  for (FoodCategory cat : all_categories()) categories.push_back(canonical_name(cat));
  manifest["categories"] = categories;

  nlohmann::json clusters = nlohmann::json::array();
  for (const ClusterSpec& c : spec.clusters) {
    nlohmann::json jc;
    jc["latitude"] = c.latitude;
    jc["longitude"] = c.longitude;
    jc["sigma_m"] = c.sigma_m;
    jc["posts_per_day_per_slot"] = c.posts_per_day_per_slot;
    nlohmann::json mix;
    for (int cat = 0; cat < n_cat; ++cat)
      mix[canonical_name(static_cast<FoodCategory>(cat))] =
          c.category_mix[static_cast<std::size_t>(cat)];
    jc["category_mix"] = mix;
    clusters.push_back(jc);
  }
  manifest["clusters"] = clusters;

  if (spec.planted_dag) {
    const PlantedDag& p = *spec.planted_dag;
    nlohmann::json jd;
    jd["base_mean"] = p.base_mean;
    jd["root_sigma"] = p.root_sigma;
    jd["noise_sigma"] = p.noise_sigma;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [parent, child] : to_edge_list(p.graph)) {
      nlohmann::json je;
      je["parent"] = canonical_name(static_cast<FoodCategory>(parent));
      je["child"] = canonical_name(static_cast<FoodCategory>(child));
      je["weight"] = detail::planted_weight(p, static_cast<int>(parent),
                                            static_cast<int>(child));
      edges.push_back(je);
    }
    jd["edges"] = edges;
    manifest["planted_dag"] = jd;
  } else {
    manifest["planted_dag"] = nullptr;
  }

  nlohmann::json slot_json;
  long grand_total = 0;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    nlohmann::json js;
    nlohmann::json counts = nlohmann::json::array();
    long slot_total = 0;
    for (int day = 0; day < spec.n_days; ++day) {
      nlohmann::json row = nlohmann::json::array();
      for (int cat = 0; cat < n_cat; ++cat) {
        const long k = samples[s].counts[static_cast<std::size_t>(day) * n_cat + cat];
        row.push_back(k);
        slot_total += k;
      }
      counts.push_back(row);
    }
    js["counts"] = counts;
    if (spec.planted_dag) {
      nlohmann::json latents = nlohmann::json::array();
      for (int day = 0; day < spec.n_days; ++day) {
        nlohmann::json row = nlohmann::json::array();
        for (int cat = 0; cat < n_cat; ++cat)
          row.push_back(samples[s].latents[static_cast<std::size_t>(day) * n_cat + cat]);
        latents.push_back(row);
      }
      js["latents"] = latents;
    }
    js["total"] = slot_total;
    js["cluster_totals"] = slot_cluster_totals[s];
    slot_json[slot_name(slots[s])] = js;
    grand_total += slot_total;
  }
  manifest["slots"] = slot_json;

  nlohmann::json totals;
  totals["posts"] = grand_total;
  nlohmann::json by_category;
  for (int cat = 0; cat < n_cat; ++cat)
    by_category[canonical_name(static_cast<FoodCategory>(cat))] =
        category_totals[static_cast<std::size_t>(cat)];
  totals["by_category"] = by_category;
  manifest["totals"] = totals;

  if (grand_total != total_posts)
    throw Error("generate: manifest/post count mismatch");

  SynthOutput out;
  out.businesses_csv = businesses.str();
  out.posts_csv = posts.str();
  out.manifest_json = manifest.dump(2) + "\n";
  return out;
}

// Spec files are JSON. category_mix may be an 8-element array in canonical
// category order or an object keyed by category name (missing keys are 0).
inline SynthSpec parse_synth_spec(const nlohmann::json& j) {
  SynthSpec spec;
  try {
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("reference_date")) {
      const auto parsed = parse_date(j.at("reference_date").get<std::string>());
      if (!parsed) throw InvalidSpec("reference_date must be YYYY-MM-DD");
      spec.reference_date = *parsed;
    }
    if (j.contains("n_days")) spec.n_days = j.at("n_days").get<int>();
    if (j.contains("n_businesses")) spec.n_businesses = j.at("n_businesses").get<int>();
    if (j.contains("utc_offset_minutes"))
      spec.utc_offset_minutes = j.at("utc_offset_minutes").get<int>();

    if (!j.contains("clusters") || !j.at("clusters").is_array())
      throw InvalidSpec("clusters array is required");
    for (const nlohmann::json& jc : j.at("clusters")) {
      ClusterSpec c;
      c.latitude = jc.at("latitude").get<double>();
      c.longitude = jc.at("longitude").get<double>();
      c.sigma_m = jc.at("sigma_m").get<double>();
      if (jc.contains("posts_per_day_per_slot"))
        c.posts_per_day_per_slot = jc.at("posts_per_day_per_slot").get<double>();
      const nlohmann::json& mix = jc.at("category_mix");
      if (mix.is_array()) {
        if (mix.size() != kNumCategories)
          throw InvalidSpec("category_mix array must have 8 entries");
        for (std::size_t i = 0; i < kNumCategories; ++i)
          c.category_mix[i] = mix[i].get<double>();
      } else if (mix.is_object()) {
        for (auto it = mix.begin(); it != mix.end(); ++it) {
          const auto cat = parse_category(it.key());
          if (!cat) throw InvalidSpec("unknown category in mix: " + it.key());
          c.category_mix[category_index(*cat)] = it.value().get<double>();
        }
      } else {
        throw InvalidSpec("category_mix must be an array or object");
      }
      spec.clusters.push_back(c);
    }

    if (j.contains("planted_dag") && !j.at("planted_dag").is_null()) {
      const nlohmann::json& jd = j.at("planted_dag");
      PlantedDag p;
      if (jd.contains("base_mean")) p.base_mean = jd.at("base_mean").get<double>();
      if (jd.contains("root_sigma")) p.root_sigma = jd.at("root_sigma").get<double>();
      if (jd.contains("noise_sigma")) p.noise_sigma = jd.at("noise_sigma").get<double>();
      for (const nlohmann::json& je : jd.at("edges")) {
        const auto parent = parse_category(je.at("parent").get<std::string>());
        const auto child = parse_category(je.at("child").get<std::string>());
        if (!parent || !child) throw InvalidSpec("unknown category in planted edge");
        PlantedEdge e;
        e.parent = static_cast<int>(category_index(*parent));
        e.child = static_cast<int>(category_index(*child));
        e.weight = je.at("weight").get<double>();
        if (!p.graph.can_add(static_cast<std::size_t>(e.parent),
                             static_cast<std::size_t>(e.child)))
          throw InvalidSpec("planted edges must form a DAG without duplicates");
        p.graph.add_edge(static_cast<std::size_t>(e.parent),
                         static_cast<std::size_t>(e.child));
        p.edges.push_back(e);
      }
      spec.planted_dag = std::move(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("malformed synth spec: ") + e.what());
  }
  validate_synth_spec(spec);
  return spec;
}

inline SynthSpec parse_synth_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("synth spec is not valid JSON: ") + e.what());
  }
  return parse_synth_spec(j);
}

}  // namespace foodmap
