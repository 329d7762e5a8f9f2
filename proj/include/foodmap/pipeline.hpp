#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foodmap/bic.hpp"
#include "foodmap/count_table.hpp"
#include "foodmap/dag.hpp"
#include "foodmap/errors.hpp"
#include "foodmap/export.hpp"
#include "foodmap/hill_climb.hpp"
#include "foodmap/hotspot.hpp"
#include "foodmap/ingest.hpp"
#include "foodmap/kde.hpp"
#include "foodmap/raster.hpp"
#include "foodmap/synth.hpp"
#include "foodmap/timeslot.hpp"

namespace foodmap {

struct GridSpec {
  double min_m = 10.0;
  double max_m = 2000.0;
  int count = 32;
};

struct RunConfig {
  std::string command;
  std::string posts_path;
  std::string businesses_path;
  std::string reference_date;  // YYYY-MM-DD; empty = latest post date
  std::string slot = "all";    // breakfast | lunch | dinner | all
  std::string category = "all";  // all (pooled) | each | canonical name
  double bandwidth_m = 0.0;      // > 0 selects a fixed bandwidth
  GridSpec grid;
  double cell_size_m = 0.0;  // 0 = h/4
  double hotspot_quantile = 0.95;
  std::string bn_init = "empty";  // empty | full
  int bn_max_iterations = 200;
  std::uint64_t seed = 0;
  std::string synth_spec_path;
  std::string out_dir;
  int window_days = kDefaultWindowDays;
};

namespace detail {

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw IoError("failed writing " + path);
}

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline std::vector<TimeSlot> resolve_slots(const std::string& spec) {
  if (spec == "all") {
    const auto named = named_slots();
    return {named.begin(), named.end()};
  }
  const auto slot = parse_slot(spec);
  if (!slot || *slot == TimeSlot::Unassigned)
    throw InvalidSpec("unknown slot: " + spec + " (expected breakfast, lunch, dinner or all)");
  return {*slot};
}

inline std::vector<std::optional<FoodCategory>> resolve_categories(const std::string& spec) {
  if (spec == "all") return {std::nullopt};
  if (spec == "each") {
    std::vector<std::optional<FoodCategory>> out;
    for (FoodCategory c : all_categories()) out.emplace_back(c);
    return out;
  }
  const auto cat = parse_category(spec);
  if (!cat) throw InvalidSpec("unknown category: " + spec);
  return {std::optional<FoodCategory>(*cat)};
}

inline CivilDate resolve_reference_date(const RunConfig& config) {
  if (!config.reference_date.empty()) {
    const auto parsed = parse_date(config.reference_date);
    if (!parsed || !valid_date(*parsed))
      throw InvalidSpec("reference date must be a valid YYYY-MM-DD: " + config.reference_date);
    return *parsed;
  }
  const auto businesses = load_businesses(config.businesses_path);
  const auto posts = load_posts(config.posts_path, businesses);
  if (posts.empty())
    throw InvalidSpec("--reference-date is required when the posts file has no rows");
  CivilDate latest = posts.front().timestamp.local_date;
  std::int64_t latest_serial = days_from_civil(latest);
  for (const PostRecord& p : posts) {
    const std::int64_t serial = days_from_civil(p.timestamp.local_date);
    if (serial > latest_serial) {
      latest_serial = serial;
      latest = p.timestamp.local_date;
    }
  }
  return latest;
}

inline std::string slice_label(TimeSlot slot, std::optional<FoodCategory> category) {
  std::string label(slot_name(slot));
  if (category) label += std::string("/") + std::string(canonical_name(*category));
  return label;
}

inline std::string slice_suffix(TimeSlot slot, std::optional<FoodCategory> category) {
  std::string suffix(slot_name(slot));
  if (category) suffix += std::string("_") + std::string(canonical_name(*category));
  return suffix;
}

inline std::string hotspot_cell(const std::vector<HotSpot>& spots) {
  if (spots.empty()) return "-";
  std::string out;
  const std::size_t shown = std::min<std::size_t>(spots.size(), 3);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) out += "; ";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "HS%zu(%.5f,%.5f)", i + 1,
                  spots[i].centroid_geo.latitude, spots[i].centroid_geo.longitude);
    out += buf;
  }
  return out;
}

}  // namespace detail

inline nlohmann::json config_echo(const RunConfig& config, CivilDate resolved_reference) {
  nlohmann::json j;
  j["command"] = config.command;
  j["posts"] = config.posts_path;
  j["businesses"] = config.businesses_path;
  j["reference_date"] = format_date(resolved_reference);
  j["window_days"] = config.window_days;
  j["slot"] = config.slot;
  j["category"] = config.category;
  if (config.bandwidth_m > 0) {
    j["bandwidth_m"] = config.bandwidth_m;
    j["bandwidth_grid"] = nullptr;
  } else {
    j["bandwidth_m"] = nullptr;
    j["bandwidth_grid"] = {{"min_m", config.grid.min_m},
                           {"max_m", config.grid.max_m},
                           {"count", config.grid.count}};
  }
  j["cell_size_m"] =
      config.cell_size_m > 0 ? nlohmann::json(config.cell_size_m) : nlohmann::json(nullptr);
  j["hotspot_quantile"] = config.hotspot_quantile;
  j["bn_init"] = config.bn_init;
  j["bn_max_iterations"] = config.bn_max_iterations;
  j["seed"] = config.seed;
  j["out"] = config.out_dir;
  return j;
}

inline nlohmann::json dataset_summary(const Dataset& ds) {
  std::map<TimeSlot, long> by_slot;
  for (TimeSlot s : named_slots()) by_slot[s] = 0;
  by_slot[TimeSlot::Unassigned] = 0;
  std::array<long, kNumCategories> by_category{};
  for (const PostRecord& p : ds.posts) {
    ++by_slot[p.slot];
    ++by_category[category_index(p.category)];
  }

  nlohmann::json j;
  j["n_posts"] = ds.posts.size();
  j["n_businesses"] = ds.businesses.size();
  j["reference_date"] = format_date(ds.reference_date);
  j["window_start"] = format_date(ds.window_start());
  j["window_days"] = ds.window_days;
  j["provenance"] = ds.provenance;
  nlohmann::json slots;
  for (const auto& [slot, count] : by_slot) slots[slot_name(slot)] = count;
  j["by_slot"] = slots;
  nlohmann::json cats;
  for (FoodCategory c : all_categories())
    cats[canonical_name(c)] = by_category[category_index(c)];
  j["by_category"] = cats;
  return j;
}

namespace detail {

inline void write_ingest_outputs(const RunConfig& config, const Dataset& ds) {
  std::ostringstream businesses;
  write_csv_row(businesses, {"id", "name", "latitude", "longitude", "categories", "rating"});
  for (const auto& [id, b] : ds.businesses) {
    std::string cats;
    for (std::size_t i = 0; i < b.categories.size(); ++i) {
      if (i) cats += '|';
      cats += canonical_name(b.categories[i]);
    }
    char lat[32], lon[32];
    std::snprintf(lat, sizeof(lat), "%.7f", b.latitude);
    std::snprintf(lon, sizeof(lon), "%.7f", b.longitude);
    write_csv_row(businesses,
                  {b.id, b.name, lat, lon, cats,
                   b.rating ? fmt_double("%.1f", *b.rating) : std::string()});
  }
  write_text_file(join_path(config.out_dir, "dataset_businesses.csv"), businesses.str());

  std::ostringstream posts;
  write_csv_row(posts, {"id", "business_id", "timestamp", "latitude", "longitude", "category"});
  for (const PostRecord& p : ds.posts) {
    char lat[32], lon[32];
    std::snprintf(lat, sizeof(lat), "%.7f", p.latitude);
    std::snprintf(lon, sizeof(lon), "%.7f", p.longitude);
    write_csv_row(posts, {p.id, p.business_id, format_rfc3339(p.timestamp), lat, lon,
                          std::string(canonical_name(p.category))});
  }
  write_text_file(join_path(config.out_dir, "dataset_posts.csv"), posts.str());

  write_text_file(join_path(config.out_dir, "dataset_meta.json"),
                  dataset_summary(ds).dump(2) + "\n");
}

inline void write_kde_outputs(const RunConfig& config, const Dataset& ds) {
  if (ds.posts.empty()) throw EmptyWindow("no posts in the analysis window");
  if (config.bandwidth_m < 0) throw InvalidSpec("--bandwidth must be positive");
  if (config.cell_size_m < 0) throw InvalidSpec("--cell-size must be positive");

  std::vector<LatLon> anchor;
  anchor.reserve(ds.posts.size());
  for (const PostRecord& p : ds.posts) anchor.push_back({p.latitude, p.longitude});
  const LocalFrame frame = make_frame(anchor);

  const auto slots = resolve_slots(config.slot);
  const auto categories = resolve_categories(config.category);
  const auto strata = stratify(ds);
  const bool per_category = config.category != "all";

  std::ostringstream summary;
  summary << "slot\t";
  if (per_category) summary << "category\t";
  summary << "bandwidth_m\thotspots\n";

  for (TimeSlot slot : slots) {
    const std::vector<PostRecord>& slot_posts = strata.at(slot);
    for (const auto& category : categories) {
      const std::string label = slice_label(slot, category);

      std::vector<PlanarPoint> points;
      std::vector<std::uint64_t> seeds;
      for (const PostRecord& p : slot_posts) {
        if (category && p.category != *category) continue;
        points.push_back(project(frame, p.latitude, p.longitude));
        seeds.push_back(jitter_seed(p.id, config.seed));
      }
      if (points.empty()) throw TooFewPoints(label + ": no posts to analyze");

      jitter_duplicates(points, seeds);

      Bandwidth h{config.bandwidth_m};
      if (config.bandwidth_m <= 0) {
        const auto grid =
            log_spaced_grid(config.grid.min_m, config.grid.max_m, config.grid.count);
        BandwidthSelection sel;
        try {
          sel = select_bandwidth(points, grid, seeds);
        } catch (const TooFewPoints&) {
          throw TooFewPoints(label + ": fewer than 10 posts, cannot select a bandwidth");
        } catch (const DegenerateSample&) {
          throw DegenerateSample(label + ": all posts share one location");
        }
        h = sel.chosen;
        if (sel.clamped)
          std::cerr << "warning: " << label << ": selected bandwidth "
                    << fmt_double("%.1f", h.meters)
                    << " m sits on the grid edge; widen --bandwidth-grid\n";
      }

      const double cell = config.cell_size_m > 0 ? config.cell_size_m : h.meters / 4.0;
      const DensityField field = rasterize(points, h, frame, cell, category, slot);
      const std::vector<HotSpot> spots = extract_hotspots(field, config.hotspot_quantile);

      const std::string suffix = slice_suffix(slot, category);
      write_text_file(join_path(config.out_dir, "kde_" + suffix + ".asc"),
                      to_esri_ascii(field));
      write_text_file(join_path(config.out_dir, "kde_" + suffix + ".meta.json"),
                      field_metadata_json(field));
      write_text_file(join_path(config.out_dir, "hotspots_" + suffix + ".geojson"),
                      hotspots_geojson(spots, slot, category));

      summary << slot_name(slot) << '\t';
      if (per_category)
        summary << (category ? canonical_name(*category) : std::string_view("all")) << '\t';
      summary << fmt_double("%.1f", h.meters) << '\t' << hotspot_cell(spots) << '\n';

      std::cout << label << ": n=" << points.size() << ", h="
                << fmt_double("%.1f", h.meters) << " m, " << spots.size()
                << " hot spot" << (spots.size() == 1 ? "" : "s") << "\n";
    }
  }

  write_text_file(join_path(config.out_dir, "summary.tsv"), summary.str());
}

inline void write_bn_outputs(const RunConfig& config, const Dataset& ds) {
  if (config.bn_init != "empty" && config.bn_init != "full")
    throw InvalidSpec("--bn-init must be empty or full");
  const auto slots = resolve_slots(config.slot);

  for (TimeSlot slot : slots) {
    CountTable table;
    try {
      table = build_count_table(ds, slot);
    } catch (const EmptyWindow&) {
      throw EmptyWindow(std::string(slot_name(slot)) + ": no posts in the analysis window");
    }

    std::ostringstream counts;
    std::vector<std::string> header;
    header.emplace_back("date");
    for (const std::string& label : table.labels) header.push_back(label);
    write_csv_row(counts, std::span<const std::string>(header));
    for (std::size_t row = 0; row < table.n_rows; ++row) {
      std::vector<std::string> fields;
      fields.push_back(format_date(add_days(ds.window_start(), static_cast<std::int64_t>(row))));
      for (std::size_t col = 0; col < table.n_cols; ++col)
        fields.push_back(fmt_double("%.0f", table.at(row, col)));
      write_csv_row(counts, std::span<const std::string>(fields));
    }

    const Dag init = config.bn_init == "full" ? Dag::full(kNumCategories)
                                              : Dag(kNumCategories);
    const SearchTrace trace = hill_climb(table, init, config.bn_max_iterations);

    const std::string suffix(slot_name(slot));
    write_text_file(join_path(config.out_dir, "counts_" + suffix + ".csv"), counts.str());
    write_text_file(join_path(config.out_dir, "dag_" + suffix + ".json"),
                    dag_json(trace, slot));
    write_text_file(join_path(config.out_dir, "dag_" + suffix + ".dot"),
                    dag_to_dot(trace.final_graph, suffix));

    std::cout << slot_name(slot) << ": " << trace.final_graph.edge_count()
              << " edges, score " << fmt_double("%.2f", trace.final_score) << "\n";
  }
}

template <typename Body>
int guarded(Body&& body) {
  try {
    body();
    return 0;
  } catch (const TooFewPoints& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const EmptyWindow& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DegenerateSample& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const EmptySample& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const SpanTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const OutOfSpan& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const GridTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InsufficientRows& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace detail

inline int run_ingest(const RunConfig& config) {
  return detail::guarded([&] {
    const CivilDate reference = detail::resolve_reference_date(config);
    const Dataset ds = load_dataset(config.posts_path, config.businesses_path, reference,
                                    config.window_days);
    detail::ensure_dir(config.out_dir);
    detail::write_ingest_outputs(config, ds);
    detail::write_text_file(detail::join_path(config.out_dir, "config.json"),
                            config_echo(config, reference).dump(2) + "\n");

    const nlohmann::json summary = dataset_summary(ds);
    std::cout << "posts " << summary["n_posts"] << ", businesses "
              << summary["n_businesses"] << ", window "
              << summary["window_start"].get<std::string>() << ".."
              << summary["reference_date"].get<std::string>() << "\n";
    const nlohmann::json& slots = summary["by_slot"];
    std::cout << "breakfast " << slots["breakfast"] << ", lunch " << slots["lunch"]
              << ", dinner " << slots["dinner"] << ", unassigned "
              << slots["unassigned"] << "\n";
  });
}

inline int run_kde(const RunConfig& config) {
  return detail::guarded([&] {
    const CivilDate reference = detail::resolve_reference_date(config);
    const Dataset ds = load_dataset(config.posts_path, config.businesses_path, reference,
                                    config.window_days);
    detail::ensure_dir(config.out_dir);
    detail::write_kde_outputs(config, ds);
    detail::write_text_file(detail::join_path(config.out_dir, "config.json"),
                            config_echo(config, reference).dump(2) + "\n");
  });
}

inline int run_bn(const RunConfig& config) {
  return detail::guarded([&] {
    const CivilDate reference = detail::resolve_reference_date(config);
    const Dataset ds = load_dataset(config.posts_path, config.businesses_path, reference,
                                    config.window_days);
    detail::ensure_dir(config.out_dir);
    detail::write_bn_outputs(config, ds);
    detail::write_text_file(detail::join_path(config.out_dir, "config.json"),
                            config_echo(config, reference).dump(2) + "\n");
  });
}

inline int run_synth(const RunConfig& config) {
  return detail::guarded([&] {
    const SynthSpec spec = parse_synth_spec(detail::read_file(config.synth_spec_path));
    const SynthOutput out = generate(spec);
    detail::ensure_dir(config.out_dir);
    detail::write_text_file(detail::join_path(config.out_dir, "businesses.csv"),
                            out.businesses_csv);
    detail::write_text_file(detail::join_path(config.out_dir, "posts.csv"), out.posts_csv);
    detail::write_text_file(detail::join_path(config.out_dir, "manifest.json"),
                            out.manifest_json);
    nlohmann::json echo;
    echo["command"] = "synth";
    echo["spec"] = config.synth_spec_path;
    echo["out"] = config.out_dir;
    detail::write_text_file(detail::join_path(config.out_dir, "config.json"),
                            echo.dump(2) + "\n");
    std::cout << "generated " << spec.n_businesses << " businesses and "
              << (std::count(out.posts_csv.begin(), out.posts_csv.end(), '\n') - 1)
              << " posts\n";
  });
}

inline int run_report(const RunConfig& config) {
  return detail::guarded([&] {
    const CivilDate reference = detail::resolve_reference_date(config);
    const Dataset ds = load_dataset(config.posts_path, config.businesses_path, reference,
                                    config.window_days);
    detail::ensure_dir(config.out_dir);
    detail::write_ingest_outputs(config, ds);
    detail::write_kde_outputs(config, ds);
    detail::write_bn_outputs(config, ds);
    detail::write_text_file(detail::join_path(config.out_dir, "config.json"),
                            config_echo(config, reference).dump(2) + "\n");
  });
}

}  // namespace foodmap
