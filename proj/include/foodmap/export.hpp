#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foodmap/categories.hpp"
#include "foodmap/dag.hpp"
#include "foodmap/errors.hpp"
#include "foodmap/hill_climb.hpp"
#include "foodmap/hotspot.hpp"
#include "foodmap/raster.hpp"
#include "foodmap/timeslot.hpp"

namespace foodmap {

namespace detail {

inline std::string fmt_double(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace detail

// ESRI ASCII grid. Rows are written north to south; row 0 of the field is
// the southern edge, so iteration runs backwards.
inline std::string to_esri_ascii(const DensityField& field) {
  std::ostringstream out;
  out << "ncols " << field.nx << "\n";
  out << "nrows " << field.ny << "\n";
  out << "xllcorner " << detail::fmt_double("%.6f", field.xll) << "\n";
  out << "yllcorner " << detail::fmt_double("%.6f", field.yll) << "\n";
  out << "cellsize " << detail::fmt_double("%.6f", field.cell_size) << "\n";
  out << "NODATA_value -9999\n";
  for (int iy = field.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < field.nx; ++ix) {
      if (ix) out << ' ';
      out << detail::fmt_double("%.10e", field.at(ix, iy));
    }
    out << "\n";
  }
  return out.str();
}

// Sidecar describing how to read the raster back: which slice it is, the
// bandwidth it was built with, and the geographic anchor of the local frame.
inline std::string field_metadata_json(const DensityField& field) {
  nlohmann::json j;
  j["slot"] = field.slot ? nlohmann::json(slot_name(*field.slot)) : nlohmann::json(nullptr);
  j["category"] =
      field.category ? nlohmann::json(canonical_name(*field.category)) : nlohmann::json(nullptr);
  j["bandwidth_m"] = field.bandwidth.meters;
  j["cell_size_m"] = field.cell_size;
  j["n_points"] = field.n_points;
  j["ncols"] = field.nx;
  j["nrows"] = field.ny;
  j["origin_latitude"] = field.frame.origin_latitude;
  j["origin_longitude"] = field.frame.origin_longitude;
  j["units"] = "density per m^2 in an equirectangular frame centered on the origin";
  return j.dump(2) + "\n";
}

// Hot spots as a GeoJSON FeatureCollection of points at the density-weighted
// centroids, ranked by peak density.
inline std::string hotspots_geojson(const std::vector<HotSpot>& spots,
                                    std::optional<TimeSlot> slot = std::nullopt,
                                    std::optional<FoodCategory> category = std::nullopt) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t i = 0; i < spots.size(); ++i) {
    const HotSpot& h = spots[i];
    nlohmann::json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"},
                     {"coordinates", {h.centroid_geo.longitude, h.centroid_geo.latitude}}};
    nlohmann::json props;
    props["rank"] = i + 1;
    props["peak_density"] = h.peak_density;
    props["mass"] = h.mass;
    props["cells"] = h.member_cells.size();
    if (slot) props["slot"] = slot_name(*slot);
    if (category) props["category"] = canonical_name(*category);
    f["properties"] = props;
    features.push_back(f);
  }
  nlohmann::json j;
  j["type"] = "FeatureCollection";
  j["features"] = features;
  return j.dump(2) + "\n";
}

// Learned structure with its search trace. Edges are written with display
// names in (parent, child) pairs; the trace keeps per-move score deltas.
inline std::string dag_json(const SearchTrace& trace, std::optional<TimeSlot> slot) {
  nlohmann::json j;
  j["slot"] = slot ? nlohmann::json(slot_name(*slot)) : nlohmann::json(nullptr);
  j["score"] = trace.final_score;
  j["initial_score"] = trace.initial_score;
  j["converged"] = trace.converged;
  j["singular_families"] = trace.any_singular;

  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [p, c] : to_edge_list(trace.final_graph)) {
    nlohmann::json e;
    e["parent"] = canonical_name(static_cast<FoodCategory>(p));
    e["child"] = canonical_name(static_cast<FoodCategory>(c));
    edges.push_back(e);
  }
  j["edges"] = edges;

  nlohmann::json steps = nlohmann::json::array();
  for (const TraceEntry& t : trace.iterations) {
    nlohmann::json s;
    s["move"] = move_kind_name(t.move.kind);
    s["parent"] = canonical_name(static_cast<FoodCategory>(t.move.parent));
    s["child"] = canonical_name(static_cast<FoodCategory>(t.move.child));
    s["delta"] = t.score_after - t.score_before;
    s["score"] = t.score_after;
    steps.push_back(s);
  }
  j["trace"] = steps;
  return j.dump(2) + "\n";
}

inline std::string dag_to_dot(const Dag& dag, const std::string& graph_name = "G") {
  std::ostringstream out;
  out << "digraph \"" << graph_name << "\" {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=box, style=rounded];\n";
  for (std::size_t i = 0; i < dag.node_count(); ++i)
    out << "  n" << i << " [label=\"" << display_name(static_cast<FoodCategory>(i))
        << "\"];\n";
  for (const auto& [p, c] : to_edge_list(dag))
    out << "  n" << p << " -> n" << c << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace foodmap
