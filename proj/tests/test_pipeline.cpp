#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "foodmap/categories.hpp"
#include "foodmap/geo.hpp"

#include "helpers.hpp"

using nlohmann::json;
using testutil::run_cli;
using testutil::scratch_dir;

namespace {

constexpr const char* kTwoClusterSpec = R"({
  "seed": 42,
  "reference_date": "2012-10-31",
  "n_days": 30,
  "n_businesses": 6,
  "utc_offset_minutes": -240,
  "clusters": [
    {
      "latitude": 40.7638,
      "longitude": -73.9918,
      "sigma_m": 120,
      "posts_per_day_per_slot": 4.0,
      "category_mix": [0.25, 0.25, 0.0, 0.125, 0.125, 0.1, 0.1, 0.05]
    },
    {
      "latitude": 40.7265,
      "longitude": -73.9815,
      "sigma_m": 90,
      "posts_per_day_per_slot": 2.0,
      "category_mix": {"pizza": 0.5, "bagels": 0.5}
    }
  ]
})";

struct Fixture {
  std::filesystem::path dir;
  std::filesystem::path posts;
  std::filesystem::path businesses;
  json manifest;
};

Fixture make_fixture(const std::string& name, const std::string& spec_text) {
  Fixture fx;
  fx.dir = scratch_dir(name);
  const auto spec_path = fx.dir / "spec.json";
  testutil::write_file(spec_path, spec_text);
  const auto data_dir = fx.dir / "data";
  const auto res = run_cli("synth --spec " + spec_path.string() + " --out " +
                               data_dir.string(),
                           fx.dir);
  if (res.exit_code != 0)
    throw std::runtime_error("fixture synth failed: " + res.err);
  fx.posts = data_dir / "posts.csv";
  fx.businesses = data_dir / "businesses.csv";
  fx.manifest = json::parse(testutil::read_file(data_dir / "manifest.json"));
  return fx;
}

std::string dataset_args(const Fixture& fx) {
  return " --posts " + fx.posts.string() + " --businesses " +
         fx.businesses.string() + " --reference-date 2012-10-31 ";
}

std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(testutil::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

struct AscGrid {
  int ncols = 0, nrows = 0;
  double xll = 0, yll = 0, cell = 0;
  std::vector<double> values;  // row-major, top row first
};

AscGrid read_asc(const std::filesystem::path& path) {
  std::istringstream in(testutil::read_file(path));
  AscGrid g;
  std::string key;
  double nodata = 0;
  in >> key >> g.ncols >> key >> g.nrows >> key >> g.xll >> key >> g.yll >>
      key >> g.cell >> key >> nodata;
  g.values.assign(static_cast<std::size_t>(g.ncols) * g.nrows, 0.0);
  for (double& v : g.values) in >> v;
  return g;
}

}  // namespace

TEST_CASE("synth writes a complete data directory") {
  const Fixture fx = make_fixture("cli_synth", kTwoClusterSpec);
  CHECK(std::filesystem::exists(fx.dir / "data" / "config.json"));
  CHECK(std::filesystem::exists(fx.dir / "data" / "manifest.json"));

  const std::string posts_csv = testutil::read_file(fx.posts);
  const auto n_posts = fx.manifest.at("totals").at("posts").get<std::size_t>();
  CHECK(static_cast<std::size_t>(std::count(posts_csv.begin(), posts_csv.end(), '\n')) ==
        n_posts + 1);
  CHECK(posts_csv.rfind("id,business_id,timestamp,latitude,longitude,category", 0) == 0);

  const json config = json::parse(testutil::read_file(fx.dir / "data" / "config.json"));
  CHECK(config.at("command") == "synth");
  CHECK(config.at("spec").get<std::string>().find("spec.json") != std::string::npos);
  CHECK(fx.manifest.at("seed") == 42);
  CHECK(fx.manifest.at("generator") == "mt19937_64-v1");
}

TEST_CASE("ingest reports the same counts the generator wrote") {
  const Fixture fx = make_fixture("cli_ingest", kTwoClusterSpec);
  const auto out_dir = fx.dir / "ingested";
  const auto res = run_cli("ingest" + dataset_args(fx) + "--out " + out_dir.string(),
                           fx.dir);
  REQUIRE(res.exit_code == 0);

  const json meta = json::parse(testutil::read_file(out_dir / "dataset_meta.json"));
  CHECK(meta.at("n_posts") == fx.manifest.at("totals").at("posts"));
  CHECK(meta.at("window_start") == "2011-11-02");
  CHECK(meta.at("by_slot").at("unassigned") == 0);
  for (const char* slot : {"breakfast", "lunch", "dinner"})
    CHECK(meta.at("by_slot").at(slot) == fx.manifest.at("slots").at(slot).at("total"));
  for (const auto& [name, count] : fx.manifest.at("totals").at("by_category").items())
    CHECK(meta.at("by_category").at(name) == count);

  const std::string posts_out = testutil::read_file(out_dir / "dataset_posts.csv");
  CHECK(static_cast<std::size_t>(std::count(posts_out.begin(), posts_out.end(), '\n')) ==
        meta.at("n_posts").get<std::size_t>() + 1);
  CHECK(std::filesystem::exists(out_dir / "dataset_businesses.csv"));
  CHECK(res.out.find("posts") != std::string::npos);
}

TEST_CASE("a malformed posts row fails with a pointed message") {
  const auto dir = scratch_dir("cli_badrow");
  testutil::write_file(dir / "businesses.csv",
                       "id,name,latitude,longitude,categories,rating\n"
                       "b1,Sample,40.76,-73.99,ramen,4.0\n");
  testutil::write_file(dir / "posts.csv",
                       "id,business_id,timestamp,latitude,longitude,category\n"
                       "p1,b1,2012-10-30 12:00:00-04:00,40.76,-73.99,ramen\n"
                       "p2,b1,not-a-time,40.76,-73.99,ramen\n");
  const auto res = run_cli("ingest --posts " + (dir / "posts.csv").string() +
                               " --businesses " + (dir / "businesses.csv").string() +
                               " --reference-date 2012-10-31 --out " +
                               (dir / "out").string(),
                           dir);
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("row 3") != std::string::npos);
}

TEST_CASE("an empty posts file ingests only with an explicit date") {
  const auto dir = scratch_dir("cli_emptyposts");
  testutil::write_file(dir / "businesses.csv",
                       "id,name,latitude,longitude,categories,rating\n"
                       "b1,Sample,40.76,-73.99,ramen,4.0\n");
  testutil::write_file(dir / "posts.csv",
                       "id,business_id,timestamp,latitude,longitude,category\n");

  const std::string base = "ingest --posts " + (dir / "posts.csv").string() +
                           " --businesses " + (dir / "businesses.csv").string();
  const auto with_date = run_cli(
      base + " --reference-date 2012-10-31 --out " + (dir / "out").string(), dir);
  REQUIRE(with_date.exit_code == 0);
  const json meta = json::parse(testutil::read_file(dir / "out" / "dataset_meta.json"));
  CHECK(meta.at("n_posts") == 0);
  CHECK(meta.at("n_businesses") == 0);

  const auto without_date =
      run_cli(base + " --out " + (dir / "out2").string(), dir);
  CHECK(without_date.exit_code == 2);
  CHECK(without_date.err.find("--reference-date") != std::string::npos);
}

TEST_CASE("a fixed-bandwidth map peaks at the planted cluster") {
  const Fixture fx = make_fixture("cli_kde_fixed", kTwoClusterSpec);
  const auto out_dir = fx.dir / "kde";
  const auto res = run_cli("kde" + dataset_args(fx) +
                               "--slot lunch --bandwidth 134 --out " + out_dir.string(),
                           fx.dir);
  REQUIRE(res.exit_code == 0);

  const AscGrid grid = read_asc(out_dir / "kde_lunch.asc");
  REQUIRE(grid.ncols > 0);
  const json meta = json::parse(testutil::read_file(out_dir / "kde_lunch.meta.json"));
  CHECK(meta.at("bandwidth_m") == 134.0);
  CHECK(meta.at("ncols") == grid.ncols);

  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.values.size(); ++i)
    if (grid.values[i] > grid.values[best]) best = i;
  const int row_top = static_cast<int>(best) / grid.ncols;  // top row first
  const int ix = static_cast<int>(best) % grid.ncols;
  const int iy = grid.nrows - 1 - row_top;
  const double px = grid.xll + (ix + 0.5) * grid.cell;
  const double py = grid.yll + (iy + 0.5) * grid.cell;

  const foodmap::LocalFrame frame{
      meta.at("origin_latitude").get<double>(),
      meta.at("origin_longitude").get<double>(), foodmap::kMetersPerDegreeLat,
      foodmap::kMetersPerDegreeLat *
          std::cos(meta.at("origin_latitude").get<double>() *
                   std::numbers::pi / 180.0)};
  // The denser planted cluster sits at (40.7638, -73.9918).
  const foodmap::PlanarPoint center = foodmap::project(frame, {40.7638, -73.9918});
  CHECK(std::hypot(px - center.x, py - center.y) < 134.0);

  const json spots = json::parse(testutil::read_file(out_dir / "hotspots_lunch.geojson"));
  CHECK(spots.at("type") == "FeatureCollection");
  CHECK(spots.at("features").size() >= 1);
  CHECK(spots.at("features")[0].at("properties").at("rank") == 1);
}

TEST_CASE("the summary table carries one row per requested slice") {
  const Fixture fx = make_fixture("cli_summary", kTwoClusterSpec);

  const auto all_dir = fx.dir / "all";
  REQUIRE(run_cli("kde" + dataset_args(fx) + "--out " + all_dir.string(), fx.dir)
              .exit_code == 0);
  const auto all_rows = read_tsv(all_dir / "summary.tsv");
  REQUIRE(all_rows.size() == 4);
  CHECK(all_rows[0] == std::vector<std::string>{"slot", "bandwidth_m", "hotspots"});
  CHECK(all_rows[1][0] == "breakfast");
  CHECK(all_rows[2][0] == "lunch");
  CHECK(all_rows[3][0] == "dinner");
  for (std::size_t r = 1; r < 4; ++r) {
    CHECK(std::stod(all_rows[r][1]) > 0.0);
    CHECK(all_rows[r][2].rfind("HS1(", 0) == 0);
  }

  const auto one_dir = fx.dir / "one";
  REQUIRE(run_cli("kde" + dataset_args(fx) + "--slot breakfast --out " +
                      one_dir.string(),
                  fx.dir)
              .exit_code == 0);
  const auto one_rows = read_tsv(one_dir / "summary.tsv");
  REQUIRE(one_rows.size() == 2);
  CHECK(one_rows[1][0] == "breakfast");
  CHECK(std::filesystem::exists(one_dir / "kde_breakfast.asc"));
  CHECK_FALSE(std::filesystem::exists(one_dir / "kde_lunch.asc"));
}

TEST_CASE("per-category maps add a category column") {
  const std::string spec = R"({
    "seed": 9,
    "reference_date": "2012-10-31",
    "n_days": 60,
    "n_businesses": 4,
    "utc_offset_minutes": -240,
    "clusters": [
      {
        "latitude": 40.7638,
        "longitude": -73.9918,
        "sigma_m": 120,
        "posts_per_day_per_slot": 6.0,
        "category_mix": [0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125]
      }
    ]
  })";
  const Fixture fx = make_fixture("cli_percat", spec);

  const auto out_dir = fx.dir / "bycat";
  const auto res = run_cli("kde" + dataset_args(fx) +
                               "--slot lunch --category each --out " +
                               out_dir.string(),
                           fx.dir);
  REQUIRE(res.exit_code == 0);
  const auto rows = read_tsv(out_dir / "summary.tsv");
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == std::vector<std::string>{"slot", "category", "bandwidth_m", "hotspots"});
  for (std::size_t c = 0; c < foodmap::kNumCategories; ++c) {
    CHECK(rows[c + 1][0] == "lunch");
    CHECK(rows[c + 1][1] ==
          std::string(foodmap::canonical_name(foodmap::all_categories()[c])));
  }
  CHECK(std::filesystem::exists(out_dir / "kde_lunch_ramen.asc"));
  CHECK(std::filesystem::exists(out_dir / "hotspots_lunch_pizza.geojson"));

  const auto single = fx.dir / "single";
  REQUIRE(run_cli("kde" + dataset_args(fx) +
                      "--slot lunch --category pizza --out " + single.string(),
                  fx.dir)
              .exit_code == 0);
  const auto srows = read_tsv(single / "summary.tsv");
  REQUIRE(srows.size() == 2);
  CHECK(srows[1][1] == "pizza");
}

TEST_CASE("thin slices fail as infeasible, not as usage errors") {
  const auto dir = scratch_dir("cli_thin");
  testutil::write_file(dir / "businesses.csv",
                       "id,name,latitude,longitude,categories,rating\n"
                       "b1,Sample,40.76,-73.99,ramen,4.0\n");
  std::string posts = "id,business_id,timestamp,latitude,longitude,category\n";
  for (int i = 0; i < 5; ++i)
    posts += "p" + std::to_string(i) + ",b1,2012-10-3" + std::to_string(i % 2) +
             " 08:0" + std::to_string(i) + ":00-04:00,40.76,-73.99,ramen\n";
  testutil::write_file(dir / "posts.csv", posts);

  const std::string base = "kde --posts " + (dir / "posts.csv").string() +
                           " --businesses " + (dir / "businesses.csv").string() +
                           " --reference-date 2012-10-31";
  const auto res =
      run_cli(base + " --slot breakfast --out " + (dir / "out").string(), dir);
  CHECK(res.exit_code == 1);
  CHECK(res.err.find("error:") != std::string::npos);

  const auto bad_slot =
      run_cli(base + " --slot brunch --out " + (dir / "out2").string(), dir);
  CHECK(bad_slot.exit_code == 2);

  const auto bad_cell = run_cli(base + " --slot breakfast --bandwidth 100 " +
                                    "--cell-size 80 --out " + (dir / "out3").string(),
                                dir);
  CHECK(bad_cell.exit_code == 2);
}

TEST_CASE("bn finds every planted chain link through the full pipeline") {
  // One year of counts at this magnitude is enough to detect every planted
  // link but not enough for the BIC penalty to reject every spurious parent,
  // so this asserts containment; exact skeleton recovery is exercised at the
  // library level on larger samples.
  const std::string spec = R"({
    "seed": 4242,
    "reference_date": "2012-10-31",
    "n_days": 365,
    "n_businesses": 300,
    "utc_offset_minutes": -240,
    "clusters": [
      {
        "latitude": 40.7638,
        "longitude": -73.9918,
        "sigma_m": 150,
        "posts_per_day_per_slot": 1.0,
        "category_mix": [0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125]
      }
    ],
    "planted_dag": {
      "base_mean": 10.0,
      "root_sigma": 3.0,
      "noise_sigma": 1.0,
      "edges": [
        {"parent": "ramen", "child": "sushi", "weight": 1.0},
        {"parent": "sushi", "child": "waffles", "weight": 1.0},
        {"parent": "waffles", "child": "burgers", "weight": 1.0},
        {"parent": "burgers", "child": "hot_wings", "weight": 1.0},
        {"parent": "hot_wings", "child": "nachos", "weight": 1.0},
        {"parent": "nachos", "child": "bagels", "weight": 1.0},
        {"parent": "bagels", "child": "pizza", "weight": 1.0}
      ]
    }
  })";
  const Fixture fx = make_fixture("cli_bn_chain", spec);

  const auto out_dir = fx.dir / "bn";
  const auto res = run_cli("bn" + dataset_args(fx) + "--slot lunch --out " +
                               out_dir.string(),
                           fx.dir);
  REQUIRE(res.exit_code == 0);

  const json dag = json::parse(testutil::read_file(out_dir / "dag_lunch.json"));
  CHECK(dag.at("converged") == true);
  CHECK(dag.at("slot") == "lunch");

  auto index_of = [](const std::string& name) {
    const auto cat = foodmap::parse_category(name);
    REQUIRE(cat.has_value());
    return category_index(*cat);
  };
  std::vector<std::pair<std::size_t, std::size_t>> learned;
  for (const auto& e : dag.at("edges")) {
    auto a = index_of(e.at("parent").get<std::string>());
    auto b = index_of(e.at("child").get<std::string>());
    if (a > b) std::swap(a, b);
    learned.emplace_back(a, b);
  }
  std::sort(learned.begin(), learned.end());
  std::vector<std::pair<std::size_t, std::size_t>> chain;
  for (std::size_t j = 0; j + 1 < foodmap::kNumCategories; ++j)
    chain.emplace_back(j, j + 1);
  CHECK(std::includes(learned.begin(), learned.end(), chain.begin(), chain.end()));
  CHECK(learned.size() <= chain.size() + 3);

  const std::string counts = testutil::read_file(out_dir / "counts_lunch.csv");
  CHECK(static_cast<std::size_t>(std::count(counts.begin(), counts.end(), '\n')) == 366);
  const std::string dot = testutil::read_file(out_dir / "dag_lunch.dot");
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("Hot Wings") != std::string::npos);
}

TEST_CASE("report produces the combined directory and is rerun-stable") {
  const Fixture fx = make_fixture("cli_report", kTwoClusterSpec);
  const auto out_dir = fx.dir / "report";
  const std::string cmd = "report" + dataset_args(fx) + "--seed 7 --out " +
                          out_dir.string();
  REQUIRE(run_cli(cmd, fx.dir).exit_code == 0);

  for (const char* name :
       {"dataset_posts.csv", "dataset_businesses.csv", "dataset_meta.json",
        "summary.tsv", "kde_breakfast.asc", "kde_lunch.meta.json",
        "hotspots_dinner.geojson", "counts_lunch.csv", "dag_breakfast.json",
        "dag_dinner.dot", "config.json"})
    CHECK(std::filesystem::exists(out_dir / name));

  const auto first = testutil::slurp_tree(out_dir);
  REQUIRE(run_cli(cmd, fx.dir).exit_code == 0);
  const auto second = testutil::slurp_tree(out_dir);
  CHECK(first == second);

  const json config = json::parse(testutil::read_file(out_dir / "config.json"));
  CHECK(config.at("command") == "report");
  CHECK(config.at("seed") == 7);
  CHECK(config.at("reference_date") == "2012-10-31");
}
