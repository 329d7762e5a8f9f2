// End-to-end checks for the properties the library promises. Each test prints
// one verdict line so a log scan shows the whole slate at a glance.
#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "foodmap/foodmap.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

using namespace foodmap;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

void verdict(int number, const std::string& name, bool ok, double seconds) {
  char line[160];
  std::snprintf(line, sizeof(line), "[%s] criterion %d: %s (%.2f s)",
                ok ? "PASS" : "FAIL", number, name.c_str(), seconds);
  std::cout << line << std::endl;
}

std::vector<PlanarPoint> gaussian_cloud(PortableRng& rng, double cx, double cy,
                                        double sigma, int n) {
  std::vector<PlanarPoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    pts.push_back({cx + rng.normal(0.0, sigma), cy + rng.normal(0.0, sigma)});
  return pts;
}

std::vector<oracle::Pt> to_oracle(const std::vector<PlanarPoint>& pts) {
  std::vector<oracle::Pt> out;
  out.reserve(pts.size());
  for (const PlanarPoint& p : pts) out.push_back({p.x, p.y});
  return out;
}

std::vector<std::vector<double>> rows_of(const CountTable& t) {
  std::vector<std::vector<double>> rows(t.n_rows, std::vector<double>(t.n_cols));
  for (std::size_t r = 0; r < t.n_rows; ++r)
    for (std::size_t c = 0; c < t.n_cols; ++c) rows[r][c] = t.at(r, c);
  return rows;
}

// Three count-like variables with a strongly expressed chain v0 -> v1 -> v2.
CountTable sample3(std::uint64_t seed) {
  PortableRng rng(seed);
  CountTable t = CountTable::zeros(TimeSlot::Lunch, 500, {"v0", "v1", "v2"});
  for (std::size_t r = 0; r < 500; ++r) {
    const double a = std::max(0.0, std::round(rng.normal(30.0, 5.0)));
    const double b = std::max(0.0, std::round(0.9 * a + rng.normal(5.0, 2.0)));
    const double c = std::max(0.0, std::round(0.7 * b + rng.normal(3.0, 2.0)));
    t.at(r, 0) = a;
    t.at(r, 1) = b;
    t.at(r, 2) = c;
  }
  return t;
}

const char* kAcceptanceFixtureSpec = R"({
  "seed": 77,
  "reference_date": "2012-10-31",
  "n_days": 125,
  "n_businesses": 6,
  "utc_offset_minutes": -240,
  "clusters": [
    {
      "latitude": 40.7548,
      "longitude": -73.9918,
      "sigma_m": 150,
      "posts_per_day_per_slot": 4.0,
      "category_mix": [0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125]
    },
    {
      "latitude": 40.7727864,
      "longitude": -73.9918,
      "sigma_m": 150,
      "posts_per_day_per_slot": 4.0,
      "category_mix": [0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125]
    }
  ]
})";

}  // namespace

TEST_CASE("criterion 1") {
  Stopwatch timer;
  const double k0 = gaussian_kernel_1d(0.0);
  const bool k0_ok = std::abs(k0 - 0.3989422804) < 1e-10;

  bool mass_ok = true;
  for (double h : {25.0, 150.0}) {
    const double mass = oracle::kernel_mass_2d(h, 800);
    mass_ok = mass_ok && std::abs(mass - 1.0) < 1e-6;
  }
  const double elapsed = timer.seconds();
  const bool ok = k0_ok && mass_ok && elapsed < 1.0;
  verdict(1, "kernel analytics", ok, elapsed);
  REQUIRE(ok);
}

TEST_CASE("criterion 2") {
  Stopwatch timer;
  PortableRng rng(20121031);
  bool all_match = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(200));
    std::vector<PlanarPoint> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back({rng.uniform(-800.0, 800.0), rng.uniform(-800.0, 800.0)});
    const double h = 5.0 * std::pow(100.0, rng.uniform());
    const PlanarPoint q{rng.uniform(-900.0, 900.0), rng.uniform(-900.0, 900.0)};
    const double got = kde_at(pts, Bandwidth{h}, q);
    const double want = oracle::kde_product(to_oracle(pts), h, {q.x, q.y});
    if (std::abs(got - want) > 1e-12 * std::max(std::abs(want), 1e-300))
      all_match = false;
  }
  verdict(2, "density matches the naive oracle", all_match, timer.seconds());
  REQUIRE(all_match);
}

TEST_CASE("criterion 3") {
  Stopwatch timer;
  PortableRng rng(1234);
  const auto pts = gaussian_cloud(rng, 0.0, 0.0, 150.0, 500);
  const auto grid = log_spaced_grid(10.0, 2000.0, 32);
  const BandwidthSelection sel = select_bandwidth(pts, grid);

  const double target = 150.0 * std::pow(500.0, -1.0 / 6.0);
  const bool in_range =
      sel.chosen.meters >= target / 2.0 && sel.chosen.meters <= 2.0 * target;
  const double elapsed = timer.seconds();
  const bool ok = in_range && !sel.clamped && elapsed < 30.0;
  verdict(3, "bandwidth selection sanity", ok, elapsed);
  INFO("chosen " << sel.chosen.meters << " m, target " << target << " m");
  REQUIRE(ok);
}

TEST_CASE("criterion 4") {
  Stopwatch timer;
  const SynthSpec spec = parse_synth_spec(std::string(kAcceptanceFixtureSpec));
  const SynthOutput out = generate(spec);

  const auto dir = testutil::scratch_dir("acceptance_hotspots");
  testutil::write_file(dir / "posts.csv", out.posts_csv);
  testutil::write_file(dir / "businesses.csv", out.businesses_csv);
  const Dataset ds = load_dataset((dir / "posts.csv").string(),
                                  (dir / "businesses.csv").string(),
                                  spec.reference_date);

  std::vector<LatLon> anchor;
  for (const PostRecord& p : ds.posts) anchor.push_back({p.latitude, p.longitude});
  const LocalFrame frame = make_frame(anchor);
  const PlanarPoint south = project(frame, {40.7548, -73.9918});
  const PlanarPoint north = project(frame, {40.7727864, -73.9918});

  const auto strata = stratify(ds);
  bool ok = true;
  for (TimeSlot slot : named_slots()) {
    std::vector<PlanarPoint> points;
    std::vector<std::uint64_t> seeds;
    for (const PostRecord& p : strata.at(slot)) {
      points.push_back(project(frame, p.latitude, p.longitude));
      seeds.push_back(jitter_seed(p.id, 0));
    }
    const auto grid = log_spaced_grid(10.0, 2000.0, 32);
    const BandwidthSelection sel = select_bandwidth(points, grid, seeds);
    const DensityField field =
        rasterize(points, sel.chosen, frame, sel.chosen.meters / 4.0);
    const std::vector<HotSpot> spots = extract_hotspots(field, 0.95);

    if (spots.size() != 2) {
      ok = false;
      continue;
    }
    double to_south = 1e18, to_north = 1e18;
    for (const HotSpot& s : spots) {
      to_south = std::min(to_south,
                          std::hypot(s.centroid.x - south.x, s.centroid.y - south.y));
      to_north = std::min(to_north,
                          std::hypot(s.centroid.x - north.x, s.centroid.y - north.y));
    }
    ok = ok && to_south <= sel.chosen.meters && to_north <= sel.chosen.meters;
  }
  const double elapsed = timer.seconds();
  ok = ok && elapsed < 60.0;
  verdict(4, "hot-spot recovery per slot", ok, elapsed);
  REQUIRE(ok);
}

TEST_CASE("criterion 5") {
  Stopwatch timer;
  PortableRng rng(555);
  int checked = 0;
  bool all_match = true;
  while (checked < 100) {
    CountTable t = CountTable::zeros(TimeSlot::Lunch, 40, {"a", "b", "c", "d", "e"});
    for (std::size_t r = 0; r < t.n_rows; ++r)
      for (std::size_t c = 0; c < t.n_cols; ++c)
        t.at(r, c) = std::floor(rng.uniform(0.0, 40.0));

    Dag d(5);
    for (int tries = 0; tries < 6; ++tries) {
      const auto p = rng.index(5);
      const auto c = rng.index(5);
      if (d.can_add(p, c)) d.add_edge(p, c);
    }

    // Collect every legal single move, then test one at random.
    struct Candidate {
      MoveKind kind;
      std::size_t parent, child;
    };
    std::vector<Candidate> moves;
    for (std::size_t p = 0; p < 5; ++p)
      for (std::size_t c = 0; c < 5; ++c) {
        if (d.can_add(p, c)) moves.push_back({MoveKind::Add, p, c});
        if (d.has_edge(p, c)) moves.push_back({MoveKind::Remove, p, c});
        if (d.can_reverse(p, c)) moves.push_back({MoveKind::Reverse, p, c});
      }
    if (moves.empty()) continue;
    const Candidate m = moves[rng.index(moves.size())];

    double family_delta = 0.0;
    Dag after = d;
    const std::uint32_t cmask = d.parent_mask(m.child);
    switch (m.kind) {
      case MoveKind::Add:
        family_delta = family_bic(t, static_cast<int>(m.child),
                                  cmask | (1u << m.parent)).score -
                       family_bic(t, static_cast<int>(m.child), cmask).score;
        after.add_edge(m.parent, m.child);
        break;
      case MoveKind::Remove:
        family_delta = family_bic(t, static_cast<int>(m.child),
                                  cmask & ~(1u << m.parent)).score -
                       family_bic(t, static_cast<int>(m.child), cmask).score;
        after.remove_edge(m.parent, m.child);
        break;
      case MoveKind::Reverse: {
        const std::uint32_t pmask = d.parent_mask(m.parent);
        family_delta = family_bic(t, static_cast<int>(m.child),
                                  cmask & ~(1u << m.parent)).score -
                       family_bic(t, static_cast<int>(m.child), cmask).score +
                       family_bic(t, static_cast<int>(m.parent),
                                  pmask | (1u << m.child)).score -
                       family_bic(t, static_cast<int>(m.parent), pmask).score;
        after.reverse_edge(m.parent, m.child);
        break;
      }
    }
    const double full_delta = bic_score(t, after).total_bic - bic_score(t, d).total_bic;
    if (std::abs(family_delta - full_delta) > 1e-9) all_match = false;
    ++checked;
  }
  verdict(5, "score decomposability over 100 moves", all_match, timer.seconds());
  REQUIRE(all_match);
}

TEST_CASE("criterion 6") {
  Stopwatch timer;
  bool all_optimal = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CountTable t = sample3(seed);
    const SearchTrace trace = hill_climb(t, Dag(3));
    const double best = oracle::best_score3(rows_of(t));
    if (!trace.converged ||
        std::abs(trace.final_score - best) > 1e-9 * std::max(1.0, std::abs(best)))
      all_optimal = false;
  }
  const double elapsed = timer.seconds();
  const bool ok = all_optimal && elapsed < 60.0;
  verdict(6, "exhaustive optimum on 20 seeded tables", ok, elapsed);
  REQUIRE(ok);
}

TEST_CASE("criterion 7") {
  Stopwatch timer;
  // Signal-to-noise 3 on every link; count magnitudes keep rounding noise
  // well below noise_sigma, and the sample size sits in the regime where
  // the BIC penalty reliably rejects spurious parents.
  PlantedDag planted;
  planted.base_mean = 500.0;
  planted.root_sigma = 30.0;
  planted.noise_sigma = 10.0;
  for (int j = 0; j + 1 < static_cast<int>(kNumCategories); ++j) {
    planted.graph.add_edge(j, j + 1);
    planted.edges.push_back({j, j + 1, 1.0});
  }
  const auto want = skeleton(planted.graph);

  const int n_rows = 30000;
  int recovered = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    PortableRng rng(seed);
    const SlotSample sample = sample_dag_counts(planted, n_rows, rng);
    CountTable t = CountTable::zeros(TimeSlot::Lunch, n_rows, category_labels());
    for (std::size_t i = 0; i < sample.counts.size(); ++i)
      t.values[i] = static_cast<double>(sample.counts[i]);
    const SearchTrace trace = hill_climb(t, Dag(kNumCategories));
    if (trace.converged && skeleton(trace.final_graph) == want) ++recovered;
  }
  const double elapsed = timer.seconds();
  const bool ok = recovered >= 18 && elapsed < 300.0;
  std::cout << "  chain skeleton recovered in " << recovered << "/20 runs\n";
  verdict(7, "planted chain recovery", ok, elapsed);
  REQUIRE(ok);
}

TEST_CASE("criterion 8") {
  Stopwatch timer;
  const auto dir = testutil::scratch_dir("acceptance_determinism");
  const auto data_dir = dir / "data";
  const auto out_dir = dir / "report";

  bool ok = testutil::run_cli("synth --spec " + std::string(FOODMAP_FIXTURE_SPEC) +
                                  " --out " + data_dir.string(),
                              dir)
                .exit_code == 0;

  const std::string cmd = "report --posts " + (data_dir / "posts.csv").string() +
                          " --businesses " + (data_dir / "businesses.csv").string() +
                          " --reference-date 2012-10-31 --out " + out_dir.string();
  std::map<std::string, std::string> first, second;
  if (ok) {
    ok = testutil::run_cli(cmd, dir).exit_code == 0;
    if (ok) first = testutil::slurp_tree(out_dir);
  }
  if (ok) {
    ok = testutil::run_cli(cmd, dir).exit_code == 0;
    if (ok) second = testutil::slurp_tree(out_dir);
  }
  ok = ok && !first.empty() && first == second;
  verdict(8, "pipeline determinism", ok, timer.seconds());
  REQUIRE(ok);
}

TEST_CASE("criterion 9") {
  Stopwatch timer;
  const auto dir = testutil::scratch_dir("acceptance_summary");
  const auto data_dir = dir / "data";
  const auto out_dir = dir / "report";

  bool ok = testutil::run_cli("synth --spec " + std::string(FOODMAP_FIXTURE_SPEC) +
                                  " --out " + data_dir.string(),
                              dir)
                .exit_code == 0;
  if (ok)
    ok = testutil::run_cli(
             "report --posts " + (data_dir / "posts.csv").string() +
                 " --businesses " + (data_dir / "businesses.csv").string() +
                 " --reference-date 2012-10-31 --out " + out_dir.string(),
             dir)
             .exit_code == 0;

  std::vector<std::string> lines;
  if (ok) {
    std::istringstream in(testutil::read_file(out_dir / "summary.tsv"));
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }

  ok = ok && lines.size() == 4 && lines[0] == "slot\tbandwidth_m\thotspots";
  const char* want_slots[3] = {"breakfast", "lunch", "dinner"};
  for (std::size_t r = 1; ok && r < 4; ++r) {
    const auto first_tab = lines[r].find('\t');
    const auto second_tab = lines[r].find('\t', first_tab + 1);
    ok = first_tab != std::string::npos && second_tab != std::string::npos;
    if (!ok) break;
    const std::string slot = lines[r].substr(0, first_tab);
    const std::string bw = lines[r].substr(first_tab + 1, second_tab - first_tab - 1);
    const std::string spots = lines[r].substr(second_tab + 1);
    ok = slot == want_slots[r - 1];
    try {
      ok = ok && std::stod(bw) > 0.0;
    } catch (...) {
      ok = false;
    }
    ok = ok && spots.rfind("HS1(", 0) == 0;
  }
  verdict(9, "summary table shape", ok, timer.seconds());
  REQUIRE(ok);
}
