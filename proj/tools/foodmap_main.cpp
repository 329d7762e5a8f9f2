#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "foodmap/pipeline.hpp"

namespace {

struct GridOption {
  std::string raw;
};

// --bandwidth-grid MIN:MAX:COUNT
bool parse_grid(const std::string& raw, foodmap::GridSpec& grid) {
  double min_m = 0, max_m = 0;
  int count = 0;
  char tail = 0;
  if (std::sscanf(raw.c_str(), "%lf:%lf:%d%c", &min_m, &max_m, &count, &tail) != 3)
    return false;
  if (!(min_m > 0) || !(max_m > min_m) || count < 2) return false;
  grid.min_m = min_m;
  grid.max_m = max_m;
  grid.count = count;
  return true;
}

void add_dataset_options(CLI::App* cmd, foodmap::RunConfig& config) {
  cmd->add_option("--posts", config.posts_path, "posts CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--businesses", config.businesses_path, "businesses CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--reference-date", config.reference_date,
                  "end of the 1-year analysis window, YYYY-MM-DD (default: latest post)");
  cmd->add_option("--out", config.out_dir, "output directory")->required();
}

void add_slot_option(CLI::App* cmd, foodmap::RunConfig& config) {
  cmd->add_option("--slot", config.slot, "breakfast, lunch, dinner or all")
      ->default_val("all");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial and structural analysis of geo-tagged food posts"};
  app.require_subcommand(1);

  foodmap::RunConfig config;
  std::string grid_raw;

  CLI::App* ingest = app.add_subcommand(
      "ingest", "Load, window and cap the dataset; write the normalized copy");
  add_dataset_options(ingest, config);

  CLI::App* kde = app.add_subcommand(
      "kde", "Per-slot density rasters, hot spots and the bandwidth summary");
  add_dataset_options(kde, config);
  add_slot_option(kde, config);
  kde->add_option("--category", config.category,
                  "all (pooled), each, or one category name")
      ->default_val("all");
  kde->add_option("--bandwidth", config.bandwidth_m, "fixed bandwidth in meters");
  kde->add_option("--bandwidth-grid", grid_raw,
                  "candidate grid MIN:MAX:COUNT in meters (default 10:2000:32)");
  kde->add_option("--cell-size", config.cell_size_m,
                  "raster cell size in meters (default: bandwidth / 4)");
  kde->add_option("--hotspot-quantile", config.hotspot_quantile,
                  "density quantile defining hot spots")
      ->default_val(0.95);
  kde->add_option("--seed", config.seed, "jitter seed")->default_val(0);

  CLI::App* bn = app.add_subcommand(
      "bn", "Per-slot Bayesian network structure over category counts");
  add_dataset_options(bn, config);
  add_slot_option(bn, config);
  bn->add_option("--bn-init", config.bn_init, "starting graph: empty or full")
      ->default_val("empty");
  bn->add_option("--bn-max-iterations", config.bn_max_iterations,
                 "hill climbing move budget")
      ->default_val(200);

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic dataset with a ground-truth manifest");
  synth->add_option("--spec", config.synth_spec_path, "synth spec JSON")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--out", config.out_dir, "output directory")->required();

  CLI::App* report = app.add_subcommand(
      "report", "Full pipeline: ingest, density maps, hot spots and DAGs");
  add_dataset_options(report, config);
  add_slot_option(report, config);
  report->add_option("--category", config.category,
                     "all (pooled), each, or one category name")
      ->default_val("all");
  report->add_option("--bandwidth", config.bandwidth_m, "fixed bandwidth in meters");
  report->add_option("--bandwidth-grid", grid_raw,
                     "candidate grid MIN:MAX:COUNT in meters (default 10:2000:32)");
  report->add_option("--cell-size", config.cell_size_m,
                     "raster cell size in meters (default: bandwidth / 4)");
  report->add_option("--hotspot-quantile", config.hotspot_quantile,
                     "density quantile defining hot spots")
      ->default_val(0.95);
  report->add_option("--bn-init", config.bn_init, "starting graph: empty or full")
      ->default_val("empty");
  report->add_option("--bn-max-iterations", config.bn_max_iterations,
                     "hill climbing move budget")
      ->default_val(200);
  report->add_option("--seed", config.seed, "jitter seed")->default_val(0);

  CLI11_PARSE(app, argc, argv);

  if (!grid_raw.empty() && !parse_grid(grid_raw, config.grid)) {
    std::fprintf(stderr, "error: --bandwidth-grid expects MIN:MAX:COUNT with 0 < MIN < MAX and COUNT >= 2\n");
    return 2;
  }

  if (ingest->parsed()) {
    config.command = "ingest";
    return foodmap::run_ingest(config);
  }
  if (kde->parsed()) {
    config.command = "kde";
    return foodmap::run_kde(config);
  }
  if (bn->parsed()) {
    config.command = "bn";
    return foodmap::run_bn(config);
  }
  if (synth->parsed()) {
    config.command = "synth";
    return foodmap::run_synth(config);
  }
  if (report->parsed()) {
    config.command = "report";
    return foodmap::run_report(config);
  }
  return 2;
}
