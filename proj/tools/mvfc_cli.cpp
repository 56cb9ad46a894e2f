// mvfc: command-line driver for fitting, grid experiments, rank statistics
// and synthetic data generation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mvfc/csv.hpp"
#include "mvfc/dataset.hpp"
#include "mvfc/error.hpp"
#include "mvfc/harness.hpp"
#include "mvfc/kernels.hpp"
#include "mvfc/metrics.hpp"
#include "mvfc/stats.hpp"

namespace {

using mvfc::ExperimentConfig;

// Flag values that override the config file when given.
struct Overrides {
  std::string config;
  std::string algorithm;
  std::string name;
  std::vector<std::string> views;
  std::string labels;
  bool header = false;
  bool no_normalize = false;
  std::optional<std::size_t> clusters;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
  std::optional<std::size_t> h_steps;
  std::optional<std::size_t> threads;
  std::string out;
  std::vector<double> fuzzifier;
  std::vector<double> lambda;
  std::vector<double> eta;
  std::vector<std::size_t> rank;
  std::string preset;

  std::optional<std::size_t> synth_samples;
  std::optional<std::size_t> synth_clusters;
  std::optional<std::size_t> synth_rank;
  std::vector<std::size_t> synth_dims;
  std::optional<double> synth_noise;
  std::optional<std::uint64_t> synth_seed;
  bool synthetic = false;
};

void add_synthetic_flags(CLI::App* app, Overrides& o) {
  app->add_option("--synth-samples", o.synth_samples, "synthetic sample count");
  app->add_option("--synth-clusters", o.synth_clusters, "synthetic cluster count");
  app->add_option("--synth-rank", o.synth_rank, "synthetic hidden rank");
  app->add_option("--synth-dims", o.synth_dims, "synthetic view dimensions")->delimiter(',');
  app->add_option("--synth-noise", o.synth_noise, "synthetic Gaussian noise sigma");
  app->add_option("--synth-seed", o.synth_seed, "synthetic generator seed");
}

void add_experiment_flags(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("-a,--algorithm", o.algorithm, "fcm | cofkm | hss | shared_nmf+fcm");
  app->add_option("--name", o.name, "dataset name used in reports");
  app->add_option("--views", o.views, "view CSV files, one row per sample")->delimiter(',');
  app->add_option("--labels", o.labels, "label file, one integer per line");
  app->add_flag("--header", o.header, "view CSVs start with a header row");
  app->add_flag("--no-normalize", o.no_normalize, "skip per-feature min-max scaling");
  app->add_flag("--synthetic", o.synthetic, "use the synthetic generator as the data source");
  add_synthetic_flags(app, o);
  app->add_option("-k,--clusters", o.clusters, "cluster count (default: distinct labels)");
  app->add_option("--seed", o.seed, "base seed");
  app->add_option("--tol", o.tol, "relative objective tolerance");
  app->add_option("--max-iter", o.max_iter, "iteration cap");
  app->add_option("--h-steps", o.h_steps, "inner multiplicative H steps per iteration");
  app->add_option("--fuzzifier", o.fuzzifier, "fuzzifier values")->delimiter(',');
  app->add_option("--lambda", o.lambda, "factorization weight values")->delimiter(',');
  app->add_option("--eta", o.eta, "cooperation (cofkm) or entropy (hss) values")->delimiter(',');
  app->add_option("--rank", o.rank, "hidden rank values")->delimiter(',');
}

ExperimentConfig build_config(const Overrides& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : mvfc::load_config(o.config);
  if (!o.algorithm.empty()) cfg.algorithm = mvfc::parse_algorithm(o.algorithm);
  if (!o.name.empty()) cfg.source.name = o.name;
  if (!o.views.empty()) {
    cfg.source.view_files.assign(o.views.begin(), o.views.end());
    cfg.source.synthetic.reset();
  }
  if (!o.labels.empty()) cfg.source.label_file = o.labels;
  if (o.header) cfg.source.header = true;
  if (o.no_normalize) cfg.source.normalize = false;
  const bool synth_flags = o.synth_samples || o.synth_clusters || o.synth_rank || !o.synth_dims.empty() ||
                           o.synth_noise || o.synth_seed;
  if (o.synthetic || synth_flags) {
    auto spec = cfg.source.synthetic.value_or(mvfc::SyntheticSpec{});
    if (o.synth_samples) spec.samples = *o.synth_samples;
    if (o.synth_clusters) spec.clusters = *o.synth_clusters;
    if (o.synth_rank) spec.rank = *o.synth_rank;
    if (!o.synth_dims.empty()) spec.view_dims = o.synth_dims;
    if (o.synth_noise) spec.noise_sigma = *o.synth_noise;
    if (o.synth_seed) spec.seed = *o.synth_seed;
    cfg.source.synthetic = spec;
  }
  if (o.clusters) cfg.clusters = *o.clusters;
  if (o.runs) cfg.runs_per_cell = *o.runs;
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.tol) cfg.tol = *o.tol;
  if (o.max_iter) cfg.max_iterations = *o.max_iter;
  if (o.h_steps) cfg.h_inner_steps = *o.h_steps;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.fuzzifier.empty()) cfg.grid.fuzzifier = o.fuzzifier;
  if (!o.lambda.empty()) cfg.grid.lambda = o.lambda;
  if (!o.eta.empty()) cfg.grid.eta = o.eta;
  if (!o.rank.empty()) cfg.grid.rank = o.rank;
  if (!cfg.source.synthetic && cfg.source.view_files.empty()) {
    throw mvfc::ConfigError("no data source: pass --views, --synthetic or a config with a dataset");
  }
  return cfg;
}

// Applies the full search grid to parameters the user left unset.
void apply_preset(const std::string& preset, ExperimentConfig& cfg, const mvfc::MultiViewDataset& ds) {
  if (preset.empty()) return;
  if (preset != "full") throw mvfc::ConfigError("unknown preset '" + preset + "'");
  const auto full = mvfc::full_search_grid(cfg.algorithm, ds);
  if (!cfg.grid.fuzzifier) cfg.grid.fuzzifier = full.fuzzifier;
  if (!cfg.grid.lambda) cfg.grid.lambda = full.lambda;
  if (!cfg.grid.eta) cfg.grid.eta = full.eta;
  if (!cfg.grid.rank) cfg.grid.rank = full.rank;
}

int run_fit(const Overrides& o, const std::string& trace_path) {
  auto cfg = build_config(o);
  const auto ds = mvfc::load_source(cfg.source);
  const auto cells = mvfc::expand_grid(cfg, ds);
  if (cells.size() != 1) {
    throw mvfc::ConfigError("fit takes one value per parameter; got " + std::to_string(cells.size()) +
                            " grid cells (use grid)");
  }
  std::size_t clusters = cfg.clusters;
  if (clusters == 0) {
    if (!ds.has_labels()) throw mvfc::ConfigError("fit: --clusters is required without labels");
    auto dense = mvfc::densify(ds.labels());
    clusters = static_cast<std::size_t>(*std::max_element(dense.begin(), dense.end())) + 1;
  }
  const auto outcome = mvfc::run_single(ds, cfg.algorithm, clusters, cells.front(), cfg, cfg.base_seed);
  std::cout << "algorithm " << mvfc::algorithm_name(cfg.algorithm) << '\n'
            << "clusters " << clusters << '\n'
            << "iterations " << outcome.trace.iterations() << '\n'
            << "converged " << (outcome.trace.converged ? "yes" : "no") << '\n'
            << "objective " << mvfc::csv::format_double(outcome.trace.final_objective()) << '\n';
  if (ds.has_labels()) {
    std::cout << "nmi " << mvfc::csv::format_double(mvfc::nmi(outcome.labels, ds.labels())) << '\n'
              << "ri " << mvfc::csv::format_double(mvfc::rand_index(outcome.labels, ds.labels())) << '\n';
  }
  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) throw mvfc::DataError(trace_path + ": cannot write file");
    mvfc::write_trace_csv(out, outcome.trace, ds.view_count());
  }
  return 0;
}

int run_grid(const Overrides& o, const std::string& dump_config) {
  auto cfg = build_config(o);
  const auto ds = mvfc::load_source(cfg.source);
  apply_preset(o.preset, cfg, ds);
  if (!dump_config.empty()) {
    std::ofstream out(dump_config);
    out << mvfc::config_to_json(cfg).dump(2) << '\n';
  }
  const auto report = mvfc::run_experiment(cfg, ds);
  mvfc::write_report(report, cfg.output_dir);
  const auto& best = report.summaries[report.best_by_nmi];
  const auto& best_ri = report.summaries[report.best_by_ri];
  std::cout << report.algorithm_label << " on " << report.dataset << ": " << report.cells.size() << " cells x "
            << cfg.runs_per_cell << " runs\n"
            << "best NMI " << mvfc::csv::format_double(best.nmi_mean) << " (var "
            << mvfc::csv::format_double(best.nmi_variance) << ", cell " << report.best_by_nmi << ")\n"
            << "best RI  " << mvfc::csv::format_double(best_ri.ri_mean) << " (var "
            << mvfc::csv::format_double(best_ri.ri_variance) << ", cell " << report.best_by_ri << ")\n"
            << "selection uses ground-truth labels (oracle)\n"
            << "wrote " << cfg.output_dir.string() << '\n';
  return 0;
}

int run_stats(const std::string& scores, bool lower_is_better, double alpha, const std::string& out_dir) {
  const auto table = mvfc::read_score_table(scores, !lower_is_better);
  const auto fr = mvfc::friedman(table, alpha);
  mvfc::write_friedman_text(std::cout, fr);
  const auto hr = mvfc::holm_posthoc(fr, table.scores.rows(), alpha);
  std::cout << '\n';
  mvfc::write_holm_text(std::cout, hr);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(std::filesystem::path(out_dir) / "friedman.csv", std::ios::binary);
    std::ofstream h(std::filesystem::path(out_dir) / "holm.csv", std::ios::binary);
    if (!f || !h) throw mvfc::DataError(out_dir + ": cannot write results");
    mvfc::write_friedman_csv(f, fr);
    mvfc::write_holm_csv(h, hr);
  }
  return 0;
}

int run_synth(const Overrides& o, const std::string& out_dir) {
  mvfc::SyntheticSpec spec;
  if (o.synth_samples) spec.samples = *o.synth_samples;
  if (o.synth_clusters) spec.clusters = *o.synth_clusters;
  if (o.synth_rank) spec.rank = *o.synth_rank;
  if (!o.synth_dims.empty()) spec.view_dims = o.synth_dims;
  if (o.synth_noise) spec.noise_sigma = *o.synth_noise;
  if (o.synth_seed) spec.seed = *o.synth_seed;
  const auto draw = mvfc::draw_synthetic(spec);
  const auto ds = o.no_normalize ? mvfc::MultiViewDataset(draw.raw_views, draw.dataset.labels(), {})
                                 : draw.dataset;
  for (const auto& p : mvfc::write_multiview(ds, out_dir)) std::cout << p.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view fuzzy clustering experiments"};
  app.require_subcommand(1);
  std::string kernels;
  app.add_option("--kernels", kernels, "force kernel set: scalar | avx2 | neon");

  Overrides fit_o;
  std::string trace_path;
  auto* fit = app.add_subcommand("fit", "one seeded run; prints metrics");
  add_experiment_flags(fit, fit_o);
  fit->add_option("--trace", trace_path, "write the convergence trace CSV here");

  Overrides grid_o;
  std::string dump_config;
  auto* grid = app.add_subcommand("grid", "seeded runs over a parameter grid");
  add_experiment_flags(grid, grid_o);
  grid->add_option("--runs", grid_o.runs, "runs per grid cell");
  grid->add_option("--threads", grid_o.threads, "worker threads (0: all cores)");
  grid->add_option("-o,--out", grid_o.out, "output directory");
  grid->add_option("--preset", grid_o.preset, "fill unset parameters from a named grid: full");
  grid->add_option("--dump-config", dump_config, "write the effective config as JSON");

  std::string scores;
  bool lower_is_better = false;
  double alpha = 0.05;
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "Friedman test and Holm post-hoc on a score table");
  stats->add_option("--scores", scores, "CSV: dataset,alg1,alg2,...")->required()->check(CLI::ExistingFile);
  stats->add_flag("--lower-is-better", lower_is_better, "rank 1 goes to the smallest score");
  stats->add_option("--alpha", alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  stats->add_option("-o,--out", stats_out, "also write friedman.csv and holm.csv here");

  Overrides synth_o;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic multi-view dataset");
  add_synthetic_flags(synth, synth_o);
  synth->add_flag("--no-normalize", synth_o.no_normalize, "write the raw nonnegative views");
  synth->add_option("-o,--out", synth_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!kernels.empty()) {
      const auto isa = kernels == "scalar" ? mvfc::kernels::Isa::Scalar
                       : kernels == "avx2" ? mvfc::kernels::Isa::Avx2
                       : kernels == "neon" ? mvfc::kernels::Isa::Neon
                                           : throw mvfc::ConfigError("unknown kernel set '" + kernels + "'");
      mvfc::kernels::select(isa);
    }
    if (*fit) return run_fit(fit_o, trace_path);
    if (*grid) return run_grid(grid_o, dump_config);
    if (*stats) return run_stats(scores, lower_is_better, alpha, stats_out);
    if (*synth) return run_synth(synth_o, synth_out);
  } catch (const mvfc::ConfigError& e) {
    std::cerr << "mvfc: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mvfc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
