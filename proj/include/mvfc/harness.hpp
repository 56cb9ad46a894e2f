#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mvfc/dataset.hpp"
#include "mvfc/stats.hpp"
#include "mvfc/trace.hpp"

namespace mvfc {

enum class Algorithm { Fcm, CoFkm, Hss, SharedNmfFcm };

std::string_view algorithm_name(Algorithm algorithm);
/// Accepts "fcm", "cofkm", "hss", "shared_nmf+fcm".
Algorithm parse_algorithm(std::string_view name);

struct DatasetSource {
  std::string name = "dataset";
  std::vector<std::filesystem::path> view_files;
  std::optional<std::filesystem::path> label_file;
  bool header = false;
  bool normalize = true;
  std::optional<SyntheticSpec> synthetic;  // used instead of files when set
};

MultiViewDataset load_source(const DatasetSource& source);

/// Candidate values per parameter. An absent list falls back to a single
/// default value; a present but empty list is a validation error. `eta` is
/// the cooperation parameter for cofkm and the entropy weight for hss.
struct ParameterGrid {
  std::optional<std::vector<double>> fuzzifier;
  std::optional<std::vector<double>> lambda;
  std::optional<std::vector<double>> eta;
  std::optional<std::vector<std::size_t>> rank;
};

struct GridCell {
  double fuzzifier = 2.0;
  double lambda = 0.0;
  double eta = 0.0;
  std::size_t rank = 0;

  bool operator==(const GridCell&) const = default;
};

struct ExperimentConfig {
  DatasetSource source;
  Algorithm algorithm = Algorithm::Hss;
  std::size_t clusters = 0;  // 0: number of distinct ground-truth classes
  ParameterGrid grid;
  std::size_t runs_per_cell = 10;
  std::uint64_t base_seed = 0;
  double tol = 1e-6;
  std::size_t max_iterations = 1000;
  std::size_t h_inner_steps = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::filesystem::path output_dir = "results";
};

/// Fuzzifier default m = q / (q - 2) with q = min(n, d - 1); falls back to 2
/// when d <= 3 or q <= 2.
double default_fuzzifier(std::size_t samples, std::size_t dim);
std::vector<double> lambda_search_grid();  // 2^-3 .. 2^14
std::vector<double> eta_search_grid();  // 1e-7 .. 1e7
/// {10, 20, ..., 100} capped at min(d_min, n); {min(d_min, n)} if that leaves nothing.
std::vector<std::size_t> rank_search_grid(std::size_t min_view_dim, std::size_t samples);
/// The full search grid for an algorithm on a dataset.
ParameterGrid full_search_grid(Algorithm algorithm, const MultiViewDataset& ds);

/// Expands the grid into cells (lexicographic over fuzzifier, lambda, eta,
/// rank, using only the parameters the algorithm consumes). Throws
/// ConfigError on empty lists or out-of-range values.
std::vector<GridCell> expand_grid(const ExperimentConfig& cfg, const MultiViewDataset& ds);

struct RunRecord {
  std::size_t cell = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double nmi = 0.0;
  double ri = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t reseeded = 0;
  ConvergenceTrace trace;
};

struct CellSummary {
  GridCell params;
  double nmi_mean = 0.0;
  double nmi_variance = 0.0;  // population variance over runs
  double ri_mean = 0.0;
  double ri_variance = 0.0;
};

struct ExperimentReport {
  std::string dataset;
  std::string algorithm_label;
  Algorithm algorithm = Algorithm::Hss;
  std::size_t clusters = 0;
  std::size_t views = 0;
  std::vector<GridCell> cells;
  std::vector<RunRecord> runs;  // ordered by (cell, run)
  std::vector<CellSummary> summaries;
  std::size_t best_by_nmi = 0;
  std::size_t best_by_ri = 0;
};

struct RunOutcome {
  std::vector<int> labels;
  ConvergenceTrace trace;
};

/// One seeded fit of `algorithm` with the cell's parameters.
RunOutcome run_single(const MultiViewDataset& ds, Algorithm algorithm, std::size_t clusters,
                      const GridCell& cell, const ExperimentConfig& cfg, std::uint64_t seed);

/// Validates everything first, then runs runs_per_cell seeded runs per cell
/// (seed = base_seed + run) as independent jobs. Output is independent of
/// the thread count.
ExperimentReport run_experiment(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const ExperimentConfig& cfg, const MultiViewDataset& ds);

/// Recomputes the per-cell aggregates and best cells from the run records.
void summarize(ExperimentReport& report);

/// Writes report.csv, summary.json and traces/ under dir.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);
/// One CSV per run: iteration, objective, delta, w_1..w_K (hss only).
std::vector<std::filesystem::path> export_traces(const ExperimentReport& report,
                                                 const std::filesystem::path& dir);
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace, std::size_t views);

enum class Metric { Nmi, Ri };

/// Datasets x algorithms table of best-cell mean scores. Every pair must be
/// present exactly once.
ScoreTable build_score_table(std::span<const ExperimentReport> reports, Metric metric);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace mvfc
