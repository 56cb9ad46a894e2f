#include "mvfc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "mvfc/cofkm.hpp"
#include "mvfc/csv.hpp"
#include "mvfc/error.hpp"
#include "mvfc/fcm.hpp"
#include "mvfc/hss.hpp"
#include "mvfc/metrics.hpp"
#include "mvfc/nmf.hpp"

namespace mvfc {
namespace {

bool uses_lambda(Algorithm a) { return a == Algorithm::Hss; }
bool uses_eta(Algorithm a) { return a == Algorithm::Hss || a == Algorithm::CoFkm; }
bool uses_rank(Algorithm a) { return a == Algorithm::Hss || a == Algorithm::SharedNmfFcm; }

std::size_t clustered_dim(Algorithm a, const MultiViewDataset& ds) {
  if (a != Algorithm::Fcm) return ds.min_view_dim();
  std::size_t total = 0;
  for (auto d : ds.view_dims()) total += d;
  return total;
}

template <typename T>
std::vector<T> resolve(const std::optional<std::vector<T>>& values, T fallback, const char* what) {
  if (!values) return {fallback};
  if (values->empty()) throw ConfigError(std::string("grid: empty list for ") + what);
  return *values;
}

std::size_t resolve_clusters(const ExperimentConfig& cfg, const MultiViewDataset& ds) {
  if (cfg.clusters > 0) return cfg.clusters;
  std::set<int> classes(ds.labels().begin(), ds.labels().end());
  return classes.size();
}

std::string cell_value(double v) { return csv::format_double(v); }

}  // namespace

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Fcm:
      return "fcm";
    case Algorithm::CoFkm:
      return "cofkm";
    case Algorithm::Hss:
      return "hss";
    case Algorithm::SharedNmfFcm:
      return "shared_nmf+fcm";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::Fcm, Algorithm::CoFkm, Algorithm::Hss, Algorithm::SharedNmfFcm}) {
    if (name == algorithm_name(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

MultiViewDataset load_source(const DatasetSource& source) {
  MultiViewDataset ds;
  if (source.synthetic) {
    ds = generate_synthetic(*source.synthetic);
  } else {
    ds = load_multiview(source.view_files, source.label_file, LoadOptions{source.header, ','});
  }
  return source.normalize ? normalize_minmax(ds) : ds;
}

double default_fuzzifier(std::size_t samples, std::size_t dim) {
  if (dim <= 3) return 2.0;
  const double q = static_cast<double>(std::min(samples, dim - 1));
  if (q <= 2.0) return 2.0;
  return q / (q - 2.0);
}

std::vector<double> lambda_search_grid() {
  std::vector<double> out;
  for (int e = -3; e <= 14; ++e) out.push_back(std::ldexp(1.0, e));
  return out;
}

std::vector<double> eta_search_grid() {
  return {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7};
}

std::vector<std::size_t> rank_search_grid(std::size_t min_view_dim, std::size_t samples) {
  const std::size_t cap = std::min(min_view_dim, samples);
  std::vector<std::size_t> out;
  for (std::size_t r = 10; r <= 100 && r <= cap; r += 10) out.push_back(r);
  if (out.empty()) out.push_back(cap);
  return out;
}

ParameterGrid full_search_grid(Algorithm algorithm, const MultiViewDataset& ds) {
  ParameterGrid grid;
  grid.fuzzifier = std::vector<double>{default_fuzzifier(ds.samples(), clustered_dim(algorithm, ds))};
  if (uses_lambda(algorithm)) grid.lambda = lambda_search_grid();
  if (algorithm == Algorithm::Hss) grid.eta = eta_search_grid();
  if (algorithm == Algorithm::CoFkm) grid.eta = std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  if (uses_rank(algorithm)) grid.rank = rank_search_grid(ds.min_view_dim(), ds.samples());
  return grid;
}

std::vector<GridCell> expand_grid(const ExperimentConfig& cfg, const MultiViewDataset& ds) {
  const Algorithm a = cfg.algorithm;
  const auto& g = cfg.grid;
  const auto ms = resolve(g.fuzzifier, default_fuzzifier(ds.samples(), clustered_dim(a, ds)), "fuzzifier");
  const auto lambdas = uses_lambda(a) ? resolve(g.lambda, 1.0, "lambda") : std::vector<double>{0.0};
  const auto etas = uses_eta(a) ? resolve(g.eta, a == Algorithm::CoFkm ? 0.5 : 1.0, "eta")
                                : std::vector<double>{0.0};
  const auto ranks = uses_rank(a)
                         ? resolve(g.rank, std::min<std::size_t>(10, std::min(ds.min_view_dim(), ds.samples())), "rank")
                         : std::vector<std::size_t>{0};

  for (double m : ms) {
    if (!(m > 1.0)) throw ConfigError("grid: fuzzifier " + cell_value(m) + " must be > 1");
  }
  for (double l : lambdas) {
    if (uses_lambda(a) && !(l > 0.0)) throw ConfigError("grid: lambda " + cell_value(l) + " must be > 0");
  }
  for (double e : etas) {
    if (a == Algorithm::Hss && !(e > 0.0)) throw ConfigError("grid: eta " + cell_value(e) + " must be > 0");
    if (a == Algorithm::CoFkm && !(e >= 0.0 && e < 1.0)) {
      throw ConfigError("grid: cofkm eta " + cell_value(e) + " must lie in [0, 1)");
    }
  }
  const std::size_t bound = std::min(ds.min_view_dim(), ds.samples());
  for (auto r : ranks) {
    if (uses_rank(a) && (r < 1 || r > bound)) {
      throw ConfigError("grid: rank " + std::to_string(r) + " outside [1, " + std::to_string(bound) + "]");
    }
  }

  std::vector<GridCell> cells;
  for (double m : ms) {
    for (double l : lambdas) {
      for (double e : etas) {
        for (auto r : ranks) cells.push_back({m, l, e, r});
      }
    }
  }
  return cells;
}

RunOutcome run_single(const MultiViewDataset& ds, Algorithm algorithm, std::size_t clusters,
                      const GridCell& cell, const ExperimentConfig& cfg, std::uint64_t seed) {
  RunOutcome out;
  switch (algorithm) {
    case Algorithm::Fcm: {
      FcmOptions opts{clusters, cell.fuzzifier, seed, cfg.tol, cfg.max_iterations, {}};
      auto fit = fcm_fit(concatenate_views(ds), opts);
      out.labels = defuzzify(fit.partition);
      out.trace = std::move(fit.trace);
      break;
    }
    case Algorithm::CoFkm: {
      CoFkmOptions opts{clusters, cell.fuzzifier, cell.eta, seed, cfg.tol, cfg.max_iterations, {}};
      auto fit = cofkm_fit(ds, opts);
      out.labels = defuzzify(consensus_membership(fit.state));
      out.trace = std::move(fit.trace);
      break;
    }
    case Algorithm::Hss: {
      HssConfig hc;
      hc.clusters = clusters;
      hc.rank = cell.rank;
      hc.fuzzifier = cell.fuzzifier;
      hc.lambda = cell.lambda;
      hc.eta = cell.eta;
      hc.tol = cfg.tol;
      hc.max_iterations = cfg.max_iterations;
      hc.h_inner_steps = cfg.h_inner_steps;
      hc.seed = seed;
      auto fit = hss_fit(ds, hc);
      out.labels = defuzzify(fit.state.partition);
      out.trace = std::move(fit.trace);
      break;
    }
    case Algorithm::SharedNmfFcm: {
      // The recorded trace is the factorization's; fcm then clusters H.
      SharedNmfOptions nopts{cell.rank, seed, cfg.tol, cfg.max_iterations, {}};
      auto nmf = shared_nmf_fit(ds, nopts);
      FcmOptions fopts{clusters, cell.fuzzifier, derive_seed(seed, 1), cfg.tol, cfg.max_iterations, {}};
      auto fit = fcm_fit(nmf.factorization.coeff, fopts);
      out.labels = defuzzify(fit.partition);
      out.trace = std::move(nmf.trace);
      break;
    }
  }
  return out;
}

void summarize(ExperimentReport& report) {
  report.summaries.clear();
  for (std::size_t cell = 0; cell < report.cells.size(); ++cell) {
    CellSummary s;
    s.params = report.cells[cell];
    std::vector<const RunRecord*> runs;
    for (const auto& r : report.runs) {
      if (r.cell == cell) runs.push_back(&r);
    }
    const double count = static_cast<double>(runs.size());
    for (const auto* r : runs) {
      s.nmi_mean += r->nmi;
      s.ri_mean += r->ri;
    }
    s.nmi_mean /= count;
    s.ri_mean /= count;
    for (const auto* r : runs) {
      s.nmi_variance += (r->nmi - s.nmi_mean) * (r->nmi - s.nmi_mean);
      s.ri_variance += (r->ri - s.ri_mean) * (r->ri - s.ri_mean);
    }
    s.nmi_variance /= count;
    s.ri_variance /= count;
    report.summaries.push_back(s);
  }
  report.best_by_nmi = 0;
  report.best_by_ri = 0;
  for (std::size_t c = 1; c < report.summaries.size(); ++c) {
    if (report.summaries[c].nmi_mean > report.summaries[report.best_by_nmi].nmi_mean) report.best_by_nmi = c;
    if (report.summaries[c].ri_mean > report.summaries[report.best_by_ri].ri_mean) report.best_by_ri = c;
  }
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (!cfg.source.synthetic && cfg.source.view_files.empty()) {
    throw ConfigError("experiment: no dataset source (view files or synthetic spec)");
  }
  return run_experiment(cfg, load_source(cfg.source));
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const MultiViewDataset& ds) {
  if (cfg.runs_per_cell < 1) throw ConfigError("experiment: runs_per_cell must be >= 1");
  if (!(cfg.tol >= 0.0)) throw ConfigError("experiment: tol must be >= 0");
  if (cfg.max_iterations < 1) throw ConfigError("experiment: max_iterations must be >= 1");
  if (cfg.h_inner_steps < 1) throw ConfigError("experiment: h_inner_steps must be >= 1");
  const auto& truth = ds.labels();
  const std::size_t clusters = resolve_clusters(cfg, ds);
  if (clusters < 1 || clusters > ds.samples()) {
    throw ConfigError("experiment: cluster count " + std::to_string(clusters) + " must lie in [1, " +
                      std::to_string(ds.samples()) + "]");
  }

  ExperimentReport report;
  report.dataset = cfg.source.name;
  report.algorithm = cfg.algorithm;
  report.algorithm_label = std::string(algorithm_name(cfg.algorithm));
  report.clusters = clusters;
  report.views = ds.view_count();
  report.cells = expand_grid(cfg, ds);

  const std::size_t jobs = report.cells.size() * cfg.runs_per_cell;
  report.runs.resize(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      try {
        RunRecord rec;
        rec.cell = job / cfg.runs_per_cell;
        rec.run = job % cfg.runs_per_cell;
        rec.seed = cfg.base_seed + rec.run;
        auto outcome = run_single(ds, cfg.algorithm, clusters, report.cells[rec.cell], cfg, rec.seed);
        rec.nmi = nmi(outcome.labels, truth);
        rec.ri = rand_index(outcome.labels, truth);
        rec.objective = outcome.trace.final_objective();
        rec.iterations = outcome.trace.iterations();
        rec.converged = outcome.trace.converged;
        rec.reseeded = outcome.trace.reseeded_clusters;
        rec.trace = std::move(outcome.trace);
        report.runs[job] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
      }
    }
  };
  std::size_t threads = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  summarize(report);
  return report;
}

namespace {

void write_params_header(std::ostream& out, Algorithm a) {
  out << "fuzzifier";
  if (uses_lambda(a)) out << ",lambda";
  if (uses_eta(a)) out << ",eta";
  if (uses_rank(a)) out << ",rank";
}

void write_params(std::ostream& out, Algorithm a, const GridCell& c) {
  out << csv::format_double(c.fuzzifier);
  if (uses_lambda(a)) out << ',' << csv::format_double(c.lambda);
  if (uses_eta(a)) out << ',' << csv::format_double(c.eta);
  if (uses_rank(a)) out << ',' << c.rank;
}

nlohmann::ordered_json params_json(Algorithm a, const GridCell& c) {
  nlohmann::ordered_json j;
  j["fuzzifier"] = c.fuzzifier;
  if (uses_lambda(a)) j["lambda"] = c.lambda;
  if (uses_eta(a)) j["eta"] = c.eta;
  if (uses_rank(a)) j["rank"] = c.rank;
  return j;
}

std::string trace_name(std::size_t cell, std::size_t run) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "cell%03zu_run%03zu.csv", cell, run);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot write file");
  return out;
}

}  // namespace

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace, std::size_t views) {
  const bool weighted = !trace.rows.empty() && !trace.rows.front().weights.empty();
  out << "iteration,objective,delta";
  if (weighted) {
    for (std::size_t k = 0; k < views; ++k) out << ",w_" << (k + 1);
  }
  out << '\n';
  for (const auto& row : trace.rows) {
    out << row.iteration << ',' << csv::format_double(row.objective) << ',' << csv::format_double(row.delta);
    if (weighted) {
      for (double w : row.weights) out << ',' << csv::format_double(w);
    }
    out << '\n';
  }
}

std::vector<std::filesystem::path> export_traces(const ExperimentReport& report,
                                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& run : report.runs) {
    const auto path = dir / trace_name(run.cell, run.run);
    auto out = open_for_write(path);
    write_trace_csv(out, run.trace, report.views);
    if (!out) throw DataError(path.string() + ": write failed");
    written.push_back(path);
  }
  return written;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Algorithm a = report.algorithm;
  {
    auto out = open_for_write(dir / "report.csv");
    out << "cell,run,seed,";
    write_params_header(out, a);
    out << ",nmi,ri,objective,iterations,converged,reseeded\n";
    for (const auto& r : report.runs) {
      out << r.cell << ',' << r.run << ',' << r.seed << ',';
      write_params(out, a, report.cells[r.cell]);
      out << ',' << csv::format_double(r.nmi) << ',' << csv::format_double(r.ri) << ','
          << csv::format_double(r.objective) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
          << r.reseeded << '\n';
    }
  }
  {
    nlohmann::ordered_json j;
    j["dataset"] = report.dataset;
    j["algorithm"] = report.algorithm_label;
    j["clusters"] = report.clusters;
    j["runs_per_cell"] = report.cells.empty() ? 0 : report.runs.size() / report.cells.size();
    j["variance"] = "population";
    j["selection"] = "best cell by ground-truth metric (oracle selection)";
    auto cells = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < report.summaries.size(); ++c) {
      const auto& s = report.summaries[c];
      nlohmann::ordered_json cj;
      cj["cell"] = c;
      cj["params"] = params_json(a, s.params);
      cj["nmi_mean"] = s.nmi_mean;
      cj["nmi_variance"] = s.nmi_variance;
      cj["ri_mean"] = s.ri_mean;
      cj["ri_variance"] = s.ri_variance;
      cells.push_back(std::move(cj));
    }
    j["cells"] = std::move(cells);
    if (!report.summaries.empty()) {
      j["best_by_nmi"] = {{"cell", report.best_by_nmi},
                          {"nmi_mean", report.summaries[report.best_by_nmi].nmi_mean},
                          {"nmi_variance", report.summaries[report.best_by_nmi].nmi_variance}};
      j["best_by_ri"] = {{"cell", report.best_by_ri},
                         {"ri_mean", report.summaries[report.best_by_ri].ri_mean},
                         {"ri_variance", report.summaries[report.best_by_ri].ri_variance}};
    }
    auto out = open_for_write(dir / "summary.json");
    out << j.dump(2) << '\n';
  }
  export_traces(report, dir / "traces");
}

ScoreTable build_score_table(std::span<const ExperimentReport> reports, Metric metric) {
  std::vector<std::string> datasets;
  std::vector<std::string> algorithms;
  std::map<std::pair<std::string, std::string>, double> values;
  for (const auto& r : reports) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
    if (std::find(algorithms.begin(), algorithms.end(), r.algorithm_label) == algorithms.end()) {
      algorithms.push_back(r.algorithm_label);
    }
    if (r.summaries.empty()) throw DataError("report for " + r.dataset + " has no cells");
    const double v = metric == Metric::Nmi ? r.summaries[r.best_by_nmi].nmi_mean
                                           : r.summaries[r.best_by_ri].ri_mean;
    if (!values.emplace(std::make_pair(r.dataset, r.algorithm_label), v).second) {
      throw DataError("duplicated algorithm name '" + r.algorithm_label + "' for dataset '" + r.dataset + "'");
    }
  }
  ScoreTable table;
  table.algorithm_names = algorithms;
  table.dataset_names = datasets;
  table.scores = Matrix(datasets.size(), algorithms.size());
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    for (std::size_t j = 0; j < algorithms.size(); ++j) {
      auto it = values.find({datasets[i], algorithms[j]});
      if (it == values.end()) {
        throw DataError("missing result for algorithm '" + algorithms[j] + "' on dataset '" + datasets[i] + "'");
      }
      table.scores(i, j) = it->second;
    }
  }
  table.validate();
  return table;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      cfg.source.name = d.value("name", cfg.source.name);
      if (d.contains("views")) {
        for (const auto& p : d.at("views")) cfg.source.view_files.emplace_back(p.get<std::string>());
      }
      if (d.contains("labels")) cfg.source.label_file = d.at("labels").get<std::string>();
      cfg.source.header = d.value("header", cfg.source.header);
      cfg.source.normalize = d.value("normalize", cfg.source.normalize);
      if (d.contains("synthetic")) {
        const auto& s = d.at("synthetic");
        SyntheticSpec spec;
        spec.samples = s.value("samples", spec.samples);
        spec.clusters = s.value("clusters", spec.clusters);
        spec.rank = s.value("rank", spec.rank);
        spec.view_dims = s.value("view_dims", spec.view_dims);
        spec.noise_sigma = s.value("noise_sigma", spec.noise_sigma);
        spec.seed = s.value("seed", spec.seed);
        cfg.source.synthetic = spec;
      }
    }
    if (j.contains("algorithm")) cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    cfg.clusters = j.value("clusters", cfg.clusters);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("fuzzifier")) cfg.grid.fuzzifier = g.at("fuzzifier").get<std::vector<double>>();
      if (g.contains("lambda")) cfg.grid.lambda = g.at("lambda").get<std::vector<double>>();
      if (g.contains("eta")) cfg.grid.eta = g.at("eta").get<std::vector<double>>();
      if (g.contains("rank")) cfg.grid.rank = g.at("rank").get<std::vector<std::size_t>>();
    }
    cfg.runs_per_cell = j.value("runs_per_cell", cfg.runs_per_cell);
    cfg.base_seed = j.value("base_seed", cfg.base_seed);
    cfg.tol = j.value("tol", cfg.tol);
    cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
    cfg.h_inner_steps = j.value("h_inner_steps", cfg.h_inner_steps);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json d;
  d["name"] = cfg.source.name;
  if (!cfg.source.view_files.empty()) {
    std::vector<std::string> views;
    for (const auto& p : cfg.source.view_files) views.push_back(p.string());
    d["views"] = views;
  }
  if (cfg.source.label_file) d["labels"] = cfg.source.label_file->string();
  d["header"] = cfg.source.header;
  d["normalize"] = cfg.source.normalize;
  if (cfg.source.synthetic) {
    const auto& s = *cfg.source.synthetic;
    d["synthetic"] = {{"samples", s.samples}, {"clusters", s.clusters}, {"rank", s.rank},
                      {"view_dims", s.view_dims}, {"noise_sigma", s.noise_sigma}, {"seed", s.seed}};
  }
  j["dataset"] = d;
  j["algorithm"] = std::string(algorithm_name(cfg.algorithm));
  j["clusters"] = cfg.clusters;
  nlohmann::ordered_json g = nlohmann::ordered_json::object();
  if (cfg.grid.fuzzifier) g["fuzzifier"] = *cfg.grid.fuzzifier;
  if (cfg.grid.lambda) g["lambda"] = *cfg.grid.lambda;
  if (cfg.grid.eta) g["eta"] = *cfg.grid.eta;
  if (cfg.grid.rank) g["rank"] = *cfg.grid.rank;
  j["grid"] = g;
  j["runs_per_cell"] = cfg.runs_per_cell;
  j["base_seed"] = cfg.base_seed;
  j["tol"] = cfg.tol;
  j["max_iterations"] = cfg.max_iterations;
  j["h_inner_steps"] = cfg.h_inner_steps;
  j["threads"] = cfg.threads;
  j["output_dir"] = cfg.output_dir.string();
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  auto cfg = config_from_json(j);
  // Relative data paths resolve against the config file's directory.
  const auto base = path.parent_path();
  for (auto& p : cfg.source.view_files) {
    if (p.is_relative()) p = base / p;
  }
  if (cfg.source.label_file && cfg.source.label_file->is_relative()) {
    cfg.source.label_file = base / *cfg.source.label_file;
  }
  return cfg;
}

}  // namespace mvfc
