#include "mvfc/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "mvfc/csv.hpp"
#include "mvfc/error.hpp"
#include "mvfc/random.hpp"

namespace mvfc {

MultiViewDataset::MultiViewDataset(std::vector<Matrix> views, std::optional<std::vector<int>> labels,
                                   std::vector<std::string> view_names)
    : views_(std::move(views)), labels_(std::move(labels)), view_names_(std::move(view_names)) {
  if (views_.empty()) throw DataError("dataset needs at least one view");
  const std::size_t n = views_.front().cols();
  if (n < 2) throw DataError("dataset needs at least 2 samples");
  for (std::size_t k = 0; k < views_.size(); ++k) {
    if (views_[k].rows() == 0) throw DataError("view " + std::to_string(k + 1) + " has no features");
    if (views_[k].cols() != n) {
      throw DataError("view " + std::to_string(k + 1) + " has " + std::to_string(views_[k].cols()) +
                      " samples, expected " + std::to_string(n));
    }
  }
  if (labels_ && labels_->size() != n) {
    throw DataError("label count " + std::to_string(labels_->size()) + " does not match " +
                    std::to_string(n) + " samples");
  }
  if (view_names_.empty()) {
    for (std::size_t k = 0; k < views_.size(); ++k) view_names_.push_back("view" + std::to_string(k + 1));
  } else if (view_names_.size() != views_.size()) {
    throw DataError("view name count does not match view count");
  }
}

std::vector<std::size_t> MultiViewDataset::view_dims() const {
  std::vector<std::size_t> dims;
  for (const auto& v : views_) dims.push_back(v.rows());
  return dims;
}

std::size_t MultiViewDataset::min_view_dim() const {
  std::size_t d = std::numeric_limits<std::size_t>::max();
  for (const auto& v : views_) d = std::min(d, v.rows());
  return d;
}

const std::vector<int>& MultiViewDataset::labels() const {
  if (!labels_) throw DataError("dataset has no ground-truth labels");
  return *labels_;
}

std::vector<int> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto field = csv::trim(line);
    if (field.empty()) continue;
    double v = 0.0;
    if (!csv::parse_double(field, v) || v != static_cast<double>(static_cast<long long>(v))) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": invalid label '" +
                      std::string(field) + "'");
    }
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

MultiViewDataset load_multiview(std::span<const std::filesystem::path> paths,
                                const std::optional<std::filesystem::path>& label_path,
                                const LoadOptions& options) {
  if (paths.empty()) throw DataError("no view files given");
  std::vector<Matrix> views;
  std::vector<std::string> names;
  std::size_t n = 0;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto table = csv::read_numeric(paths[k], options.header, options.delimiter);
    if (table.rows.empty()) throw DataError(paths[k].string() + ": no data rows");
    if (k == 0) {
      n = table.rows.size();
    } else if (table.rows.size() != n) {
      throw DataError(paths[k].string() + ": dimension mismatch, " + std::to_string(table.rows.size()) +
                      " rows but " + paths[0].string() + " has " + std::to_string(n));
    }
    const std::size_t m = table.rows.front().size();
    Matrix view(m, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < m; ++f) view(f, i) = table.rows[i][f];
    }
    views.push_back(std::move(view));
    names.push_back(paths[k].stem().string());
  }
  std::optional<std::vector<int>> labels;
  if (label_path) {
    labels = load_labels(*label_path);
    if (labels->size() != n) {
      throw DataError(label_path->string() + ": " + std::to_string(labels->size()) +
                      " labels for " + std::to_string(n) + " samples");
    }
  }
  return MultiViewDataset(std::move(views), std::move(labels), std::move(names));
}

MultiViewDataset normalize_minmax(const MultiViewDataset& ds) {
  std::vector<Matrix> views;
  for (const auto& src : ds.views()) {
    Matrix out(src.rows(), src.cols());
    for (std::size_t f = 0; f < src.rows(); ++f) {
      double lo = src(f, 0);
      double hi = src(f, 0);
      for (std::size_t i = 1; i < src.cols(); ++i) {
        lo = std::min(lo, src(f, i));
        hi = std::max(hi, src(f, i));
      }
      const double range = hi - lo;
      for (std::size_t i = 0; i < src.cols(); ++i) {
        out(f, i) = range > 0.0 ? std::clamp((src(f, i) - lo) / range, 0.0, 1.0) : 0.0;
      }
    }
    views.push_back(std::move(out));
  }
  return MultiViewDataset(std::move(views), ds.maybe_labels(), ds.view_names());
}

Matrix concatenate_views(const MultiViewDataset& ds) {
  std::size_t total = 0;
  for (const auto& v : ds.views()) total += v.rows();
  Matrix out(total, ds.samples());
  for (std::size_t i = 0; i < ds.samples(); ++i) {
    auto dst = out.col(i).begin();
    for (const auto& v : ds.views()) dst = std::copy(v.col(i).begin(), v.col(i).end(), dst);
  }
  return out;
}

void SyntheticSpec::validate() const {
  if (clusters < 2) throw ConfigError("synthetic spec: clusters must be >= 2");
  if (samples < clusters) throw ConfigError("synthetic spec: samples must be >= clusters");
  if (rank < 1) throw ConfigError("synthetic spec: rank must be >= 1");
  if (view_dims.empty()) throw ConfigError("synthetic spec: at least one view required");
  for (auto m : view_dims) {
    if (m < 1) throw ConfigError("synthetic spec: view dimensions must be >= 1");
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError("synthetic spec: noise_sigma must be >= 0");
}

SyntheticDraw draw_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t n = spec.samples;
  const std::size_t c = spec.clusters;
  const std::size_t r = spec.rank;

  std::vector<int> labels(n);
  {
    const std::size_t base = n / c;
    const std::size_t extra = n % c;
    std::size_t i = 0;
    for (std::size_t l = 0; l < c; ++l) {
      const std::size_t size = base + (l < extra ? 1 : 0);
      for (std::size_t s = 0; s < size; ++s) labels[i++] = static_cast<int>(l);
    }
  }

  Matrix prototypes(r, c);
  for (std::size_t l = 0; l < c; ++l) {
    for (std::size_t j = 0; j < r; ++j) prototypes(j, l) = rng.uniform();
    prototypes(l % r, l) += 1.0;
  }
  Matrix coeff(r, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      coeff(j, i) = prototypes(j, static_cast<std::size_t>(labels[i])) + 0.1 * rng.uniform();
    }
  }

  SyntheticDraw draw;
  for (std::size_t m : spec.view_dims) {
    Matrix basis(m, r);
    for (auto& v : basis.values()) v = rng.uniform();
    Matrix x = multiply(basis, coeff);
    if (spec.noise_sigma > 0.0) {
      for (auto& v : x.values()) v = std::max(0.0, v + spec.noise_sigma * rng.normal());
    }
    draw.basis.push_back(std::move(basis));
    draw.raw_views.push_back(std::move(x));
  }
  draw.coeff = std::move(coeff);
  draw.dataset = normalize_minmax(MultiViewDataset(draw.raw_views, labels));
  return draw;
}

MultiViewDataset generate_synthetic(const SyntheticSpec& spec) { return draw_synthetic(spec).dataset; }

std::vector<std::filesystem::path> write_multiview(const MultiViewDataset& ds,
                                                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t k = 0; k < ds.view_count(); ++k) {
    const auto path = dir / ("view" + std::to_string(k + 1) + ".csv");
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot write file");
    const Matrix& v = ds.view(k);
    for (std::size_t i = 0; i < v.cols(); ++i) {
      for (std::size_t f = 0; f < v.rows(); ++f) {
        if (f) out << ',';
        out << csv::format_double(v(f, i));
      }
      out << '\n';
    }
    written.push_back(path);
  }
  if (ds.has_labels()) {
    const auto path = dir / "labels.csv";
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot write file");
    for (int label : ds.labels()) out << label << '\n';
    written.push_back(path);
  }
  return written;
}

}  // namespace mvfc
