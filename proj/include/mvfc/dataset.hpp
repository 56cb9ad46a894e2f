#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvfc/matrix.hpp"

namespace mvfc {

/// K views of the same n samples. Each view is stored features x samples
/// (m_k x n); files on disk are samples-as-rows and are transposed on load.
/// Immutable once constructed, so it can be shared across concurrent fits.
class MultiViewDataset {
 public:
  MultiViewDataset() = default;
  /// Throws DataError unless K >= 1, every m_k >= 1, all views share n >= 2,
  /// and labels (when given) have length n.
  MultiViewDataset(std::vector<Matrix> views, std::optional<std::vector<int>> labels = std::nullopt,
                   std::vector<std::string> view_names = {});

  std::size_t view_count() const noexcept { return views_.size(); }
  std::size_t samples() const noexcept { return views_.empty() ? 0 : views_.front().cols(); }
  const Matrix& view(std::size_t k) const { return views_.at(k); }
  const std::vector<Matrix>& views() const noexcept { return views_; }
  std::vector<std::size_t> view_dims() const;
  std::size_t min_view_dim() const;
  const std::vector<std::string>& view_names() const noexcept { return view_names_; }

  bool has_labels() const noexcept { return labels_.has_value(); }
  /// Throws DataError when the dataset carries no ground truth.
  const std::vector<int>& labels() const;
  const std::optional<std::vector<int>>& maybe_labels() const noexcept { return labels_; }

  bool operator==(const MultiViewDataset&) const = default;

 private:
  std::vector<Matrix> views_;
  std::optional<std::vector<int>> labels_;
  std::vector<std::string> view_names_;
};

struct LoadOptions {
  bool header = false;
  char delimiter = ',';
};

/// One CSV per view (row = sample) plus an optional label file with one
/// integer per line.
MultiViewDataset load_multiview(std::span<const std::filesystem::path> paths,
                                const std::optional<std::filesystem::path>& label_path,
                                const LoadOptions& options = {});

std::vector<int> load_labels(const std::filesystem::path& path);

/// Per-feature min-max scaling to [0, 1]; constant features map to 0.
MultiViewDataset normalize_minmax(const MultiViewDataset& ds);

/// Stacks all views into one (sum m_k) x n matrix for single-view baselines.
Matrix concatenate_views(const MultiViewDataset& ds);

struct SyntheticSpec {
  std::size_t samples = 60;
  std::size_t clusters = 3;
  std::size_t rank = 3;
  std::vector<std::size_t> view_dims{10, 12};
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Everything a synthetic draw produced, including the generating factors.
struct SyntheticDraw {
  MultiViewDataset dataset;  // normalized, labelled
  std::vector<Matrix> raw_views;  // P_true^k * H_true + noise, clamped at 0, before normalization
  std::vector<Matrix> basis;  // P_true^k, m_k x rank
  Matrix coeff;  // H_true, rank x n
};

/// Clustered nonnegative hidden coefficients H_true (cluster prototypes plus
/// a small within-cluster spread), uniform nonnegative bases P_true^k, then
/// X^k = P_true^k H_true + N(0, sigma^2), clamped at 0 and normalized.
/// Cluster sizes differ by at most one; labels are the generating cluster ids.
SyntheticDraw draw_synthetic(const SyntheticSpec& spec);
MultiViewDataset generate_synthetic(const SyntheticSpec& spec);

/// Writes one samples-as-rows CSV per view and, if present, a label file.
std::vector<std::filesystem::path> write_multiview(const MultiViewDataset& ds,
                                                   const std::filesystem::path& dir);

}  // namespace mvfc
