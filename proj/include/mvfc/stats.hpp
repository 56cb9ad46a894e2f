#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mvfc/matrix.hpp"

namespace mvfc {

/// N datasets (rows) x k algorithms (columns) of one metric.
struct ScoreTable {
  Matrix scores;
  std::vector<std::string> algorithm_names;
  std::vector<std::string> dataset_names;
  bool higher_is_better = true;

  std::size_t datasets() const noexcept { return scores.rows(); }
  std::size_t algorithms() const noexcept { return scores.cols(); }
  /// Throws DataError unless N >= 2, k >= 2, names match the shape, names
  /// are unique and no cell is NaN.
  void validate() const;
};

/// CSV with a header row "dataset,<algorithm>,..." and one row per dataset
/// whose first field is the dataset name.
ScoreTable parse_score_table(std::istream& in, std::string_view source, bool higher_is_better = true);
ScoreTable read_score_table(const std::filesystem::path& path, bool higher_is_better = true);
void write_score_table(std::ostream& out, const ScoreTable& table);

/// Ranks one row: best score gets rank 1, ties share the average rank.
std::vector<double> rank_row(std::span<const double> scores, bool higher_is_better);

struct FriedmanResult {
  std::vector<std::string> algorithm_names;
  std::vector<double> avg_ranks;
  std::size_t datasets = 0;
  double chi_square = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
};

/// Friedman chi-square test on average ranks, k - 1 degrees of freedom:
///   chi2 = 12 N / (k (k + 1)) * (sum R_i^2 - k (k + 1)^2 / 4)
FriedmanResult friedman(const ScoreTable& table, double alpha = 0.05);

struct HolmRow {
  std::string algorithm;
  std::size_t index = 0;  // column in the score table
  double z = 0.0;
  double p_value = 1.0;
  double threshold = 0.0;  // alpha / i
  bool reject = false;
};

struct HolmResult {
  std::string control;  // best-ranked algorithm
  std::size_t control_index = 0;
  double standard_error = 0.0;
  std::vector<HolmRow> rows;  // descending z
};

/// z for a comparison against the control: (R_i - R_0) / SE.
double holm_z(double control_rank, double rank, double standard_error);

/// Holm step-down comparison of every algorithm against the best-ranked
/// one, with SE = sqrt(k (k + 1) / (6 N)) and two-sided normal p-values.
HolmResult holm_posthoc(const FriedmanResult& fr, std::size_t datasets, double alpha = 0.05);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
double chi_square_sf(double x, double dof);
double normal_two_sided_p(double z);

void write_friedman_text(std::ostream& out, const FriedmanResult& fr);
void write_holm_text(std::ostream& out, const HolmResult& hr);
void write_friedman_csv(std::ostream& out, const FriedmanResult& fr);
void write_holm_csv(std::ostream& out, const HolmResult& hr);

}  // namespace mvfc
