#include "mvfc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

#include "mvfc/csv.hpp"
#include "mvfc/error.hpp"

namespace mvfc {

void ScoreTable::validate() const {
  if (datasets() < 2) throw DataError("score table needs at least 2 datasets");
  if (algorithms() < 2) throw DataError("score table needs at least 2 algorithms");
  if (algorithm_names.size() != algorithms()) throw DataError("algorithm name count does not match columns");
  if (dataset_names.size() != datasets()) throw DataError("dataset name count does not match rows");
  std::set<std::string> seen;
  for (const auto& name : algorithm_names) {
    if (!seen.insert(name).second) throw DataError("duplicated algorithm name '" + name + "'");
  }
  seen.clear();
  for (const auto& name : dataset_names) {
    if (!seen.insert(name).second) throw DataError("duplicated dataset name '" + name + "'");
  }
  for (double v : scores.values()) {
    if (std::isnan(v)) throw DataError("score table has a missing cell");
  }
}

ScoreTable parse_score_table(std::istream& in, std::string_view source, bool higher_is_better) {
  ScoreTable table;
  table.higher_is_better = higher_is_better;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_read = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split(line, ',');
    if (!header_read) {
      if (fields.size() < 2) throw DataError(std::string(source) + ": header needs algorithm columns");
      table.algorithm_names.assign(fields.begin() + 1, fields.end());
      header_read = true;
      continue;
    }
    if (fields.size() != table.algorithm_names.size() + 1) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.algorithm_names.size() + 1) + " fields, found " +
                      std::to_string(fields.size()));
    }
    table.dataset_names.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double v = 0.0;
      if (!csv::parse_double(fields[c], v)) {
        throw DataError(std::string(source) + ":" + std::to_string(line_no) + ":" +
                        std::to_string(c + 1) + ": non-numeric score '" + fields[c] + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  table.scores = Matrix(rows.size(), table.algorithm_names.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) table.scores(i, j) = rows[i][j];
  }
  table.validate();
  return table;
}

ScoreTable read_score_table(const std::filesystem::path& path, bool higher_is_better) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open file");
  return parse_score_table(in, path.string(), higher_is_better);
}

void write_score_table(std::ostream& out, const ScoreTable& table) {
  out << "dataset";
  for (const auto& name : table.algorithm_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < table.datasets(); ++i) {
    out << table.dataset_names[i];
    for (std::size_t j = 0; j < table.algorithms(); ++j) out << ',' << csv::format_double(table.scores(i, j));
    out << '\n';
  }
}

std::vector<double> rank_row(std::span<const double> scores, bool higher_is_better) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_is_better ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  std::vector<double> ranks(scores.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) ++end;
    // Positions start..end-1 hold 1-based ranks start+1..end.
    const double shared = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t p = start; p < end; ++p) ranks[order[p]] = shared;
    start = end;
  }
  return ranks;
}

FriedmanResult friedman(const ScoreTable& table, double alpha) {
  table.validate();
  const std::size_t n = table.datasets();
  const std::size_t k = table.algorithms();
  FriedmanResult result;
  result.algorithm_names = table.algorithm_names;
  result.datasets = n;
  result.alpha = alpha;
  result.avg_ranks.assign(k, 0.0);
  std::vector<double> row(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) row[j] = table.scores(i, j);
    const auto ranks = rank_row(row, table.higher_is_better);
    for (std::size_t j = 0; j < k; ++j) result.avg_ranks[j] += ranks[j];
  }
  for (auto& r : result.avg_ranks) r /= static_cast<double>(n);

  const double kd = static_cast<double>(k);
  double sum_sq = 0.0;
  for (double r : result.avg_ranks) sum_sq += r * r;
  const double chi = 12.0 * static_cast<double>(n) / (kd * (kd + 1.0)) *
                     (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  result.chi_square = std::max(0.0, chi);
  result.p_value = chi_square_sf(result.chi_square, kd - 1.0);
  result.reject = result.p_value < alpha;
  return result;
}

double holm_z(double control_rank, double rank, double standard_error) {
  return (rank - control_rank) / standard_error;
}

HolmResult holm_posthoc(const FriedmanResult& fr, std::size_t datasets, double alpha) {
  const std::size_t k = fr.avg_ranks.size();
  if (k < 2 || datasets < 1) throw DataError("holm_posthoc: need k >= 2 algorithms and N >= 1 datasets");
  HolmResult result;
  result.control_index = static_cast<std::size_t>(
      std::min_element(fr.avg_ranks.begin(), fr.avg_ranks.end()) - fr.avg_ranks.begin());
  result.control = fr.algorithm_names.at(result.control_index);
  const double kd = static_cast<double>(k);
  result.standard_error = std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(datasets)));

  const double r0 = fr.avg_ranks[result.control_index];
  for (std::size_t j = 0; j < k; ++j) {
    if (j == result.control_index) continue;
    HolmRow row;
    row.algorithm = fr.algorithm_names.at(j);
    row.index = j;
    row.z = holm_z(r0, fr.avg_ranks[j], result.standard_error);
    row.p_value = normal_two_sided_p(row.z);
    result.rows.push_back(std::move(row));
  }
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const HolmRow& a, const HolmRow& b) { return a.z > b.z; });
  bool still_rejecting = true;
  const std::size_t comparisons = result.rows.size();
  for (std::size_t pos = 0; pos < comparisons; ++pos) {
    auto& row = result.rows[pos];
    row.threshold = alpha / static_cast<double>(comparisons - pos);
    still_rejecting = still_rejecting && row.p_value < row.threshold;
    row.reject = still_rejecting;
  }
  return result;
}

// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0.0) return 1.0;
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < kMaxIter; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return std::max(0.0, 1.0 - sum * std::exp(log_prefactor));
  }
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor) * h;
}

double chi_square_sf(double x, double dof) { return gamma_q(0.5 * dof, 0.5 * std::max(0.0, x)); }

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

void write_friedman_text(std::ostream& out, const FriedmanResult& fr) {
  out << pad("Algorithm", 16) << pad("Ranking", 10) << pad("p-value", 12) << "Hypothesis\n";
  for (std::size_t j = 0; j < fr.avg_ranks.size(); ++j) {
    out << pad(fr.algorithm_names[j], 16) << pad(fixed(fr.avg_ranks[j], 4), 10);
    if (j == 0) out << pad(fixed(fr.p_value, 6), 12) << (fr.reject ? "Reject" : "Not Reject");
    out << '\n';
  }
}

void write_holm_text(std::ostream& out, const HolmResult& hr) {
  out << pad("i", 4) << pad("Algorithms", 16) << pad("z=(R0-Ri)/SE", 14) << pad("p-value", 12)
      << pad("Holm=a/i", 12) << "Hypothesis\n";
  const std::size_t m = hr.rows.size();
  for (std::size_t pos = 0; pos < m; ++pos) {
    const auto& row = hr.rows[pos];
    out << pad(std::to_string(m - pos), 4) << pad(row.algorithm, 16) << pad(fixed(row.z, 6), 14)
        << pad(fixed(row.p_value, 6), 12) << pad(fixed(row.threshold, 6), 12)
        << (row.reject ? "Reject" : "Not Reject") << '\n';
  }
}

void write_friedman_csv(std::ostream& out, const FriedmanResult& fr) {
  out << "algorithm,avg_rank,chi_square,p_value,alpha,reject\n";
  for (std::size_t j = 0; j < fr.avg_ranks.size(); ++j) {
    out << fr.algorithm_names[j] << ',' << csv::format_double(fr.avg_ranks[j]) << ','
        << csv::format_double(fr.chi_square) << ',' << csv::format_double(fr.p_value) << ','
        << csv::format_double(fr.alpha) << ',' << (fr.reject ? 1 : 0) << '\n';
  }
}

void write_holm_csv(std::ostream& out, const HolmResult& hr) {
  out << "i,algorithm,z,p_value,holm_threshold,reject\n";
  const std::size_t m = hr.rows.size();
  for (std::size_t pos = 0; pos < m; ++pos) {
    const auto& row = hr.rows[pos];
    out << (m - pos) << ',' << row.algorithm << ',' << csv::format_double(row.z) << ','
        << csv::format_double(row.p_value) << ',' << csv::format_double(row.threshold) << ','
        << (row.reject ? 1 : 0) << '\n';
  }
}

}  // namespace mvfc
