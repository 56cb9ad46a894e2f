#include "mvfc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "mvfc/error.hpp"

namespace mvfc {
namespace {

void check_lengths(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) {
    throw DataError("label length mismatch: " + std::to_string(pred.size()) + " predicted vs " +
                    std::to_string(truth.size()) + " true");
  }
}

std::uint64_t choose2(std::uint64_t x) { return x * (x - (x > 0 ? 1 : 0)) / 2; }

}  // namespace

std::vector<int> densify(std::span<const int> labels) {
  std::unordered_map<int, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int label : labels) {
    auto [it, inserted] = ids.try_emplace(label, static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
  return out;
}

ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth);
  const auto p = densify(pred);
  const auto t = densify(truth);
  ContingencyTable table;
  for (int v : p) table.rows = std::max<std::size_t>(table.rows, static_cast<std::size_t>(v) + 1);
  for (int v : t) table.cols = std::max<std::size_t>(table.cols, static_cast<std::size_t>(v) + 1);
  table.counts.assign(table.rows * table.cols, 0);
  table.row_sums.assign(table.rows, 0);
  table.col_sums.assign(table.cols, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++table.counts[static_cast<std::size_t>(p[i]) * table.cols + static_cast<std::size_t>(t[i])];
    ++table.row_sums[static_cast<std::size_t>(p[i])];
    ++table.col_sums[static_cast<std::size_t>(t[i])];
  }
  table.total = p.size();
  return table;
}

PairCounts pair_counts(std::span<const int> pred, std::span<const int> truth) {
  const auto table = contingency(pred, truth);
  std::uint64_t same_both = 0;
  for (auto c : table.counts) same_both += choose2(c);
  std::uint64_t same_pred = 0;
  for (auto c : table.row_sums) same_pred += choose2(c);
  std::uint64_t same_truth = 0;
  for (auto c : table.col_sums) same_truth += choose2(c);
  PairCounts out;
  out.total_pairs = choose2(table.total);
  out.f11 = same_both;
  out.f00 = out.total_pairs - (same_pred + same_truth - same_both);
  return out;
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
  if (pred.empty()) throw DataError("nmi: empty labels");
  const auto table = contingency(pred, truth);
  if (table.rows < 2 || table.cols < 2) return 0.0;
  const double n = static_cast<double>(table.total);
  double mutual = 0.0;
  for (std::size_t i = 0; i < table.rows; ++i) {
    for (std::size_t j = 0; j < table.cols; ++j) {
      const double nij = static_cast<double>(table.at(i, j));
      if (nij == 0.0) continue;
      const double ni = static_cast<double>(table.row_sums[i]);
      const double nj = static_cast<double>(table.col_sums[j]);
      mutual += nij * std::log(n * nij / (ni * nj));
    }
  }
  double pred_term = 0.0;
  for (auto c : table.row_sums) {
    const double ni = static_cast<double>(c);
    pred_term += ni * std::log(ni / n);
  }
  double truth_term = 0.0;
  for (auto c : table.col_sums) {
    const double nj = static_cast<double>(c);
    truth_term += nj * std::log(nj / n);
  }
  const double value = mutual / std::sqrt(pred_term * truth_term);
  return std::clamp(value, 0.0, 1.0);
}

double rand_index(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth);
  if (pred.size() < 2) throw DataError("rand_index: need at least 2 samples");
  const auto pc = pair_counts(pred, truth);
  return static_cast<double>(pc.f00 + pc.f11) / static_cast<double>(pc.total_pairs);
}

}  // namespace mvfc
