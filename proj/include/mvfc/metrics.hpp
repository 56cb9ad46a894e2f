#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mvfc {

/// Cross-tabulation of predicted clusters (rows) against true classes (columns).
struct ContingencyTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> counts;  // row-major rows x cols
  std::vector<std::size_t> row_sums;
  std::vector<std::size_t> col_sums;
  std::size_t total = 0;

  std::size_t at(std::size_t i, std::size_t j) const noexcept { return counts[i * cols + j]; }
};

struct PairCounts {
  std::uint64_t f00 = 0;  // different class, different cluster
  std::uint64_t f11 = 0;  // same class, same cluster
  std::uint64_t total_pairs = 0;
};

/// Maps arbitrary integer labels to 0..c-1 in order of first appearance.
std::vector<int> densify(std::span<const int> labels);

ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth);
PairCounts pair_counts(std::span<const int> pred, std::span<const int> truth);

/// Normalized mutual information with natural logs; 0 when either side has a
/// single cluster. Throws DataError on length mismatch or empty input.
double nmi(std::span<const int> pred, std::span<const int> truth);

/// (f00 + f11) / (n (n - 1) / 2). Throws DataError on length mismatch or n < 2.
double rand_index(std::span<const int> pred, std::span<const int> truth);

}  // namespace mvfc
