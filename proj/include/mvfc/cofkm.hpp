#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mvfc/dataset.hpp"
#include "mvfc/fcm.hpp"

namespace mvfc {

/// Per-view memberships and centers of a collaborative fuzzy clustering.
struct CoFkmState {
  std::vector<FuzzyPartition> memberships;  // one c x n partition per view
  std::vector<Centers> centers;  // one m_k x c center matrix per view
  double eta = 0.5;
  double fuzzifier = 2.0;
};

struct CoFkmOptions {
  std::size_t clusters = 2;
  double fuzzifier = 2.0;
  double eta = 0.5;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  std::size_t max_iterations = 1000;
  std::function<void(const CoFkmState&)> on_iteration;
};

struct CoFkmResult {
  CoFkmState state;
  ConvergenceTrace trace;
};

/// Seed used for view k's random initial partition. fcm_fit with this seed on
/// view k starts from the identical partition.
std::uint64_t view_seed(std::uint64_t seed, std::size_t view);

/// Blended weights (1 - eta) u_k^m + eta/(K-1) sum_{k' != k} u_k'^m for view k.
Matrix cofkm_center_weights(const CoFkmState& state, std::size_t view);

/// Blended squared distances (1 - eta) d_k^2 + eta/(K-1) sum_{k' != k} d_k'^2,
/// given every view's c x n squared-distance matrix.
Matrix cofkm_blended_distances(const std::vector<Matrix>& sq_dist, double eta, std::size_t view);

double cofkm_objective(const MultiViewDataset& ds, const CoFkmState& state);

/// Alternates the center step (blended-weight means) and the membership step
/// (closed form on blended distances) over all views until the collaborative
/// objective stabilizes. With K = 1 there is nothing to collaborate with and
/// eta has no effect.
CoFkmResult cofkm_fit(const MultiViewDataset& ds, const CoFkmOptions& options);

/// Geometric mean of the per-view memberships, renormalized per sample.
FuzzyPartition consensus_membership(const CoFkmState& state);

}  // namespace mvfc
