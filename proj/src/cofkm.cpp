#include "mvfc/cofkm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mvfc/error.hpp"
#include "mvfc/kernels.hpp"

namespace mvfc {
namespace {

bool coupled(const CoFkmState& state) {
  return state.eta != 0.0 && state.memberships.size() > 1;
}

}  // namespace

std::uint64_t view_seed(std::uint64_t seed, std::size_t view) { return derive_seed(seed, view); }

Matrix cofkm_center_weights(const CoFkmState& state, std::size_t view) {
  const double m = state.fuzzifier;
  Matrix own = membership_power(state.memberships[view].u, m);
  if (!coupled(state)) return own;
  const std::size_t views = state.memberships.size();
  Matrix others(own.rows(), own.cols());
  for (std::size_t k = 0; k < views; ++k) {
    if (k == view) continue;
    const Matrix p = membership_power(state.memberships[k].u, m);
    kernels::axpy(1.0, p.values(), others.values());
  }
  const double self = 1.0 - state.eta;
  const double share = state.eta / static_cast<double>(views - 1);
  for (std::size_t i = 0; i < own.size(); ++i) {
    own.values()[i] = self * own.values()[i] + share * others.values()[i];
  }
  return own;
}

Matrix cofkm_blended_distances(const std::vector<Matrix>& sq_dist, double eta, std::size_t view) {
  Matrix out = sq_dist[view];
  const std::size_t views = sq_dist.size();
  if (eta == 0.0 || views < 2) return out;
  Matrix others(out.rows(), out.cols());
  for (std::size_t k = 0; k < views; ++k) {
    if (k != view) kernels::axpy(1.0, sq_dist[k].values(), others.values());
  }
  const double self = 1.0 - eta;
  const double share = eta / static_cast<double>(views - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = self * out.values()[i] + share * others.values()[i];
  }
  return out;
}

double cofkm_objective(const MultiViewDataset& ds, const CoFkmState& state) {
  double total = 0.0;
  for (std::size_t k = 0; k < ds.view_count(); ++k) {
    const Matrix dist = squared_distances(ds.view(k), state.centers[k]);
    const Matrix w = cofkm_center_weights(state, k);
    total += kernels::dot(w.values(), dist.values());
  }
  return total;
}

CoFkmResult cofkm_fit(const MultiViewDataset& ds, const CoFkmOptions& options) {
  const std::size_t n = ds.samples();
  const std::size_t c = options.clusters;
  const std::size_t views = ds.view_count();
  if (c < 1 || c > n) {
    throw ConfigError("cofkm: cluster count " + std::to_string(c) + " must lie in [1, " +
                      std::to_string(n) + "]");
  }
  if (!(options.eta >= 0.0 && options.eta < 1.0)) throw ConfigError("cofkm: eta must lie in [0, 1)");
  if (!(options.fuzzifier > 1.0)) throw ConfigError("cofkm: fuzzifier must be > 1");
  if (!(options.tol >= 0.0)) throw ConfigError("cofkm: tol must be >= 0");
  if (options.max_iterations < 1) throw ConfigError("cofkm: max_iterations must be >= 1");

  CoFkmResult result;
  auto& state = result.state;
  state.eta = options.eta;
  state.fuzzifier = options.fuzzifier;
  for (std::size_t k = 0; k < views; ++k) {
    Rng rng(view_seed(options.seed, k));
    state.memberships.push_back(random_partition(c, n, options.fuzzifier, rng));
  }
  state.centers.resize(views);

  double previous = std::numeric_limits<double>::quiet_NaN();
  std::vector<Matrix> sq_dist(views);
  for (std::size_t t = 1; t <= options.max_iterations; ++t) {
    for (std::size_t k = 0; k < views; ++k) {
      auto update = weighted_centers(ds.view(k), cofkm_center_weights(state, k));
      if (!update.degenerate.empty()) {
        result.trace.reseeded_clusters += reseed_centers(ds.view(k), update.centers, update.degenerate);
      }
      state.centers[k] = std::move(update.centers);
    }
    for (std::size_t k = 0; k < views; ++k) sq_dist[k] = squared_distances(ds.view(k), state.centers[k]);
    for (std::size_t k = 0; k < views; ++k) {
      state.memberships[k] =
          membership_from_distances(cofkm_blended_distances(sq_dist, state.eta, k), options.fuzzifier);
    }
    const double objective = cofkm_objective(ds, state);
    const double delta = objective - previous;
    result.trace.rows.push_back({t, objective, delta, {}});
    if (options.on_iteration) options.on_iteration(state);
    previous = objective;
    if (t > 1 && converged_step(delta, objective, options.tol)) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

FuzzyPartition consensus_membership(const CoFkmState& state) {
  if (state.memberships.empty()) throw ConfigError("consensus_membership: no views");
  const auto& first = state.memberships.front().u;
  const double inv_views = 1.0 / static_cast<double>(state.memberships.size());
  FuzzyPartition out{Matrix(first.rows(), first.cols(), 1.0), state.fuzzifier};
  for (const auto& part : state.memberships) {
    for (std::size_t i = 0; i < out.u.size(); ++i) out.u.values()[i] *= part.u.values()[i];
  }
  for (auto& v : out.u.values()) v = std::pow(v, inv_views);
  for (std::size_t i = 0; i < out.samples(); ++i) {
    auto col = out.u.col(i);
    double total = 0.0;
    for (double v : col) total += v;
    if (total > 0.0) {
      for (auto& v : col) v /= total;
    } else {
      // Every cluster was vetoed by some view; fall back to a uniform column.
      for (auto& v : col) v = 1.0 / static_cast<double>(col.size());
    }
  }
  return out;
}

}  // namespace mvfc
