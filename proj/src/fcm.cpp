#include "mvfc/fcm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mvfc/error.hpp"
#include "mvfc/kernels.hpp"

namespace mvfc {

bool converged_step(double delta, double objective, double tol) noexcept {
  return std::abs(delta) <= tol * std::max(1.0, std::abs(objective));
}

bool is_monotone(const ConvergenceTrace& trace, double slack) noexcept {
  double prev = trace.initial_objective;
  for (const auto& row : trace.rows) {
    if (!std::isnan(prev) && row.objective > prev + slack * std::max(1.0, std::abs(prev))) {
      return false;
    }
    prev = row.objective;
  }
  return true;
}

Matrix membership_power(const Matrix& u, double m) {
  Matrix out(u.rows(), u.cols());
  auto src = u.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::pow(src[i], m);
  return out;
}

Matrix squared_distances(const Matrix& data, const Centers& centers) {
  if (data.rows() != centers.dim()) throw ConfigError("squared_distances: dimension mismatch");
  Matrix out(centers.count(), data.cols());
  for (std::size_t i = 0; i < data.cols(); ++i) {
    const auto x = data.col(i);
    for (std::size_t l = 0; l < centers.count(); ++l) {
      out(l, i) = kernels::squared_distance(x, centers.center(l));
    }
  }
  return out;
}

FuzzyPartition membership_from_distances(const Matrix& sq_dist, double m) {
  if (!(m > 1.0)) throw ConfigError("fuzzifier must be > 1");
  const std::size_t c = sq_dist.rows();
  const double exponent = 1.0 / (m - 1.0);
  FuzzyPartition part{Matrix(c, sq_dist.cols()), m};
  for (std::size_t i = 0; i < sq_dist.cols(); ++i) {
    const auto d = sq_dist.col(i);
    auto u = part.u.col(i);
    std::size_t coincident = 0;
    for (double v : d) coincident += v < kCoincidenceEps ? 1 : 0;
    if (coincident > 0) {
      const double share = 1.0 / static_cast<double>(coincident);
      for (std::size_t l = 0; l < c; ++l) u[l] = d[l] < kCoincidenceEps ? share : 0.0;
      continue;
    }
    // u_l = 1 / sum_j (d_l / d_j)^(1/(m-1)), evaluated relative to the nearest
    // center so every term lies in (0, 1].
    const double nearest = *std::min_element(d.begin(), d.end());
    double total = 0.0;
    for (std::size_t l = 0; l < c; ++l) {
      u[l] = std::pow(nearest / d[l], exponent);
      total += u[l];
    }
    for (auto& v : u) v /= total;
  }
  return part;
}

CenterUpdate weighted_centers(const Matrix& data, const Matrix& weights) {
  if (weights.cols() != data.cols()) throw ConfigError("weighted_centers: sample count mismatch");
  const std::size_t c = weights.rows();
  CenterUpdate out{Centers{Matrix(data.rows(), c)}, {}};
  for (std::size_t l = 0; l < c; ++l) {
    auto v = out.centers.v.col(l);
    double total = 0.0;
    for (std::size_t i = 0; i < data.cols(); ++i) {
      const double w = weights(l, i);
      total += w;
      kernels::axpy(w, data.col(i), v);
    }
    if (!(total > 0.0)) {
      std::fill(v.begin(), v.end(), 0.0);
      out.degenerate.push_back(l);
      continue;
    }
    for (auto& x : v) x /= total;
  }
  return out;
}

CenterUpdate update_centers(const Matrix& data, const FuzzyPartition& part) {
  return weighted_centers(data, membership_power(part.u, part.fuzzifier));
}

FuzzyPartition update_membership(const Matrix& data, const Centers& centers, double m) {
  return membership_from_distances(squared_distances(data, centers), m);
}

double fcm_objective(const Matrix& data, const FuzzyPartition& part, const Centers& centers) {
  const Matrix dist = squared_distances(data, centers);
  const Matrix w = membership_power(part.u, part.fuzzifier);
  return kernels::dot(w.values(), dist.values());
}

FuzzyPartition random_partition(std::size_t clusters, std::size_t samples, double m, Rng& rng) {
  FuzzyPartition part{Matrix(clusters, samples), m};
  for (std::size_t i = 0; i < samples; ++i) {
    auto u = part.u.col(i);
    double total = 0.0;
    for (auto& v : u) {
      v = rng.uniform_open();
      total += v;
    }
    for (auto& v : u) v /= total;
  }
  return part;
}

std::size_t reseed_centers(const Matrix& data, Centers& centers,
                           const std::vector<std::size_t>& degenerate) {
  std::vector<bool> healthy(centers.count(), true);
  for (auto l : degenerate) healthy[l] = false;
  std::vector<bool> used(data.cols(), false);
  for (auto l : degenerate) {
    std::size_t best = 0;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < data.cols(); ++i) {
      if (used[i]) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t h = 0; h < centers.count(); ++h) {
        if (healthy[h]) nearest = std::min(nearest, kernels::squared_distance(data.col(i), centers.center(h)));
      }
      if (nearest > best_dist) {
        best_dist = nearest;
        best = i;
      }
    }
    used[best] = true;
    std::copy(data.col(best).begin(), data.col(best).end(), centers.v.col(l).begin());
    healthy[l] = true;
  }
  return degenerate.size();
}

std::vector<int> defuzzify(const FuzzyPartition& part) {
  std::vector<int> labels(part.samples());
  for (std::size_t i = 0; i < part.samples(); ++i) {
    const auto u = part.u.col(i);
    labels[i] = static_cast<int>(std::max_element(u.begin(), u.end()) - u.begin());
  }
  return labels;
}

FcmResult fcm_fit(const Matrix& data, const FcmOptions& options) {
  const std::size_t n = data.cols();
  const std::size_t c = options.clusters;
  if (c < 1) throw ConfigError("fcm: cluster count must be >= 1");
  if (c > n) {
    throw ConfigError("fcm: cluster count " + std::to_string(c) + " exceeds sample count " +
                      std::to_string(n));
  }
  if (!(options.fuzzifier > 1.0)) throw ConfigError("fcm: fuzzifier must be > 1");
  if (!(options.tol >= 0.0)) throw ConfigError("fcm: tol must be >= 0");
  if (options.max_iterations < 1) throw ConfigError("fcm: max_iterations must be >= 1");

  Rng rng(options.seed);
  FcmResult result{random_partition(c, n, options.fuzzifier, rng), {}, {}};
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t t = 1; t <= options.max_iterations; ++t) {
    auto update = update_centers(data, result.partition);
    if (!update.degenerate.empty()) {
      result.trace.reseeded_clusters += reseed_centers(data, update.centers, update.degenerate);
    }
    result.centers = std::move(update.centers);
    result.partition = update_membership(data, result.centers, options.fuzzifier);
    const double objective = fcm_objective(data, result.partition, result.centers);
    const double delta = objective - previous;
    result.trace.rows.push_back({t, objective, delta, {}});
    if (options.on_iteration) options.on_iteration(result.partition, result.centers);
    previous = objective;
    if (t > 1 && converged_step(delta, objective, options.tol)) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace mvfc
