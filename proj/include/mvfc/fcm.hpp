#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mvfc/matrix.hpp"
#include "mvfc/random.hpp"
#include "mvfc/trace.hpp"

namespace mvfc {

/// Squared distances below this count as coincident with a center.
inline constexpr double kCoincidenceEps = 1e-12;

/// c x n membership matrix; column i holds sample i's memberships and sums to 1.
struct FuzzyPartition {
  Matrix u;
  double fuzzifier = 2.0;

  std::size_t clusters() const noexcept { return u.rows(); }
  std::size_t samples() const noexcept { return u.cols(); }
};

/// Cluster centers stored d x c: column l is center l.
struct Centers {
  Matrix v;

  std::size_t count() const noexcept { return v.cols(); }
  std::size_t dim() const noexcept { return v.rows(); }
  std::span<const double> center(std::size_t l) const noexcept { return v.col(l); }
};

struct CenterUpdate {
  Centers centers;
  /// Clusters whose total weight was zero. Their centers are left at 0 and
  /// must be re-seeded by the caller.
  std::vector<std::size_t> degenerate;
};

/// Elementwise u^m.
Matrix membership_power(const Matrix& u, double m);

/// c x n matrix of ||x_i - v_l||^2.
Matrix squared_distances(const Matrix& data, const Centers& centers);

/// Closed-form membership minimizer for a c x n matrix of (possibly
/// blended) squared distances: u_li proportional to d_li^(-1/(m-1)).
/// Samples coincident with one or more centers get crisp membership shared
/// uniformly among them.
FuzzyPartition membership_from_distances(const Matrix& sq_dist, double m);

/// v_l = sum_i w_li x_i / sum_i w_li for a c x n weight matrix.
CenterUpdate weighted_centers(const Matrix& data, const Matrix& weights);

CenterUpdate update_centers(const Matrix& data, const FuzzyPartition& part);
FuzzyPartition update_membership(const Matrix& data, const Centers& centers, double m);

/// sum_l sum_i u_li^m ||x_i - v_l||^2
double fcm_objective(const Matrix& data, const FuzzyPartition& part, const Centers& centers);

/// Uniform random memberships, column-normalized.
FuzzyPartition random_partition(std::size_t clusters, std::size_t samples, double m, Rng& rng);

/// Replaces each degenerate center by the sample farthest from its nearest
/// healthy center. Returns the number of centers replaced.
std::size_t reseed_centers(const Matrix& data, Centers& centers,
                           const std::vector<std::size_t>& degenerate);

/// Argmax per column, ties to the lowest cluster index.
std::vector<int> defuzzify(const FuzzyPartition& part);

struct FcmOptions {
  std::size_t clusters = 2;
  double fuzzifier = 2.0;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  std::size_t max_iterations = 1000;
  /// Called after every iteration with the fresh partition and centers.
  std::function<void(const FuzzyPartition&, const Centers&)> on_iteration;
};

struct FcmResult {
  FuzzyPartition partition;
  Centers centers;
  ConvergenceTrace trace;
};

/// Single-view fuzzy c-means on a d x n data matrix. Starts from a seeded
/// random partition and alternates center and membership updates.
FcmResult fcm_fit(const Matrix& data, const FcmOptions& options);

}  // namespace mvfc
