#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mvfc/dataset.hpp"
#include "mvfc/fcm.hpp"
#include "mvfc/nmf.hpp"
#include "mvfc/trace.hpp"

namespace mvfc {

struct HssConfig {
  std::size_t clusters = 2;
  std::size_t rank = 1;
  double fuzzifier = 2.0;
  double lambda = 1.0;  // weight of the factorization loss
  double eta = 1.0;  // weight of the negative-entropy regularizer on view weights
  double tol = 1e-6;
  std::size_t max_iterations = 1000;
  std::size_t h_inner_steps = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError if the config cannot be run on ds.
  void validate(const MultiViewDataset& ds) const;
};

/// View weights on the probability simplex.
struct ViewWeights {
  std::vector<double> w;
};

struct HssState {
  FuzzyPartition partition;  // c x n, memberships of the hidden coefficients
  Centers centers;  // r x c, centers in the hidden space
  HiddenFactorization factorization;
  ViewWeights weights;
  std::vector<double> view_errors;  // D_k = ||X^k - P^k H||_F^2
  double objective = 0.0;
};

struct HssResult {
  HssState state;
  ConvergenceTrace trace;
};

/// Full objective:
///   sum_l sum_i u_li^m ||h_i - v_l||^2 + lambda sum_k w_k D_k + eta sum_k w_k ln w_k
/// with D_k recomputed from the factorization and 0 ln 0 = 0.
double objective(const MultiViewDataset& ds, const HssState& state, const HssConfig& cfg);

std::vector<double> view_errors(const MultiViewDataset& ds, const HiddenFactorization& f);

/// Closed-form minimizer of lambda sum w_k D_k + eta sum w_k ln w_k on the
/// simplex: the softmax of -lambda D / eta, shifted by its max before
/// exponentiation.
ViewWeights update_weights(std::span<const double> view_errors, double lambda, double eta);

/// Applies cfg.h_inner_steps multiplicative steps to H with U, V, P and w fixed:
///   H <- H * (V U^m + lambda sum_k w_k P_k^T X_k)
///          / (H diag(sum_l u_li^m) + lambda sum_k w_k P_k^T P_k H)
Matrix update_hidden_step(const MultiViewDataset& ds, const HssState& state, const HssConfig& cfg);

/// Alternating minimization in the fixed block order U, V, P^k, H, w.
/// Starts from uniform-random P^k and H, centers at c distinct columns of the
/// initial H, and uniform weights. Stops when |delta J| <= tol * max(1, |J|)
/// or after max_iterations.
HssResult hss_fit(const MultiViewDataset& ds, const HssConfig& cfg,
                  const std::function<void(const HssState&)>& on_iteration = {});

}  // namespace mvfc
