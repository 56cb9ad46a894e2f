#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mvfc/dataset.hpp"
#include "mvfc/random.hpp"
#include "mvfc/trace.hpp"

namespace mvfc {

/// Floor applied to every multiplicative-update denominator.
inline constexpr double kDivisionFloor = 1e-12;

/// Per-view bases P^k (m_k x r) sharing one coefficient matrix H (r x n).
struct HiddenFactorization {
  std::vector<Matrix> basis;
  Matrix coeff;

  std::size_t rank() const noexcept { return coeff.rows(); }
};

/// ||X - P H||_F^2; throws ConfigError on non-conforming shapes.
double reconstruction_error(const Matrix& x, const Matrix& p, const Matrix& h);

/// One multiplicative step for the basis: P <- P * (X H^T) / (P H H^T).
Matrix update_basis_step(const Matrix& x, const Matrix& p, const Matrix& h);

/// One multiplicative step for the shared coefficients with unit view
/// weights: H <- H * (sum_k P_k^T X_k) / (sum_k P_k^T P_k H).
Matrix update_coefficient_step(const MultiViewDataset& ds, const std::vector<Matrix>& basis,
                               const Matrix& h);

/// Throws ConfigError unless 1 <= rank <= min(m_1, ..., m_K, n).
void check_rank(const MultiViewDataset& ds, std::size_t rank);

/// Entries drawn i.i.d. uniform on (0, 1).
HiddenFactorization random_factorization(const MultiViewDataset& ds, std::size_t rank, Rng& rng);

/// sum_k ||X^k - P^k H||_F^2
double shared_nmf_objective(const MultiViewDataset& ds, const HiddenFactorization& f);

struct SharedNmfOptions {
  std::size_t rank = 1;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  std::size_t max_iterations = 1000;
  std::function<void(const HiddenFactorization&)> on_iteration;
};

struct SharedNmfResult {
  HiddenFactorization factorization;
  ConvergenceTrace trace;
};

/// Minimizes sum_k ||X^k - P^k H||_F^2 by alternating basis steps over all
/// views with a coefficient step.
SharedNmfResult shared_nmf_fit(const MultiViewDataset& ds, const SharedNmfOptions& options);

}  // namespace mvfc
