#include "mvfc/nmf.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "mvfc/error.hpp"
#include "mvfc/kernels.hpp"

namespace mvfc {

double reconstruction_error(const Matrix& x, const Matrix& p, const Matrix& h) {
  if (p.cols() != h.rows() || x.rows() != p.rows() || x.cols() != h.cols()) {
    throw ConfigError("reconstruction_error: shapes do not conform");
  }
  const Matrix approx = multiply(p, h);
  return kernels::squared_distance(x.values(), approx.values());
}

Matrix update_basis_step(const Matrix& x, const Matrix& p, const Matrix& h) {
  const Matrix numer = multiply_transposed(x, h);
  const Matrix denom = multiply(p, multiply_transposed(h, h));
  Matrix out = p;
  kernels::multiplicative_update(out.values(), numer.values(), denom.values(), kDivisionFloor);
  return out;
}

Matrix update_coefficient_step(const MultiViewDataset& ds, const std::vector<Matrix>& basis,
                               const Matrix& h) {
  Matrix numer(h.rows(), h.cols());
  Matrix gram(h.rows(), h.rows());
  for (std::size_t k = 0; k < ds.view_count(); ++k) {
    const Matrix ptx = transposed_multiply(basis[k], ds.view(k));
    kernels::axpy(1.0, ptx.values(), numer.values());
    const Matrix ptp = transposed_multiply(basis[k], basis[k]);
    kernels::axpy(1.0, ptp.values(), gram.values());
  }
  const Matrix denom = multiply(gram, h);
  Matrix out = h;
  kernels::multiplicative_update(out.values(), numer.values(), denom.values(), kDivisionFloor);
  return out;
}

void check_rank(const MultiViewDataset& ds, std::size_t rank) {
  const std::size_t bound = std::min(ds.min_view_dim(), ds.samples());
  if (rank < 1 || rank > bound) {
    throw ConfigError("rank " + std::to_string(rank) + " outside [1, " + std::to_string(bound) + "]");
  }
}

HiddenFactorization random_factorization(const MultiViewDataset& ds, std::size_t rank, Rng& rng) {
  HiddenFactorization f;
  for (std::size_t k = 0; k < ds.view_count(); ++k) {
    Matrix p(ds.view(k).rows(), rank);
    for (auto& v : p.values()) v = rng.uniform_open();
    f.basis.push_back(std::move(p));
  }
  f.coeff = Matrix(rank, ds.samples());
  for (auto& v : f.coeff.values()) v = rng.uniform_open();
  return f;
}

double shared_nmf_objective(const MultiViewDataset& ds, const HiddenFactorization& f) {
  double total = 0.0;
  for (std::size_t k = 0; k < ds.view_count(); ++k) {
    total += reconstruction_error(ds.view(k), f.basis[k], f.coeff);
  }
  return total;
}

SharedNmfResult shared_nmf_fit(const MultiViewDataset& ds, const SharedNmfOptions& options) {
  check_rank(ds, options.rank);
  if (!(options.tol >= 0.0)) throw ConfigError("shared_nmf: tol must be >= 0");
  if (options.max_iterations < 1) throw ConfigError("shared_nmf: max_iterations must be >= 1");
  for (const auto& v : ds.views()) {
    if (min_value(v) < 0.0) throw ConfigError("shared_nmf: data must be nonnegative");
  }

  Rng rng(options.seed);
  SharedNmfResult result{random_factorization(ds, options.rank, rng), {}};
  auto& f = result.factorization;
  double previous = shared_nmf_objective(ds, f);
  result.trace.initial_objective = previous;
  for (std::size_t t = 1; t <= options.max_iterations; ++t) {
    for (std::size_t k = 0; k < ds.view_count(); ++k) {
      f.basis[k] = update_basis_step(ds.view(k), f.basis[k], f.coeff);
    }
    f.coeff = update_coefficient_step(ds, f.basis, f.coeff);
    const double objective = shared_nmf_objective(ds, f);
    const double delta = objective - previous;
    result.trace.rows.push_back({t, objective, delta, {}});
    if (options.on_iteration) options.on_iteration(f);
    previous = objective;
    if (converged_step(delta, objective, options.tol)) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace mvfc
