#include "mvfc/hss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mvfc/error.hpp"
#include "mvfc/kernels.hpp"

namespace mvfc {
namespace {

// The sample whose views are worst explained by the current factorization.
std::size_t worst_reconstructed(const MultiViewDataset& ds, const HiddenFactorization& f,
                                const ViewWeights& weights) {
  std::vector<double> loss(ds.samples(), 0.0);
  for (std::size_t k = 0; k < ds.view_count(); ++k) {
    const Matrix approx = multiply(f.basis[k], f.coeff);
    for (std::size_t i = 0; i < ds.samples(); ++i) {
      loss[i] += weights.w[k] * kernels::squared_distance(ds.view(k).col(i), approx.col(i));
    }
  }
  return static_cast<std::size_t>(std::max_element(loss.begin(), loss.end()) - loss.begin());
}

std::size_t reseed_from_worst(const MultiViewDataset& ds, HssState& state,
                              const std::vector<std::size_t>& degenerate) {
  const std::size_t worst = worst_reconstructed(ds, state.factorization, state.weights);
  const auto h = state.factorization.coeff.col(worst);
  for (auto l : degenerate) std::copy(h.begin(), h.end(), state.centers.v.col(l).begin());
  return degenerate.size();
}

}  // namespace

void HssConfig::validate(const MultiViewDataset& ds) const {
  if (clusters < 1 || clusters > ds.samples()) {
    throw ConfigError("hss: cluster count " + std::to_string(clusters) + " must lie in [1, " +
                      std::to_string(ds.samples()) + "]");
  }
  check_rank(ds, rank);
  if (!(fuzzifier > 1.0)) throw ConfigError("hss: fuzzifier must be > 1");
  if (!(lambda > 0.0)) throw ConfigError("hss: lambda must be > 0");
  if (!(eta > 0.0)) throw ConfigError("hss: eta must be > 0");
  if (!(tol >= 0.0)) throw ConfigError("hss: tol must be >= 0");
  if (max_iterations < 1) throw ConfigError("hss: max_iterations must be >= 1");
  if (h_inner_steps < 1) throw ConfigError("hss: h_inner_steps must be >= 1");
}

std::vector<double> view_errors(const MultiViewDataset& ds, const HiddenFactorization& f) {
  std::vector<double> d(ds.view_count());
  for (std::size_t k = 0; k < ds.view_count(); ++k) {
    d[k] = reconstruction_error(ds.view(k), f.basis[k], f.coeff);
  }
  return d;
}

double objective(const MultiViewDataset& ds, const HssState& state, const HssConfig& cfg) {
  const Matrix& h = state.factorization.coeff;
  double value = fcm_objective(h, state.partition, state.centers);
  const auto d = view_errors(ds, state.factorization);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double w = state.weights.w[k];
    value += cfg.lambda * w * d[k];
    if (w > 0.0) value += cfg.eta * w * std::log(w);
  }
  return value;
}

ViewWeights update_weights(std::span<const double> view_errors, double lambda, double eta) {
  if (!(lambda > 0.0) || !(eta > 0.0)) throw ConfigError("update_weights: lambda and eta must be > 0");
  ViewWeights out{std::vector<double>(view_errors.size())};
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < view_errors.size(); ++k) {
    out.w[k] = -lambda * view_errors[k] / eta;
    shift = std::max(shift, out.w[k]);
  }
  double total = 0.0;
  for (auto& w : out.w) {
    w = std::exp(w - shift);
    total += w;
  }
  for (auto& w : out.w) w /= total;
  return out;
}

Matrix update_hidden_step(const MultiViewDataset& ds, const HssState& state, const HssConfig& cfg) {
  const auto& f = state.factorization;
  const Matrix um = membership_power(state.partition.u, state.partition.fuzzifier);

  Matrix numer = multiply(state.centers.v, um);
  Matrix gram(f.rank(), f.rank());
  for (std::size_t k = 0; k < ds.view_count(); ++k) {
    const double scale = cfg.lambda * state.weights.w[k];
    const Matrix ptx = transposed_multiply(f.basis[k], ds.view(k));
    kernels::axpy(scale, ptx.values(), numer.values());
    const Matrix ptp = transposed_multiply(f.basis[k], f.basis[k]);
    kernels::axpy(scale, ptp.values(), gram.values());
  }
  std::vector<double> mass(um.cols(), 0.0);
  for (std::size_t i = 0; i < um.cols(); ++i) {
    for (double v : um.col(i)) mass[i] += v;
  }

  Matrix h = f.coeff;
  for (std::size_t step = 0; step < cfg.h_inner_steps; ++step) {
    Matrix denom = multiply(gram, h);
    for (std::size_t i = 0; i < h.cols(); ++i) kernels::axpy(mass[i], h.col(i), denom.col(i));
    kernels::multiplicative_update(h.values(), numer.values(), denom.values(), kDivisionFloor);
  }
  return h;
}

HssResult hss_fit(const MultiViewDataset& ds, const HssConfig& cfg,
                  const std::function<void(const HssState&)>& on_iteration) {
  cfg.validate(ds);
  for (const auto& v : ds.views()) {
    if (min_value(v) < 0.0) throw ConfigError("hss: data must be nonnegative (normalize first)");
  }
  const std::size_t n = ds.samples();
  const std::size_t c = cfg.clusters;
  const std::size_t views = ds.view_count();

  Rng rng(cfg.seed);
  HssResult result;
  HssState& state = result.state;
  state.factorization = random_factorization(ds, cfg.rank, rng);
  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    state.centers.v = Matrix(cfg.rank, c);
    for (std::size_t l = 0; l < c; ++l) {
      std::swap(order[l], order[l + rng.below(n - l)]);
      const auto h = state.factorization.coeff.col(order[l]);
      std::copy(h.begin(), h.end(), state.centers.v.col(l).begin());
    }
  }
  state.weights.w.assign(views, 1.0 / static_cast<double>(views));
  state.partition = update_membership(state.factorization.coeff, state.centers, cfg.fuzzifier);
  state.view_errors = view_errors(ds, state.factorization);
  state.objective = objective(ds, state, cfg);
  result.trace.initial_objective = state.objective;

  double previous = state.objective;
  for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
    Matrix& h = state.factorization.coeff;
    state.partition = update_membership(h, state.centers, cfg.fuzzifier);
    auto update = update_centers(h, state.partition);
    state.centers = std::move(update.centers);
    if (!update.degenerate.empty()) {
      result.trace.reseeded_clusters += reseed_from_worst(ds, state, update.degenerate);
    }
    for (std::size_t k = 0; k < views; ++k) {
      auto& p = state.factorization.basis[k];
      p = update_basis_step(ds.view(k), p, h);
    }
    h = update_hidden_step(ds, state, cfg);
    state.view_errors = view_errors(ds, state.factorization);
    state.weights = update_weights(state.view_errors, cfg.lambda, cfg.eta);
    state.objective = objective(ds, state, cfg);

    const double delta = state.objective - previous;
    result.trace.rows.push_back({t, state.objective, delta, state.weights.w});
    if (on_iteration) on_iteration(state);
    previous = state.objective;
    if (converged_step(delta, state.objective, cfg.tol)) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace mvfc
