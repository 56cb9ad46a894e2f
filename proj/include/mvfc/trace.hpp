#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace mvfc {

/// One row per completed outer iteration.
struct TraceRow {
  std::size_t iteration = 0;  // 1-based
  double objective = 0.0;
  double delta = std::numeric_limits<double>::quiet_NaN();  // objective - previous objective
  std::vector<double> weights;  // view weights after the iteration (hss only)
};

struct ConvergenceTrace {
  /// Objective of the initial state, NaN where the solver has none.
  double initial_objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<TraceRow> rows;
  bool converged = false;
  /// Number of times an empty cluster's center had to be re-seeded.
  std::size_t reseeded_clusters = 0;

  std::size_t iterations() const noexcept { return rows.size(); }
  double final_objective() const noexcept {
    return rows.empty() ? initial_objective : rows.back().objective;
  }
};

/// Stop rule shared by all solvers: |delta| <= tol * max(1, |objective|).
bool converged_step(double delta, double objective, double tol) noexcept;

/// True when every step of the trace is non-increasing within
/// slack * max(1, |previous objective|).
bool is_monotone(const ConvergenceTrace& trace, double slack = 1e-8) noexcept;

}  // namespace mvfc
