#pragma once

#include "sde/types.hpp"

namespace sde {

struct L1SimplexOptions {
  /// Relative target for the certified optimality gap.
  double tolerance = 1e-9;
  /// Accepted gap per row of M, so N rows allow N * acceptable_gap.
  double acceptable_gap = 1e-7;
  /// Stop after this many iterations without a better primal point.
  Index stall_iterations = 15;
  Index max_iterations = 200;
};

struct L1SimplexResult {
  Vector q;          ///< minimizer on the probability simplex
  double objective;  ///< ||M q - z||_1 at the returned q
  Index iterations;
};

/// Solution of min ||M q - z||_1 subject to q >= 0, sum q = 1.
///
/// Solved as the standard-form linear program
///   M q - p + m = z,  1^T q = 1,  q, p, m >= 0,  minimize 1^T (p + m)
/// with a Mehrotra predictor-corrector interior-point method. The normal
/// equations are (N + 1) x (N + 1) for N rows of M, so one iteration costs
/// O(N^2 K) for K columns. Stops once the returned q is certified optimal
/// to `tolerance` by a dual bound; throws ConvergenceError if the certified
/// gap is still above N * `acceptable_gap` when it stops.
L1SimplexResult solve_l1_over_simplex(const Matrix &M, const Vector &z,
                                      const L1SimplexOptions &options = {});

/// Euclidean projection onto {q >= 0, sum q = 1} (sort-based).
Vector project_onto_simplex(const Vector &v);

} // namespace sde
