#pragma once

#include "sde/chebyshev.hpp"
#include "sde/distribution.hpp"
#include "sde/l1_simplex.hpp"

namespace sde {

/// Density on the evenly spaced grid x_j = -1 + 2j/d, j = 0..d.
struct GridDensity {
  Index d = 0;
  Vector weights; ///< d + 1 entries, nonnegative, summing to 1

  double support(Index j) const {
    return -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(d);
  }
  /// Atoms at the grid points with positive weight.
  DiscreteDistribution to_distribution() const;
};

/// N x (d+1) matrix with entries Tbar_i(x_j) / i, i = 1..N.
Matrix moment_matrix(int N, Index d);

struct MomentMatchingSolution {
  GridDensity density;
  double objective = 0.0; ///< ||M q - z||_1 with z_i = tau_i / i
  Index iterations = 0;
};

/// Minimizes ||M q - z||_1 over the probability simplex on the grid.
/// Requires N >= 1 and d >= N.
MomentMatchingSolution solve_moment_matching(const MomentVector &moments, Index d);

/// Jackson damping factors b_1..b_N (entry k - 1 holds b_k).
std::vector<double> jackson_coefficients(int N);

/// Jackson-damped Chebyshev series on the grid, multiplied by the weight
/// 1/sqrt(1 - x^2), clipped at zero and renormalized. The endpoint weight is
/// evaluated at +-(1 - 1/(2d)), the middle of the half cell, since it is
/// infinite at +-1. Requires N >= 1 and d >= N.
GridDensity kpm_density(const MomentVector &moments, Index d);

/// Atom locations multiplied by L. Requires L > 0.
DiscreteDistribution rescale_density(const GridDensity &q, double L);

} // namespace sde
