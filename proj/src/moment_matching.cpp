#include "sde/moment_matching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sde {

namespace {

void check_arguments(const MomentVector &moments, Index d, const char *who) {
  if (moments.size() < 1)
    throw InvalidArgument(std::string(who) + ": need at least one moment");
  if (d < moments.size())
    throw InvalidArgument(std::string(who) + ": grid resolution d must be >= N");
}

} // namespace

DiscreteDistribution GridDensity::to_distribution() const {
  std::vector<Atom> atoms;
  for (Index j = 0; j <= d; ++j)
    if (weights(j) > 0.0)
      atoms.push_back({support(j), weights(j)});
  return DiscreteDistribution(std::move(atoms));
}

Matrix moment_matrix(int N, Index d) {
  if (d < 1)
    throw InvalidArgument("moment_matrix: d must be positive");
  Matrix M(N, d + 1);
  for (Index j = 0; j <= d; ++j) {
    const double x = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(d);
    const auto t = cheb_normalized_all(N, x);
    for (int i = 1; i <= N; ++i)
      M(i - 1, j) = t[static_cast<std::size_t>(i)] / i;
  }
  return M;
}

MomentMatchingSolution solve_moment_matching(const MomentVector &moments, Index d) {
  check_arguments(moments, d, "solve_moment_matching");
  const int N = moments.size();
  const Matrix M = moment_matrix(N, d);
  Vector z(N);
  for (int i = 1; i <= N; ++i)
    z(i - 1) = moments(i) / i;
  const L1SimplexResult lp = solve_l1_over_simplex(M, z);
  MomentMatchingSolution solution;
  solution.density.d = d;
  solution.density.weights = lp.q;
  solution.objective = lp.objective;
  solution.iterations = lp.iterations;
  return solution;
}

std::vector<double> jackson_coefficients(int N) {
  std::vector<double> b(static_cast<std::size_t>(std::max(N, 0)));
  const double np1 = N + 1.0;
  const double cot = 1.0 / std::tan(std::numbers::pi / np1);
  for (int k = 1; k <= N; ++k) {
    const double angle = std::numbers::pi * k / np1;
    b[static_cast<std::size_t>(k - 1)] =
        ((np1 - k) * std::cos(angle) + std::sin(angle) * cot) / np1;
  }
  return b;
}

GridDensity kpm_density(const MomentVector &moments, Index d) {
  check_arguments(moments, d, "kpm_density");
  const int N = moments.size();
  const auto damping = jackson_coefficients(N);
  const double edge = 1.0 - 0.5 / static_cast<double>(d);

  GridDensity q;
  q.d = d;
  q.weights.resize(d + 1);
  for (Index j = 0; j <= d; ++j) {
    const double x = q.support(j);
    const auto t = cheb_normalized_all(N, x);
    double series = t[0] * inv_sqrt_pi;
    for (int k = 1; k <= N; ++k)
      series += damping[static_cast<std::size_t>(k - 1)] * moments(k) *
                t[static_cast<std::size_t>(k)];
    const double xw = std::clamp(x, -edge, edge);
    q.weights(j) = std::max(0.0, series / std::sqrt(1.0 - xw * xw));
  }
  const double total = q.weights.sum();
  if (total > 0.0)
    q.weights /= total;
  else
    q.weights.setConstant(1.0 / static_cast<double>(d + 1));
  return q;
}

DiscreteDistribution rescale_density(const GridDensity &q, double L) {
  if (!(L > 0.0))
    throw InvalidArgument("rescale_density: L must be positive");
  return q.to_distribution().scaled(L);
}

} // namespace sde
