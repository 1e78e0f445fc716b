#include "sde/metrics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace sde {

double wasserstein1(const DiscreteDistribution &p, const DiscreteDistribution &q) {
  if (!p.is_normalized() || !q.is_normalized())
    throw InvalidArgument("wasserstein1: both distributions must have unit mass");
  struct Event {
    double location;
    double delta;
  };
  std::vector<Event> events;
  events.reserve(p.size() + q.size());
  for (const Atom &a : p.merged().atoms())
    events.push_back({a.location, a.weight});
  for (const Atom &a : q.merged().atoms())
    events.push_back({a.location, -a.weight});
  std::sort(events.begin(), events.end(),
            [](const Event &a, const Event &b) { return a.location < b.location; });
  double cdf_gap = 0.0;
  double distance = 0.0;
  for (std::size_t k = 0; k + 1 < events.size(); ++k) {
    cdf_gap += events[k].delta;
    distance += std::abs(cdf_gap) * (events[k + 1].location - events[k].location);
  }
  return distance;
}

DiscreteDistribution exact_density(const SymmetricOperator &op, Index cap) {
  const Index n = op.dimension();
  if (n > cap)
    throw InvalidArgument("exact_density: dimension " + std::to_string(n) +
                          " exceeds the dense oracle cap " + std::to_string(cap) +
                          "; estimate against a known spectrum or a sampled reference");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op.to_dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("exact_density: dense eigensolver failed");
  const Vector &values = solver.eigenvalues();
  return DiscreteDistribution::uniform(std::span<const double>(values.data(), values.size()))
      .merged();
}

std::vector<double> expand_equal_weight(const DiscreteDistribution &p, Index n) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n));
  for (const Atom &a : p.atoms()) {
    const double copies = a.weight * static_cast<double>(n);
    const double rounded = std::round(copies);
    if (std::abs(copies - rounded) > 1e-6)
      throw InvalidArgument("sorted_eigenvalue_error: weights must be multiples of 1/n");
    for (long k = 0; k < static_cast<long>(rounded); ++k)
      values.push_back(a.location);
  }
  if (static_cast<Index>(values.size()) != n)
    throw InvalidArgument("sorted_eigenvalue_error: distribution does not have n atoms of mass 1/n");
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

double sorted_eigenvalue_error(const DiscreteDistribution &p,
                               const DiscreteDistribution &q, Index n) {
  if (n < 1)
    throw InvalidArgument("sorted_eigenvalue_error: n must be positive");
  const std::vector<double> a = expand_equal_weight(p, n);
  const std::vector<double> b = expand_equal_weight(q, n);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    total += std::abs(a[i] - b[i]);
  return total / static_cast<double>(n);
}

} // namespace sde
