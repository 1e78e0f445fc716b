#include "sde/distribution.hpp"
#include "sde/types.hpp"

#include <algorithm>
#include <cmath>

namespace sde {

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms)
    : atoms_(std::move(atoms)) {
  for (const Atom &a : atoms_) {
    if (!std::isfinite(a.location))
      throw InvalidArgument("DiscreteDistribution: non-finite atom location");
    if (!std::isfinite(a.weight) || a.weight < 0.0)
      throw InvalidArgument("DiscreteDistribution: atom weights must be finite and nonnegative");
  }
}

DiscreteDistribution DiscreteDistribution::uniform(std::span<const double> locations) {
  std::vector<Atom> atoms;
  atoms.reserve(locations.size());
  const double w = locations.empty() ? 0.0 : 1.0 / static_cast<double>(locations.size());
  for (double x : locations)
    atoms.push_back({x, w});
  return DiscreteDistribution(std::move(atoms));
}

DiscreteDistribution DiscreteDistribution::point(double location) {
  return DiscreteDistribution(std::vector<Atom>{Atom{location, 1.0}});
}

double DiscreteDistribution::total_mass() const {
  double total = 0.0;
  for (const Atom &a : atoms_)
    total += a.weight;
  return total;
}

bool DiscreteDistribution::is_normalized(double tolerance) const {
  return std::abs(total_mass() - 1.0) <= tolerance;
}

DiscreteDistribution DiscreteDistribution::merged(double tolerance) const {
  std::vector<Atom> sorted = atoms_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Atom &a, const Atom &b) { return a.location < b.location; });
  std::vector<Atom> out;
  out.reserve(sorted.size());
  for (const Atom &a : sorted) {
    if (a.weight == 0.0)
      continue;
    if (!out.empty() &&
        std::abs(a.location - out.back().location) <=
            tolerance * std::max(1.0, std::abs(a.location))) {
      out.back().weight += a.weight;
    } else {
      out.push_back(a);
    }
  }
  DiscreteDistribution result;
  result.atoms_ = std::move(out);
  return result;
}

DiscreteDistribution DiscreteDistribution::scaled(double factor) const {
  DiscreteDistribution out = *this;
  for (Atom &a : out.atoms_)
    a.location *= factor;
  return out;
}

DiscreteDistribution DiscreteDistribution::reweighted(double factor) const {
  DiscreteDistribution out = *this;
  for (Atom &a : out.atoms_)
    a.weight *= factor;
  return out;
}

DiscreteDistribution DiscreteDistribution::combined_with(const DiscreteDistribution &other) const {
  DiscreteDistribution out = *this;
  out.atoms_.insert(out.atoms_.end(), other.atoms_.begin(), other.atoms_.end());
  return out;
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (const Atom &a : atoms_)
    m += a.location * a.weight;
  return m;
}

} // namespace sde
