#pragma once

#include <span>
#include <utility>
#include <vector>

namespace sde {

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

/// Finite list of (location, weight) atoms on the real line. Every spectral
/// density estimate in the library has this representation.
class DiscreteDistribution {
public:
  DiscreteDistribution() = default;

  /// Throws InvalidArgument on a non-finite location or a negative or
  /// non-finite weight.
  explicit DiscreteDistribution(std::vector<Atom> atoms);

  /// Mass 1/k on each of the k locations.
  static DiscreteDistribution uniform(std::span<const double> locations);
  static DiscreteDistribution point(double location);

  const std::vector<Atom> &atoms() const & { return atoms_; }
  std::vector<Atom> atoms() && { return std::move(atoms_); }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  double total_mass() const;
  bool is_normalized(double tolerance = 1e-9) const;

  /// Sorted by location, with atoms closer than `tolerance` (relative to
  /// max(1, |x|)) merged and zero-weight atoms dropped.
  DiscreteDistribution merged(double tolerance = 1e-12) const;

  /// Locations multiplied by `factor`, weights unchanged.
  DiscreteDistribution scaled(double factor) const;

  /// Weights multiplied by `factor`.
  DiscreteDistribution reweighted(double factor) const;

  /// Concatenation of the atom lists (no renormalization).
  DiscreteDistribution combined_with(const DiscreteDistribution &other) const;

  double mean() const;

private:
  std::vector<Atom> atoms_;
};

} // namespace sde
