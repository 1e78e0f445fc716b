#pragma once

#include "sde/distribution.hpp"
#include "sde/operators.hpp"

namespace sde {

/// Largest dimension exact_density will eigendecompose.
inline constexpr Index exact_density_cap = 6100;

/// Wasserstein-1 distance between two normalized distributions on the real
/// line, computed as the integral of |F_p - F_q| over the merged support.
/// Throws InvalidArgument if either input's mass differs from 1 by more
/// than 1e-9.
double wasserstein1(const DiscreteDistribution &p, const DiscreteDistribution &q);

/// Uniform distribution over the eigenvalues of `op` (mass 1/n each, equal
/// eigenvalues merged), from a dense symmetric eigendecomposition.
DiscreteDistribution exact_density(const SymmetricOperator &op,
                                   Index cap = exact_density_cap);

/// (1/n) sum |lambda_i - lambda~_i| over descending-sorted lists. Both inputs
/// must consist of atoms whose weights are integer multiples of 1/n.
double sorted_eigenvalue_error(const DiscreteDistribution &p,
                               const DiscreteDistribution &q, Index n);

/// Expands a distribution with weights k/n into its n sorted values.
std::vector<double> expand_equal_weight(const DiscreteDistribution &p, Index n);

} // namespace sde
