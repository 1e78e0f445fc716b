#pragma once

#include "sde/types.hpp"

#include <span>
#include <vector>

namespace sde {

/// Eigenpairs of a symmetric tridiagonal matrix, sorted by descending
/// magnitude (ties: larger signed value first).
struct TridiagonalEigen {
  Vector values;
  /// Rows of the eigenvector matrix that were requested, one column per
  /// eigenvalue in sorted order. Row r corresponds to `rows[r]`.
  Matrix vectors;
  std::vector<Index> rows;
  /// order[j] is the ascending-value rank of the j-th sorted eigenvalue.
  std::vector<Index> order;
};

/// Implicit-shift QL on the tridiagonal (diagonal, off_diagonal) with
/// Givens rotations accumulated only into the requested rows of the
/// eigenvector matrix (all rows when `rows` is empty). Accumulating just the
/// first and last rows costs O(m^2) instead of O(m^3).
TridiagonalEigen tridiagonal_eigen(std::span<const double> diagonal,
                                   std::span<const double> off_diagonal,
                                   std::vector<Index> rows = {});

/// Descending magnitude, larger signed value first among equal magnitudes.
std::vector<Index> magnitude_order(const Vector &values);

} // namespace sde
