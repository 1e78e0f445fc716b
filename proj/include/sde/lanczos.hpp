#pragma once

#include "sde/ledger.hpp"
#include "sde/operators.hpp"
#include "sde/tridiagonal.hpp"

#include <string>
#include <vector>

namespace sde {

/// Output of the Lanczos three-term recurrence.
///
/// T has diagonal `alpha` and off-diagonal `eta`; Q holds the Lanczos
/// vectors q_1..q_m as columns. `residual_norm` is ||q~_{m+1}||, the size of
/// the part of A q_m that left the Krylov space; it makes the Ritz residuals
/// ||A Q v_j - lambda_j Q v_j|| = residual_norm * |v_j(m)| available without
/// another product.
struct TridiagonalFactorization {
  Vector alpha;
  Vector eta;
  Matrix Q;
  Index m_requested = 0;
  Index m_effective = 0;
  double residual_norm = 0.0;
  bool breakdown = false;

  Matrix tridiagonal() const;
};

/// Eigendecomposition of T used by SLQ: values sorted by descending
/// magnitude, orthonormal eigenvectors as columns, and the quadrature
/// weights w_j^2 = (v_j^T e_1)^2.
struct RitzDecomposition {
  Vector values;
  Matrix vectors;
  Vector weights;
  std::vector<Index> order;
};

/// Relative breakdown threshold: eta < breakdown_tolerance * ||A||_est
/// declares an invariant subspace.
inline constexpr double breakdown_tolerance = 1e-12;

/// Step-at-a-time Lanczos. Each call to step() performs exactly one metered
/// product. Used directly when the stopping point depends on the Ritz values
/// seen so far.
class LanczosProcess {
public:
  /// Throws InvalidArgument if ||start|| differs from 1 by more than 1e-10
  /// or `capacity` is outside [1, n].
  LanczosProcess(const SymmetricOperator &op, const Vector &start,
                 Index capacity, bool reorthogonalize, BudgetLedger &ledger,
                 std::string stage = stage::lanczos);

  /// Returns false, without charging, once the process has broken down or
  /// reached its capacity.
  bool step();

  bool can_step() const { return !breakdown_ && steps_ < capacity_; }
  Index steps() const { return steps_; }
  bool broken_down() const { return breakdown_; }
  double residual_norm() const { return residual_norm_; }

  /// Largest ||A q_i|| seen; a free lower bound on ||A||_2.
  double norm_seen() const { return norm_seen_; }

  std::span<const double> alpha() const { return {alpha_.data(), alpha_.size()}; }
  std::span<const double> eta() const {
    return {eta_.data(), steps_ > 0 ? static_cast<std::size_t>(steps_ - 1) : 0};
  }

  TridiagonalFactorization factorization() const;

private:
  MeteredOperator op_;
  Index n_;
  Index capacity_;
  bool reorthogonalize_;
  Matrix basis_;
  Vector next_;
  std::vector<double> alpha_;
  std::vector<double> eta_;
  Index steps_ = 0;
  bool breakdown_ = false;
  double residual_norm_ = 0.0;
  double norm_seen_ = 0.0;
};

/// Runs m steps (fewer on breakdown) from the unit vector g and charges one
/// unit per product actually performed.
TridiagonalFactorization lanczos(const SymmetricOperator &op, const Vector &g,
                                 Index m, bool reorthogonalize,
                                 BudgetLedger &ledger,
                                 const std::string &stage = stage::lanczos);

RitzDecomposition tridiag_eig(const TridiagonalFactorization &fact);

/// ||p(A) g - Q p(T) Q^T g||_2 for p given by monomial coefficients
/// (coefficients[k] multiplies x^k). Requires deg p < m. Test utility; the
/// products with A are not metered.
double polynomial_identity_check(const SymmetricOperator &op, const Vector &g,
                                 Index m, const std::vector<double> &coefficients);

} // namespace sde
