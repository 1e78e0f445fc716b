#pragma once

#include "sde/ledger.hpp"
#include "sde/operators.hpp"
#include "sde/randgen.hpp"

#include <vector>

namespace sde {

struct BlockKrylovOptions {
  Index block_size = 1;
  Index depth = 15;
  /// Residual threshold exponent: pairs with residual <= ||A||_est / n^beta
  /// are admitted.
  double beta = 2.0;
};

/// Default depth ceil(2 log2 n).
Index default_krylov_depth(Index n);

struct RitzPairs {
  Vector values;            ///< descending magnitude
  Matrix vectors;           ///< r x r, columns match `values`
  Matrix operator_on_basis; ///< A Q, n x r
};

/// Eigendecomposition of Q^T A Q for orthonormal Q; charges Q.cols() units.
RitzPairs rayleigh_ritz(const SymmetricOperator &op, const Matrix &basis,
                        BudgetLedger &ledger,
                        const std::string &stage = stage::rayleigh_ritz);

struct DeflationResult {
  Matrix Z;                 ///< n x s, orthonormal converged Ritz vectors
  Vector lambdas;           ///< s converged Ritz values, descending magnitude
  Vector residuals;         ///< ||A z_j - lambda_j z_j|| for admitted pairs
  Index s = 0;
  Index candidates_examined = 0; ///< r, the rank of the Krylov block
  double norm_estimate = 0.0;    ///< upper bound on ||A||_2 used for the test
  double threshold = 0.0;
  Vector ritz_values;            ///< all r Ritz values, descending magnitude
  Vector ritz_residuals;         ///< residuals for all r pairs
};

/// Randomized block Krylov deflation.
///
/// Builds an orthonormal basis of span[AX, A^3 X, ..., A^{2q+1} X] for a
/// Gaussian n x l block X, extracts Ritz pairs, and keeps every pair whose
/// residual passes ||A||_est / n^beta. Columns are orthonormalized block by
/// block (each new block is A^2 applied to the previous orthonormal block,
/// which spans the same space as the raw powers); a column whose norm falls
/// below 1e-10 of its pre-projection norm is dropped and not propagated.
///
/// Ledger: `norm_estimate` for ||A||_est, `krylov` for l(2q+1) products when
/// no column is dropped, `rayleigh_ritz` for r products.
DeflationResult block_krylov_deflation(const SymmetricOperator &op,
                                       const BlockKrylovOptions &options,
                                       SeededStream &stream, BudgetLedger &ledger);

/// Orthonormalizes the columns of `block` against `basis` and each other
/// (two Gram-Schmidt passes), dropping columns that collapse below
/// `drop_tolerance` relative to their original norm.
Matrix orthonormalize_against(const Matrix &basis, const Matrix &block,
                              double drop_tolerance = 1e-10);

} // namespace sde
