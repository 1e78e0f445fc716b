#include "sde/block_krylov.hpp"
#include "sde/tridiagonal.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sde {

Index default_krylov_depth(Index n) {
  return std::max<Index>(1, static_cast<Index>(std::ceil(2.0 * std::log2(static_cast<double>(std::max<Index>(n, 2))))));
}

Matrix orthonormalize_against(const Matrix &basis, const Matrix &block,
                              double drop_tolerance) {
  const Index n = block.rows();
  Matrix accepted(n, block.cols());
  Index count = 0;
  for (Index j = 0; j < block.cols(); ++j) {
    Vector y = block.col(j);
    const double original = y.norm();
    if (original == 0.0)
      continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0)
        y -= basis * (basis.transpose() * y);
      if (count > 0) {
        auto fresh = accepted.leftCols(count);
        y -= fresh * (fresh.transpose() * y);
      }
    }
    const double norm = y.norm();
    if (norm <= drop_tolerance * original)
      continue;
    accepted.col(count++) = y / norm;
  }
  return accepted.leftCols(count);
}

RitzPairs rayleigh_ritz(const SymmetricOperator &op, const Matrix &basis,
                        BudgetLedger &ledger, const std::string &stage) {
  RitzPairs out;
  const Index r = basis.cols();
  if (r == 0) {
    out.operator_on_basis.resize(op.dimension(), 0);
    return out;
  }
  MeteredOperator metered(op, ledger, stage);
  out.operator_on_basis = metered.apply_block(basis);
  Matrix projected = basis.transpose() * out.operator_on_basis;
  projected = 0.5 * (projected + projected.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(projected);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("rayleigh_ritz: dense eigensolver failed");
  const std::vector<Index> order = magnitude_order(solver.eigenvalues());
  out.values.resize(r);
  out.vectors.resize(r, r);
  for (Index j = 0; j < r; ++j) {
    out.values(j) = solver.eigenvalues()(order[j]);
    out.vectors.col(j) = solver.eigenvectors().col(order[j]);
  }
  return out;
}

DeflationResult block_krylov_deflation(const SymmetricOperator &op,
                                       const BlockKrylovOptions &options,
                                       SeededStream &stream, BudgetLedger &ledger) {
  const Index n = op.dimension();
  const Index l = options.block_size;
  if (l < 1 || l > n)
    throw InvalidArgument("block_krylov_deflation: block size must lie in [1, n]");
  if (options.depth < 0)
    throw InvalidArgument("block_krylov_deflation: depth must be nonnegative");
  if (!(options.beta > 0.0))
    throw InvalidArgument("block_krylov_deflation: beta must be positive");

  DeflationResult result;
  result.norm_estimate = spectral_norm_upper_bound(op, stream, ledger);
  result.threshold = result.norm_estimate / std::pow(static_cast<double>(n), options.beta);

  const Matrix start = gaussian_matrix(n, l, stream);
  MeteredOperator krylov(op, ledger, stage::krylov);

  Matrix block = orthonormalize_against(Matrix(n, 0), krylov.apply_block(start));
  Matrix basis = block;
  for (Index k = 0; k < options.depth && block.cols() > 0; ++k) {
    Matrix squared = krylov.apply_block(krylov.apply_block(block));
    block = orthonormalize_against(basis, squared);
    Matrix grown(n, basis.cols() + block.cols());
    grown << basis, block;
    basis = std::move(grown);
  }

  const Index r = basis.cols();
  result.candidates_examined = r;
  RitzPairs pairs = rayleigh_ritz(op, basis, ledger);
  result.ritz_values = pairs.values;
  result.ritz_residuals.resize(r);

  std::vector<Index> admitted;
  for (Index j = 0; j < r; ++j) {
    const Vector ritz_vector = basis * pairs.vectors.col(j);
    const Vector image = pairs.operator_on_basis * pairs.vectors.col(j);
    const double residual = (image - pairs.values(j) * ritz_vector).norm();
    result.ritz_residuals(j) = residual;
    if (residual <= result.threshold)
      admitted.push_back(j);
  }

  const auto s = static_cast<Index>(admitted.size());
  result.s = s;
  result.Z.resize(n, s);
  result.lambdas.resize(s);
  result.residuals.resize(s);
  for (Index k = 0; k < s; ++k) {
    const Index j = admitted[k];
    result.Z.col(k) = basis * pairs.vectors.col(j);
    result.lambdas(k) = pairs.values(j);
    result.residuals(k) = result.ritz_residuals(j);
  }
  return result;
}

} // namespace sde
