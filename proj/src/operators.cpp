#include "sde/operators.hpp"

#include <cmath>

namespace sde {

Matrix SymmetricOperator::to_dense() const {
  const Index n = dimension();
  Matrix dense(n, n);
  Vector e = Vector::Zero(n);
  Vector column;
  for (Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    apply_into(e, column);
    dense.col(j) = column;
    e(j) = 0.0;
  }
  return dense;
}

OperatorPtr borrow(const SymmetricOperator &op) {
  return OperatorPtr(std::shared_ptr<void>{}, &op);
}

Matrix MeteredOperator::apply_block(const Matrix &block) const {
  Matrix out(block.rows(), block.cols());
  Vector column;
  for (Index j = 0; j < block.cols(); ++j) {
    apply_into(block.col(j), column);
    out.col(j) = column;
  }
  return out;
}

DenseOperator::DenseOperator(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
    throw InvalidArgument("DenseOperator: matrix must be square and non-empty");
  const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
  if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("DenseOperator: matrix is not symmetric");
}

void DenseOperator::apply_into(const Vector &in, Vector &out) const {
  out.noalias() = matrix_ * in;
}

DiagonalOperator::DiagonalOperator(Vector diagonal)
    : diagonal_(std::move(diagonal)) {
  if (diagonal_.size() == 0)
    throw InvalidArgument("DiagonalOperator: empty diagonal");
}

void DiagonalOperator::apply_into(const Vector &in, Vector &out) const {
  out = diagonal_.cwiseProduct(in);
}

Matrix DiagonalOperator::to_dense() const { return diagonal_.asDiagonal(); }

SparseOperator::SparseOperator(SparseMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
    throw InvalidArgument("SparseOperator: matrix must be square and non-empty");
  SparseMatrix transposed = matrix_.transpose();
  SparseMatrix diff = matrix_ - transposed;
  double scale = 1.0;
  for (Index k = 0; k < matrix_.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  for (Index k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
      if (std::abs(it.value()) > 1e-12 * scale)
        throw InvalidArgument("SparseOperator: matrix is not symmetric");
}

void SparseOperator::apply_into(const Vector &in, Vector &out) const {
  out.noalias() = matrix_ * in;
}

namespace {

void require_orthonormal(const Matrix &basis, double tol, const char *who) {
  const Index s = basis.cols();
  if (s == 0)
    return;
  const double err =
      (basis.transpose() * basis - Matrix::Identity(s, s)).cwiseAbs().maxCoeff();
  if (!(err <= tol))
    throw InvalidArgument(std::string(who) + ": columns are not orthonormal");
}

} // namespace

DeflatedOperator::DeflatedOperator(OperatorPtr base, Matrix basis)
    : base_(std::move(base)), basis_(std::move(basis)) {
  if (!base_)
    throw InvalidArgument("DeflatedOperator: null base operator");
  if (basis_.cols() > 0 && basis_.rows() != base_->dimension())
    throw InvalidArgument("DeflatedOperator: basis row count must equal n");
  if (basis_.cols() == 0)
    basis_.resize(base_->dimension(), 0);
  require_orthonormal(basis_, 1e-10, "DeflatedOperator");
}

Vector DeflatedOperator::project(const Vector &v) const {
  if (basis_.cols() == 0)
    return v;
  return v - basis_ * (basis_.transpose() * v);
}

void DeflatedOperator::apply_into(const Vector &in, Vector &out) const {
  Vector projected = project(in);
  Vector image;
  base_->apply_into(projected, image);
  out = project(image);
}

ScaledOperator::ScaledOperator(OperatorPtr base, double factor)
    : base_(std::move(base)), factor_(factor) {
  if (!base_)
    throw InvalidArgument("ScaledOperator: null base operator");
}

void ScaledOperator::apply_into(const Vector &in, Vector &out) const {
  base_->apply_into(in, out);
  out *= factor_;
}

DenseOperator dense_from_eigendecomposition(const Vector &eigenvalues,
                                            const Matrix &eigenvectors) {
  const Index n = eigenvalues.size();
  if (eigenvectors.rows() != n || eigenvectors.cols() != n)
    throw InvalidArgument("dense_from_eigendecomposition: dimension mismatch");
  require_orthonormal(eigenvectors, 1e-10, "dense_from_eigendecomposition");
  Matrix dense = eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  Matrix symmetric = 0.5 * (dense + dense.transpose());
  return DenseOperator(std::move(symmetric));
}

DeflatedOperator deflate(OperatorPtr base, Matrix basis) {
  return DeflatedOperator(std::move(base), std::move(basis));
}

} // namespace sde
