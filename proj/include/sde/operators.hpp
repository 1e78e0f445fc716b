#pragma once

#include "sde/ledger.hpp"
#include "sde/types.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <string>

namespace sde {

class SeededStream;

/// Matrix-free symmetric linear map. All estimators see the matrix only
/// through `apply_into`; implementations are immutable after construction
/// and safe to share across threads.
class SymmetricOperator {
public:
  virtual ~SymmetricOperator() = default;

  virtual Index dimension() const = 0;

  /// out = A * in. `out` is resized as needed; `in` is never modified.
  virtual void apply_into(const Vector &in, Vector &out) const = 0;

  Vector apply(const Vector &in) const {
    Vector out;
    apply_into(in, out);
    return out;
  }

  /// Materializes the operator by applying it to the identity columns.
  /// Intended for oracles and tests; not charged to any ledger.
  virtual Matrix to_dense() const;
};

using OperatorPtr = std::shared_ptr<const SymmetricOperator>;

/// Wraps a reference in a non-owning shared pointer. The referent must
/// outlive every copy of the returned pointer.
OperatorPtr borrow(const SymmetricOperator &op);

/// Binds an operator to a ledger stage; every application charges one unit.
class MeteredOperator {
public:
  MeteredOperator(const SymmetricOperator &op, BudgetLedger &ledger,
                  std::string stage)
      : op_(op), ledger_(ledger), stage_(std::move(stage)) {}

  Index dimension() const { return op_.dimension(); }

  void apply_into(const Vector &in, Vector &out) const {
    ledger_.charge(stage_);
    op_.apply_into(in, out);
  }

  Vector operator()(const Vector &in) const {
    Vector out;
    apply_into(in, out);
    return out;
  }

  /// Applies the operator to every column; charges `block.cols()` units.
  Matrix apply_block(const Matrix &block) const;

  const SymmetricOperator &base() const { return op_; }
  BudgetLedger &ledger() const { return ledger_; }
  const std::string &stage() const { return stage_; }

private:
  const SymmetricOperator &op_;
  BudgetLedger &ledger_;
  std::string stage_;
};

/// Full n x n symmetric matrix.
class DenseOperator final : public SymmetricOperator {
public:
  /// Throws InvalidArgument if `matrix` is not square or not symmetric to
  /// 1e-12 relative to its largest entry.
  explicit DenseOperator(Matrix matrix);

  Index dimension() const override { return matrix_.rows(); }
  void apply_into(const Vector &in, Vector &out) const override;
  Matrix to_dense() const override { return matrix_; }

  const Matrix &matrix() const { return matrix_; }

private:
  Matrix matrix_;
};

class DiagonalOperator final : public SymmetricOperator {
public:
  explicit DiagonalOperator(Vector diagonal);

  Index dimension() const override { return diagonal_.size(); }
  void apply_into(const Vector &in, Vector &out) const override;
  Matrix to_dense() const override;

  const Vector &diagonal() const { return diagonal_; }

private:
  Vector diagonal_;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Symmetric sparse matrix; both triangles are stored explicitly.
class SparseOperator final : public SymmetricOperator {
public:
  explicit SparseOperator(SparseMatrix matrix);

  Index dimension() const override { return matrix_.rows(); }
  void apply_into(const Vector &in, Vector &out) const override;
  Matrix to_dense() const override { return Matrix(matrix_); }

  const SparseMatrix &matrix() const { return matrix_; }

private:
  SparseMatrix matrix_;
};

/// (I - Z Z^T) A (I - Z Z^T). One application costs one base application;
/// the projections are free under the matvec cost model.
class DeflatedOperator final : public SymmetricOperator {
public:
  /// Throws InvalidArgument unless Z has n rows and Z^T Z = I to 1e-10.
  DeflatedOperator(OperatorPtr base, Matrix basis);

  Index dimension() const override { return base_->dimension(); }
  void apply_into(const Vector &in, Vector &out) const override;

  /// v - Z Z^T v.
  Vector project(const Vector &v) const;

  const Matrix &basis() const { return basis_; }
  const SymmetricOperator &base() const { return *base_; }

private:
  OperatorPtr base_;
  Matrix basis_;
};

/// factor * A.
class ScaledOperator final : public SymmetricOperator {
public:
  ScaledOperator(OperatorPtr base, double factor);

  Index dimension() const override { return base_->dimension(); }
  void apply_into(const Vector &in, Vector &out) const override;

  double factor() const { return factor_; }

private:
  OperatorPtr base_;
  double factor_;
};

/// V diag(eigs) V^T. Throws InvalidArgument on a dimension mismatch or if V
/// is not orthonormal to 1e-10.
DenseOperator dense_from_eigendecomposition(const Vector &eigenvalues,
                                            const Matrix &eigenvectors);

DeflatedOperator deflate(OperatorPtr base, Matrix basis);

/// Iteration count used by spectral_norm_upper_bound for dimension n.
Index norm_estimate_iterations(Index n);

/// Returns L with ||A||_2 <= L <= 2 ||A||_2 (the upper inequality always
/// holds; the lower one with overwhelming probability). L is twice the
/// largest Ritz magnitude of a fully reorthogonalized Lanczos run of
/// norm_estimate_iterations(n) steps from a random unit start. Returns 0 for
/// the zero operator. Charges one unit per step under `stage`.
double spectral_norm_upper_bound(const SymmetricOperator &op,
                                 SeededStream &stream, BudgetLedger &ledger,
                                 const std::string &stage = stage::norm_estimate);

} // namespace sde
