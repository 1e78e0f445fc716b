#include "sde/lanczos.hpp"

#include <cmath>

namespace sde {

Matrix TridiagonalFactorization::tridiagonal() const {
  const Index m = alpha.size();
  Matrix t = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    t(i, i) = alpha(i);
    if (i + 1 < m) {
      t(i, i + 1) = eta(i);
      t(i + 1, i) = eta(i);
    }
  }
  return t;
}

LanczosProcess::LanczosProcess(const SymmetricOperator &op, const Vector &start,
                               Index capacity, bool reorthogonalize,
                               BudgetLedger &ledger, std::string stage)
    : op_(op, ledger, std::move(stage)), n_(op.dimension()), capacity_(capacity),
      reorthogonalize_(reorthogonalize) {
  if (start.size() != n_)
    throw InvalidArgument("lanczos: start vector has wrong dimension");
  if (std::abs(start.norm() - 1.0) > 1e-10)
    throw InvalidArgument("lanczos: start vector must have unit norm");
  if (capacity < 1 || capacity > n_)
    throw InvalidArgument("lanczos: iteration count must lie in [1, n]");
  basis_.resize(n_, capacity_);
  next_ = start;
  alpha_.reserve(static_cast<std::size_t>(capacity_));
  eta_.reserve(static_cast<std::size_t>(capacity_));
}

bool LanczosProcess::step() {
  if (!can_step())
    return false;
  const Index i = steps_;
  basis_.col(i) = next_;
  if (i > 0)
    eta_.push_back(residual_norm_);

  Vector w;
  op_.apply_into(basis_.col(i), w);
  norm_seen_ = std::max(norm_seen_, w.norm());

  const double a = basis_.col(i).dot(w);
  alpha_.push_back(a);
  w -= a * basis_.col(i);
  if (i > 0)
    w -= residual_norm_ * basis_.col(i - 1);
  if (reorthogonalize_) {
    auto q = basis_.leftCols(i + 1);
    for (int pass = 0; pass < 2; ++pass)
      w -= q * (q.transpose() * w);
  }
  residual_norm_ = w.norm();
  ++steps_;
  if (!(residual_norm_ >= breakdown_tolerance * norm_seen_) || norm_seen_ == 0.0) {
    breakdown_ = true;
    next_.setZero(n_);
  } else {
    next_ = w / residual_norm_;
  }
  return true;
}

TridiagonalFactorization LanczosProcess::factorization() const {
  TridiagonalFactorization f;
  f.m_requested = capacity_;
  f.m_effective = steps_;
  f.alpha = Eigen::Map<const Vector>(alpha_.data(), steps_);
  f.eta = steps_ > 1 ? Vector(Eigen::Map<const Vector>(eta_.data(), steps_ - 1))
                     : Vector();
  f.Q = basis_.leftCols(steps_);
  f.residual_norm = residual_norm_;
  f.breakdown = breakdown_;
  return f;
}

TridiagonalFactorization lanczos(const SymmetricOperator &op, const Vector &g,
                                 Index m, bool reorthogonalize,
                                 BudgetLedger &ledger, const std::string &stage) {
  LanczosProcess process(op, g, m, reorthogonalize, ledger, stage);
  while (process.step()) {
  }
  TridiagonalFactorization f = process.factorization();
  f.m_requested = m;
  return f;
}

RitzDecomposition tridiag_eig(const TridiagonalFactorization &fact) {
  if (fact.m_effective < 1)
    throw InvalidArgument("tridiag_eig: empty factorization");
  TridiagonalEigen eig = tridiagonal_eigen(
      std::span<const double>(fact.alpha.data(), fact.alpha.size()),
      std::span<const double>(fact.eta.data(), fact.eta.size()));
  RitzDecomposition out;
  out.values = std::move(eig.values);
  out.vectors = std::move(eig.vectors);
  out.weights = out.vectors.row(0).transpose().array().square();
  out.order = std::move(eig.order);
  return out;
}

namespace {

template <typename Apply>
Vector horner(const std::vector<double> &coefficients, const Vector &x, Apply apply) {
  Vector acc = Vector::Zero(x.size());
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
    acc = apply(acc) + (*it) * x;
  return acc;
}

} // namespace

double polynomial_identity_check(const SymmetricOperator &op, const Vector &g,
                                 Index m, const std::vector<double> &coefficients) {
  if (coefficients.empty())
    return 0.0;
  const Index degree = static_cast<Index>(coefficients.size()) - 1;
  if (degree >= m)
    throw InvalidArgument("polynomial_identity_check: degree must be below m");
  BudgetLedger scratch;
  TridiagonalFactorization f = lanczos(op, g, m, true, scratch);
  const Matrix t = f.tridiagonal();

  Vector direct = horner(coefficients, g, [&](const Vector &v) { return op.apply(v); });
  Vector coords = f.Q.transpose() * g;
  Vector projected =
      f.Q * horner(coefficients, coords, [&](const Vector &v) { return Vector(t * v); });
  return (direct - projected).norm();
}

} // namespace sde
