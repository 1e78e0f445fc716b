// Independent reference implementations used only by the tests.
#pragma once

#include "sde/distribution.hpp"
#include "sde/operators.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

using sde::Index;
using sde::Matrix;
using sde::Vector;

/// Ascending eigenvalues of a dense symmetric matrix.
inline Vector eigenvalues(const Matrix &A) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(A, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

inline Vector eigenvalues(const sde::SymmetricOperator &op) {
  return eigenvalues(op.to_dense());
}

inline double spectral_norm(const Matrix &A) {
  const Vector ev = eigenvalues(A);
  return ev.size() == 0 ? 0.0 : std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

/// Eigenvalues sorted by descending magnitude.
inline std::vector<double> by_magnitude(const Vector &ev) {
  std::vector<double> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end(), [](double a, double b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) > std::abs(b) : a > b;
  });
  return v;
}

/// f(A) through the dense eigendecomposition.
template <class F> Matrix matrix_function(const Matrix &A, F f) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(A);
  Vector fv = solver.eigenvalues().unaryExpr(f);
  return solver.eigenvectors() * fv.asDiagonal() * solver.eigenvectors().transpose();
}

/// T_k(x) = cos(k arccos x) on [-1, 1].
inline double chebyshev_trig(int k, double x) {
  return std::cos(k * std::acos(std::clamp(x, -1.0, 1.0)));
}

/// min c^T x subject to A x = b, x >= 0, by a two-phase dense tableau
/// simplex with Bland's rule. Returns +inf if infeasible.
inline double tableau_lp(Matrix A, Vector b, const Vector &c) {
  const Index m = A.rows(), n = A.cols();
  for (Index i = 0; i < m; ++i)
    if (b(i) < 0) {
      A.row(i) *= -1.0;
      b(i) *= -1.0;
    }
  // Columns: n structural, m artificial, then rhs.
  Matrix T = Matrix::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.col(n + m).head(m) = b;
  std::vector<Index> basis(static_cast<std::size_t>(m));
  std::iota(basis.begin(), basis.end(), n);
  const double eps = 1e-12;

  auto run = [&](const Vector &cost, Index allowed) {
    for (Index j = 0; j < n + m + 1; ++j)
      T(m, j) = j < cost.size() ? cost(j) : 0.0;
    for (Index i = 0; i < m; ++i)
      T.row(m) -= T(m, basis[i]) * T.row(i);
    for (int guard = 0; guard < 100000; ++guard) {
      Index enter = -1;
      for (Index j = 0; j < allowed; ++j)
        if (T(m, j) < -eps) {
          enter = j;
          break;
        }
      if (enter < 0)
        return;
      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m; ++i) {
        if (T(i, enter) <= eps)
          continue;
        const double ratio = T(i, n + m) / T(i, enter);
        if (ratio < best - eps || (ratio <= best + eps && leave >= 0 && basis[i] < basis[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0)
        return;
      T.row(leave) /= T(leave, enter);
      for (Index i = 0; i <= m; ++i)
        if (i != leave && T(i, enter) != 0.0)
          T.row(i) -= T(i, enter) * T.row(leave);
      basis[leave] = enter;
    }
  };

  Vector phase1 = Vector::Zero(n + m);
  phase1.tail(m).setOnes();
  run(phase1, n + m);
  if (-T(m, n + m) > 1e-9)
    return std::numeric_limits<double>::infinity();
  Vector phase2 = Vector::Zero(n + m);
  phase2.head(n) = c;
  run(phase2, n);
  return -T(m, n + m);
}

/// W1 between two distributions as a transport linear program.
inline double transport_w1(const sde::DiscreteDistribution &p,
                           const sde::DiscreteDistribution &q) {
  const auto &a = p.atoms();
  const auto &b = q.atoms();
  const Index k = static_cast<Index>(a.size()), l = static_cast<Index>(b.size());
  Matrix A = Matrix::Zero(k + l, k * l);
  Vector rhs(k + l);
  Vector cost(k * l);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < l; ++j) {
      const Index var = i * l + j;
      A(i, var) = 1.0;
      A(k + j, var) = 1.0;
      cost(var) = std::abs(a[i].location - b[j].location);
    }
  for (Index i = 0; i < k; ++i)
    rhs(i) = a[i].weight;
  for (Index j = 0; j < l; ++j)
    rhs(k + j) = b[j].weight;
  return tableau_lp(A, rhs, cost);
}

/// Optimal value of min ||M q - z||_1 over the simplex by enumerating every
/// basic solution of the standard form M q - p + m = z, 1^T q = 1.
inline double moment_lp_by_vertices(const Matrix &M, const Vector &z) {
  const Index N = M.rows(), K = M.cols();
  const Index rows = N + 1, vars = K + 2 * N;
  Matrix A = Matrix::Zero(rows, vars);
  A.topLeftCorner(N, K) = M;
  A.row(N).head(K).setOnes();
  A.block(0, K, N, N) = -Matrix::Identity(N, N);
  A.block(0, K + N, N, N) = Matrix::Identity(N, N);
  Vector b(rows);
  b.head(N) = z;
  b(N) = 1.0;
  Vector c = Vector::Zero(vars);
  c.tail(2 * N).setOnes();

  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> pick(static_cast<std::size_t>(rows));
  std::iota(pick.begin(), pick.end(), 0);
  for (;;) {
    Matrix B(rows, rows);
    for (Index k = 0; k < rows; ++k)
      B.col(k) = A.col(pick[k]);
    Eigen::FullPivLU<Matrix> lu(B);
    if (lu.isInvertible()) {
      const Vector x = lu.solve(b);
      if (x.minCoeff() >= -1e-12) {
        double value = 0.0;
        for (Index k = 0; k < rows; ++k)
          value += c(pick[k]) * x(k);
        best = std::min(best, value);
      }
    }
    Index i = rows - 1;
    while (i >= 0 && pick[i] == vars - rows + i)
      --i;
    if (i < 0)
      break;
    ++pick[i];
    for (Index j = i + 1; j < rows; ++j)
      pick[j] = pick[j - 1] + 1;
  }
  return best;
}

} // namespace oracle
