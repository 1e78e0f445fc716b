#include "sde/l1_simplex.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <cstdio>
#include <vector>

namespace sde {

Vector project_onto_simplex(const Vector &v) {
  const Index n = v.size();
  if (n == 0)
    return v;
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, tau = 0.0;
  for (Index k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0)
      tau = candidate;
  }
  return (v.array() - tau).cwiseMax(0.0).matrix();
}

namespace {

// Primal variables (q, p, m) and dual slacks share this block layout.
struct Blocks {
  Vector q, p, m;

  double dot(const Blocks &o) const { return q.dot(o.q) + p.dot(o.p) + m.dot(o.m); }
  Index size() const { return q.size() + p.size() + m.size(); }
};

class InteriorPoint {
public:
  InteriorPoint(const Matrix &M, const Vector &z, const L1SimplexOptions &options)
      : M_(M), z_(z), opt_(options), N_(M.rows()), K_(M.cols()) {}

  L1SimplexResult solve() {
    start();
    Vector best_q;
    double best_objective = std::numeric_limits<double>::infinity();
    double certified_gap = std::numeric_limits<double>::infinity();
    Index iter = 0, since_improvement = 0;
    for (;; ++iter) {
      // Any y with nonnegative dual slacks bounds the optimum from below.
      const Vector candidate = project_onto_simplex(x_.q.cwiseMax(0.0));
      const double value = (M_ * candidate - z_).lpNorm<1>();
      if (value < best_objective) {
        best_objective = value;
        best_q = candidate;
        since_improvement = 0;
      } else {
        ++since_improvement;
      }
      certified_gap = std::min(certified_gap, best_objective - dual_bound());
      // Late iterates lose primal accuracy on near-singular normal equations.
      if (certified_gap <= opt_.tolerance * (1.0 + best_objective) || iter >= opt_.max_iterations ||
          since_improvement >= opt_.stall_iterations)
        break;
      if (!step(primal_residual(), dual_residual(), x_.dot(s_)))
        break;
    }
    polish(best_q, best_objective);
    certified_gap = std::min(certified_gap, best_objective - dual_bound());
    if (!(certified_gap <= opt_.acceptable_gap * static_cast<double>(std::max<Index>(N_, 1))))
    {
      char detail[160];
      std::snprintf(detail, sizeof detail,
                    "moment matching LP: certified gap %.3e (objective %.6e) after %ld "
                    "interior-point iterations",
                    certified_gap, best_objective, static_cast<long>(iter));
      throw ConvergenceError(detail);
    }
    return {best_q, best_objective, iter};
  }

private:
  // Affine-scaled minimum-norm correction of q toward exact zero residual on
  // the rows the dual marks as interior (|y_i| < 1), keeping q >= 0.
  void polish(Vector &q, double &objective) const {
    const Vector y = -y_.head(N_);
    std::vector<Index> rows;
    for (Index i = 0; i < N_; ++i)
      if (std::abs(y(i)) < 1.0 - 1e-6)
        rows.push_back(i);
    const Index E = static_cast<Index>(rows.size());
    // Each blocked step drives one weight to zero, dropping its column.
    for (int round = 0; round < 40 && objective > 1e-13; ++round) {
      Matrix B(K_, E + 1);
      const Vector root = q.cwiseSqrt();
      for (Index e = 0; e < E; ++e)
        B.col(e) = root.cwiseProduct(M_.row(rows[static_cast<std::size_t>(e)]).transpose());
      B.col(E) = root;
      Vector r(E + 1);
      const Vector Mq = M_ * q;
      for (Index e = 0; e < E; ++e)
        r(e) = z_(rows[static_cast<std::size_t>(e)]) - Mq(rows[static_cast<std::size_t>(e)]);
      r(E) = 1.0 - q.sum();
      // delta = sqrt(D) v with v the minimum-norm solution of B^T v = r,
      // where B = sqrt(D) A^T = Q R gives v = Q R^{-T} r.
      const Eigen::HouseholderQR<Matrix> qr(B);
      const Matrix R = qr.matrixQR().topRows(E + 1).triangularView<Eigen::Upper>();
      if ((R.diagonal().array() == 0.0).any())
        break;
      Vector v = Vector::Zero(K_);
      v.head(E + 1) = R.transpose().triangularView<Eigen::Lower>().solve(r);
      v = qr.householderQ() * v;
      const Vector delta = root.cwiseProduct(v);
      double alpha = 1.0;
      for (Index j = 0; j < K_; ++j)
        if (delta(j) < 0.0)
          alpha = std::min(alpha, -q(j) / delta(j));
      const Vector candidate = project_onto_simplex((q + alpha * delta).cwiseMax(0.0));
      const double value = (M_ * candidate - z_).lpNorm<1>();
      if (!(value < objective))
        break;
      q = candidate;
      objective = value;
    }
  }

  // Dual objective of the dual point (y, s) made exactly feasible: the
  // objective is max over |y_i| <= 1 of  min_j (M^T y)_j - z^T y.
  double dual_bound() const {
    const Vector y = (-y_.head(N_)).cwiseMax(-1.0).cwiseMin(1.0);
    return (M_.transpose() * y).minCoeff() - z_.dot(y);
  }

  // A x for x = (q, p, m): rows (M q - p + m, 1^T q).
  Vector apply_A(const Blocks &x) const {
    Vector out(N_ + 1);
    out.head(N_) = M_ * x.q - x.p + x.m;
    out(N_) = x.q.sum();
    return out;
  }

  Blocks apply_At(const Vector &y) const {
    const Vector top = y.head(N_);
    return {(M_.transpose() * top).array() + y(N_), -top, top};
  }

  Vector primal_residual() const {
    Vector b(N_ + 1);
    b.head(N_) = z_;
    b(N_) = 1.0;
    return b - apply_A(x_);
  }

  Blocks dual_residual() const {
    const Blocks aty = apply_At(y_);
    return {-aty.q - s_.q, Vector::Ones(N_) - aty.p - s_.p, Vector::Ones(N_) - aty.m - s_.m};
  }

  // Feasible interior start: uniform q, slacks offset by one, y = (0, -1).
  void start() {
    const Vector r = M_ * Vector::Constant(K_, 1.0 / static_cast<double>(K_)) - z_;
    x_.q = Vector::Constant(K_, 1.0 / static_cast<double>(K_));
    x_.p = r.cwiseMax(0.0).array() + 1.0;
    x_.m = (-r).cwiseMax(0.0).array() + 1.0;
    y_ = Vector::Zero(N_ + 1);
    y_(N_) = -1.0;
    s_.q = Vector::Ones(K_);
    s_.p = Vector::Ones(N_);
    s_.m = Vector::Ones(N_);
  }

  // R^T R = A D A^T with R from a QR factorization of D^{1/2} A^T, which
  // squares the conditioning far less than forming A D A^T.
  void factor(const Blocks &D) {
    Matrix B = Matrix::Zero(K_ + 2 * N_, N_ + 1);
    const Vector rq = D.q.cwiseSqrt();
    B.topLeftCorner(K_, N_) = rq.asDiagonal() * M_.transpose();
    B.topRightCorner(K_, 1) = rq;
    for (Index i = 0; i < N_; ++i) {
      B(K_ + i, i) = -std::sqrt(D.p(i));
      B(K_ + N_ + i, i) = std::sqrt(D.m(i));
    }
    Eigen::HouseholderQR<Matrix> qr(B);
    R_ = qr.matrixQR().topRows(N_ + 1).triangularView<Eigen::Upper>();
    const double floor = 1e-15 * R_.diagonal().cwiseAbs().maxCoeff();
    for (Index i = 0; i <= N_; ++i)
      if (std::abs(R_(i, i)) < floor)
        R_(i, i) = R_(i, i) < 0.0 ? -floor : floor;
  }

  Vector normal_solve(const Vector &r) const {
    const Vector w = R_.transpose().triangularView<Eigen::Lower>().solve(r);
    return R_.triangularView<Eigen::Upper>().solve(w);
  }

  // Newton direction for complementarity target rc (componentwise x s -> rc + x s).
  void direction(const Vector &rp, const Blocks &rd, const Blocks &rc, const Blocks &D,
                 Blocks &dx, Vector &dy, Blocks &ds) const {
    auto part = [](const Vector &rc_b, const Vector &s_b, const Vector &D_b, const Vector &rd_b) {
      return Vector(rc_b.cwiseQuotient(s_b) - D_b.cwiseProduct(rd_b));
    };
    const Blocks t{part(rc.q, s_.q, D.q, rd.q), part(rc.p, s_.p, D.p, rd.p),
                   part(rc.m, s_.m, D.m, rd.m)};
    const Vector rhs = rp - apply_A(t);
    dy = normal_solve(rhs);
    // Refinement against the exact operator A D A^T.
    for (int sweep = 0; sweep < 3; ++sweep) {
      const Blocks aty = apply_At(dy);
      const Vector residual =
          rhs - apply_A({D.q.cwiseProduct(aty.q), D.p.cwiseProduct(aty.p), D.m.cwiseProduct(aty.m)});
      dy += normal_solve(residual);
    }
    const Blocks aty = apply_At(dy);
    ds = {rd.q - aty.q, rd.p - aty.p, rd.m - aty.m};
    dx = {(rc.q - x_.q.cwiseProduct(ds.q)).cwiseQuotient(s_.q),
          (rc.p - x_.p.cwiseProduct(ds.p)).cwiseQuotient(s_.p),
          (rc.m - x_.m.cwiseProduct(ds.m)).cwiseQuotient(s_.m)};
  }

  static double max_step(const Blocks &v, const Blocks &dv) {
    double alpha = 1.0;
    auto scan = [&](const Vector &a, const Vector &da) {
      for (Index i = 0; i < a.size(); ++i)
        if (da(i) < 0.0)
          alpha = std::min(alpha, -a(i) / da(i));
    };
    scan(v.q, dv.q);
    scan(v.p, dv.p);
    scan(v.m, dv.m);
    return alpha;
  }

  bool step(const Vector &rp, const Blocks &rd, double gap) {
    const double n = static_cast<double>(x_.size());
    const double mu = gap / n;
    const Blocks D{x_.q.cwiseQuotient(s_.q), x_.p.cwiseQuotient(s_.p), x_.m.cwiseQuotient(s_.m)};
    factor(D);

    Blocks rc{-x_.q.cwiseProduct(s_.q), -x_.p.cwiseProduct(s_.p), -x_.m.cwiseProduct(s_.m)};
    Blocks dx, ds;
    Vector dy;
    direction(rp, rd, rc, D, dx, dy, ds);
    const double ap = max_step(x_, dx), ad = max_step(s_, ds);
    Blocks xa{x_.q + ap * dx.q, x_.p + ap * dx.p, x_.m + ap * dx.m};
    Blocks sa{s_.q + ad * ds.q, s_.p + ad * ds.p, s_.m + ad * ds.m};
    const double mu_aff = xa.dot(sa) / n;
    const double sigma = std::pow(mu_aff / mu, 3);

    auto corrected = [&](const Vector &r, const Vector &dxb, const Vector &dsb) {
      return Vector(r.array() + sigma * mu - dxb.array() * dsb.array());
    };
    rc = {corrected(rc.q, dx.q, ds.q), corrected(rc.p, dx.p, ds.p), corrected(rc.m, dx.m, ds.m)};
    direction(rp, rd, rc, D, dx, dy, ds);
    const double alpha_p = std::min(1.0, 0.995 * max_step(x_, dx));
    const double alpha_d = std::min(1.0, 0.995 * max_step(s_, ds));
    if (!(alpha_p > 0.0) && !(alpha_d > 0.0))
      return false;
    x_.q += alpha_p * dx.q;
    x_.p += alpha_p * dx.p;
    x_.m += alpha_p * dx.m;
    y_ += alpha_d * dy;
    s_.q += alpha_d * ds.q;
    s_.p += alpha_d * ds.p;
    s_.m += alpha_d * ds.m;
    return true;
  }

  const Matrix &M_;
  const Vector &z_;
  L1SimplexOptions opt_;
  Index N_, K_;
  Blocks x_, s_;
  Vector y_;
  Matrix R_;
};

} // namespace

L1SimplexResult solve_l1_over_simplex(const Matrix &M, const Vector &z,
                                      const L1SimplexOptions &options) {
  if (M.cols() < 1)
    throw InvalidArgument("solve_l1_over_simplex: need at least one support point");
  if (M.rows() != z.size())
    throw InvalidArgument("solve_l1_over_simplex: M and z disagree in row count");
  if (M.rows() == 0) {
    L1SimplexResult trivial{Vector::Constant(M.cols(), 1.0 / static_cast<double>(M.cols())), 0.0, 0};
    return trivial;
  }
  return InteriorPoint(M, z, options).solve();
}

} // namespace sde
