#include "sde/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sde {

std::vector<Index> magnitude_order(const Vector &values) {
  std::vector<Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    const double ma = std::abs(values(a)), mb = std::abs(values(b));
    if (ma != mb)
      return ma > mb;
    return values(a) > values(b);
  });
  return idx;
}

TridiagonalEigen tridiagonal_eigen(std::span<const double> diagonal,
                                   std::span<const double> off_diagonal,
                                   std::vector<Index> rows) {
  const Index n = static_cast<Index>(diagonal.size());
  if (n == 0)
    throw InvalidArgument("tridiagonal_eigen: empty matrix");
  if (static_cast<Index>(off_diagonal.size()) != n - 1)
    throw InvalidArgument("tridiagonal_eigen: off-diagonal must have n-1 entries");
  if (rows.empty()) {
    rows.resize(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Index{0});
  }
  const Index k = static_cast<Index>(rows.size());

  std::vector<double> d(diagonal.begin(), diagonal.end());
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  std::copy(off_diagonal.begin(), off_diagonal.end(), e.begin());

  Matrix z = Matrix::Zero(k, n);
  for (Index r = 0; r < k; ++r) {
    if (rows[r] < 0 || rows[r] >= n)
      throw InvalidArgument("tridiagonal_eigen: row index out of range");
    z(r, rows[r]) = 1.0;
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_sweeps = 60;
  for (Index l = 0; l < n; ++l) {
    int iter = 0;
    Index m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd)
          break;
      }
      if (m == l)
        break;
      if (iter++ == max_sweeps)
        throw ConvergenceError("tridiagonal_eigen: QL iteration did not converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      Index i;
      bool deflated_early = false;
      for (i = m - 1; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated_early = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        for (Index row = 0; row < k; ++row) {
          f = z(row, i + 1);
          z(row, i + 1) = s * z(row, i) + c * f;
          z(row, i) = c * z(row, i) - s * f;
        }
      }
      if (deflated_early)
        continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }

  Vector raw = Eigen::Map<const Vector>(d.data(), n);
  std::vector<Index> ascending(static_cast<std::size_t>(n));
  std::iota(ascending.begin(), ascending.end(), Index{0});
  std::stable_sort(ascending.begin(), ascending.end(),
                   [&](Index a, Index b) { return raw(a) < raw(b); });
  std::vector<Index> rank(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j)
    rank[ascending[j]] = j;

  const std::vector<Index> sorted = magnitude_order(raw);
  TridiagonalEigen out;
  out.values.resize(n);
  out.vectors.resize(k, n);
  out.order.resize(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    out.values(j) = raw(sorted[j]);
    out.vectors.col(j) = z.col(sorted[j]);
    out.order[j] = rank[sorted[j]];
  }
  // Fix each eigenvector's sign so that its first requested component is
  // nonnegative; makes results independent of rotation history.
  for (Index j = 0; j < n; ++j) {
    Index pivot = 0;
    while (pivot < k && out.vectors(pivot, j) == 0.0)
      ++pivot;
    if (pivot < k && out.vectors(pivot, j) < 0.0)
      out.vectors.col(j) = -out.vectors.col(j);
  }
  out.rows = std::move(rows);
  return out;
}

} // namespace sde
