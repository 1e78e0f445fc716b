#include "sde/chebyshev.hpp"

#include <cmath>

namespace sde {

double cheb_eval(int k, double x) {
  if (k < 0)
    throw InvalidArgument("cheb_eval: degree must be nonnegative");
  if (k == 0)
    return 1.0;
  double prev = 1.0, cur = x;
  for (int j = 2; j <= k; ++j) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double cheb_normalized(int k, double x) {
  if (k == 0)
    return inv_sqrt_pi;
  return sqrt_two_over_pi * cheb_eval(k, x);
}

std::vector<double> cheb_normalized_all(int N, double x) {
  if (N < 0)
    throw InvalidArgument("cheb_normalized_all: N must be nonnegative");
  std::vector<double> out(static_cast<std::size_t>(N) + 1);
  double prev = 1.0, cur = x;
  out[0] = inv_sqrt_pi;
  for (int k = 1; k <= N; ++k) {
    if (k >= 2) {
      const double next = 2.0 * x * cur - prev;
      prev = cur;
      cur = next;
    }
    out[static_cast<std::size_t>(k)] = sqrt_two_over_pi * cur;
  }
  return out;
}

double clenshaw(std::span<const double> coefficients, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = coefficients.size(); k-- > 1;) {
    const double b0 = coefficients[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  const double c0 = coefficients.empty() ? 0.0 : coefficients[0];
  return c0 + x * b1 - b2;
}

std::vector<double> cheb_moment_quadratic_form(const SymmetricOperator &op,
                                               const Vector &g, int N,
                                               BudgetLedger &ledger,
                                               const std::string &stage) {
  if (N < 0)
    throw InvalidArgument("cheb_moment_quadratic_form: N must be nonnegative");
  MeteredOperator metered(op, ledger, stage);
  std::vector<double> forms(static_cast<std::size_t>(N) + 1);
  forms[0] = inv_sqrt_pi * g.squaredNorm();
  if (N == 0)
    return forms;
  Vector prev = g;
  Vector cur = metered(g);
  forms[1] = sqrt_two_over_pi * g.dot(cur);
  Vector next;
  for (int k = 2; k <= N; ++k) {
    metered.apply_into(cur, next);
    next = 2.0 * next - prev;
    forms[static_cast<std::size_t>(k)] = sqrt_two_over_pi * g.dot(next);
    prev.swap(cur);
    cur.swap(next);
  }
  return forms;
}

MomentVector estimate_moments(const SymmetricOperator &op, int N, int b,
                              SeededStream &stream, BudgetLedger &ledger,
                              const std::string &stage) {
  if (b < 1)
    throw InvalidArgument("estimate_moments: need at least one Hutchinson vector");
  if (N < 0)
    throw InvalidArgument("estimate_moments: N must be nonnegative");
  MomentVector out;
  out.hutchinson_vectors = b;
  out.values.assign(static_cast<std::size_t>(N), 0.0);
  for (int j = 0; j < b; ++j) {
    const Vector g = unit_sphere_vector(op.dimension(), stream);
    const std::vector<double> forms = cheb_moment_quadratic_form(op, g, N, ledger, stage);
    for (int i = 1; i <= N; ++i)
      out.values[static_cast<std::size_t>(i - 1)] += forms[static_cast<std::size_t>(i)];
  }
  for (double &v : out.values)
    v /= b;
  return out;
}

MomentVector adjust_moments_for_deflation(const MomentVector &moments, Index n,
                                          Index s) {
  if (s < 0 || s >= n)
    throw InvalidArgument("adjust_moments_for_deflation: need 0 <= s < n");
  MomentVector out = moments;
  if (s == 0)
    return out;
  const double nd = static_cast<double>(n), sd = static_cast<double>(s);
  for (int i = 1; i <= moments.size(); ++i)
    out.values[static_cast<std::size_t>(i - 1)] =
        (nd * moments(i) - sd * cheb_normalized(i, 0.0)) / (nd - sd);
  return out;
}

MomentVector exact_moments(std::span<const double> eigenvalues, int N) {
  MomentVector out;
  out.values.assign(static_cast<std::size_t>(N), 0.0);
  for (double lambda : eigenvalues) {
    const std::vector<double> t = cheb_normalized_all(N, lambda);
    for (int i = 1; i <= N; ++i)
      out.values[static_cast<std::size_t>(i - 1)] += t[static_cast<std::size_t>(i)];
  }
  for (double &v : out.values)
    v /= static_cast<double>(eigenvalues.size());
  return out;
}

} // namespace sde
