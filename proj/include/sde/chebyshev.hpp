#pragma once

#include "sde/ledger.hpp"
#include "sde/operators.hpp"
#include "sde/randgen.hpp"

#include <numbers>
#include <span>
#include <vector>

namespace sde {

inline const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
inline const double sqrt_two_over_pi = std::sqrt(2.0 / std::numbers::pi);

/// T_k(x) by the three-term recurrence.
double cheb_eval(int k, double x);

/// T_k normalized to unit norm under the weight 1/sqrt(1-x^2):
/// 1/sqrt(pi) for k = 0, sqrt(2/pi) T_k otherwise.
double cheb_normalized(int k, double x);

/// [Tbar_0(x), ..., Tbar_N(x)].
std::vector<double> cheb_normalized_all(int N, double x);

/// sum_k coefficients[k] T_k(x) by Clenshaw's recurrence.
double clenshaw(std::span<const double> coefficients, double x);

/// Normalized Chebyshev moments tau_1..tau_N of a density on [-1, 1].
/// tau_0 = 1/sqrt(pi) is implicit (unit mass) and never stored.
struct MomentVector {
  std::vector<double> values; ///< values[i - 1] = tau_i
  int hutchinson_vectors = 0;

  int size() const { return static_cast<int>(values.size()); }
  /// 1-based access, i in [1, N].
  double operator()(int i) const { return values.at(static_cast<std::size_t>(i - 1)); }
};

/// g^T Tbar_i(A) g for i = 0..N using u_k = 2 A u_{k-1} - u_{k-2}. The
/// caller guarantees ||A||_2 <= 1. Charges exactly N units.
std::vector<double> cheb_moment_quadratic_form(const SymmetricOperator &op,
                                               const Vector &g, int N,
                                               BudgetLedger &ledger,
                                               const std::string &stage = stage::moments);

/// Hutchinson estimate tau~_i = (1/b) sum_j g_j^T Tbar_i(A) g_j with g_j
/// uniform on the unit sphere. Charges exactly N * b units.
MomentVector estimate_moments(const SymmetricOperator &op, int N, int b,
                              SeededStream &stream, BudgetLedger &ledger,
                              const std::string &stage = stage::moments);

/// Removes the s zero eigenvalues introduced by deflation:
/// tau^_i = (n tau~_i - s Tbar_i(0)) / (n - s).
MomentVector adjust_moments_for_deflation(const MomentVector &moments, Index n,
                                          Index s);

/// Exact normalized moments (1/n) sum_j Tbar_i(lambda_j), i = 1..N.
MomentVector exact_moments(std::span<const double> eigenvalues, int N);

} // namespace sde
