#include "sde/lanczos.hpp"
#include "sde/operators.hpp"
#include "sde/randgen.hpp"

#include <cmath>

namespace sde {

Index norm_estimate_iterations(Index n) {
  const auto k = static_cast<Index>(std::ceil(2.0 * std::log2(static_cast<double>(n) + 2.0)));
  return std::min(n, std::max<Index>(k, 1));
}

double spectral_norm_upper_bound(const SymmetricOperator &op, SeededStream &stream,
                                 BudgetLedger &ledger, const std::string &stage) {
  const Index n = op.dimension();
  if (n < 1)
    throw InvalidArgument("spectral_norm_upper_bound: empty operator");
  const Vector start = unit_sphere_vector(n, stream);
  TridiagonalFactorization f =
      lanczos(op, start, norm_estimate_iterations(n), true, ledger, stage);
  if (f.m_effective == 1 && f.alpha(0) == 0.0 && f.residual_norm == 0.0)
    return 0.0;
  TridiagonalEigen eig = tridiagonal_eigen(
      std::span<const double>(f.alpha.data(), f.alpha.size()),
      std::span<const double>(f.eta.data(), f.eta.size()), {0});
  return 2.0 * std::abs(eig.values(0));
}

} // namespace sde
