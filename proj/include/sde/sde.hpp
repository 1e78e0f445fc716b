#pragma once

#include "sde/block_krylov.hpp"
#include "sde/distribution.hpp"
#include "sde/ledger.hpp"
#include "sde/operators.hpp"
#include "sde/randgen.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sde {

enum class Algorithm { cmm, kpm, def_cmm, def_kpm, slq, vr_slq };

std::string to_string(Algorithm algorithm);
/// Accepts the names printed by to_string, plus "def-cmm" style dashes.
Algorithm parse_algorithm(const std::string &name);
const std::vector<Algorithm> &all_algorithms();

struct SdeConfig {
  Algorithm algorithm = Algorithm::slq;
  /// Total operator applications over all averaged runs.
  std::uint64_t budget = 0;
  /// Number of independent runs averaged into one estimate; each receives
  /// budget / trials. Unset means 15 for slq and vr_slq and 1 otherwise.
  std::optional<int> trials;
  /// Block size l of the Krylov deflation. Unset means the largest l whose
  /// Krylov stage fits in `krylov_fraction` of the run budget.
  std::optional<Index> deflation_block;
  Index krylov_depth = 15;
  double beta = 2.0;
  Index grid = 20000;
  int hutchinson_vectors = 15;
  /// Number of Chebyshev moments N. Unset means (remaining budget) / b.
  std::optional<int> moment_count;
  double krylov_fraction = 0.75;
  /// VR-SLQ gate constants and cap on the number of tested Ritz pairs.
  double vr_C = 5.0;
  double vr_delta = 0.01;
  Index vr_max_tested = 100;
  std::uint64_t seed = 0;

  int effective_trials() const;
  /// Throws InvalidArgument on budget 0, trials < 1, negative l, grid < 1
  /// and similar.
  void validate() const;
};

/// Per-run report.
struct RunDiagnostics {
  std::uint64_t budget = 0;
  Index deflation_block = 0;   ///< l
  Index deflated = 0;          ///< s, converged Ritz pairs removed
  double scale = 0.0;          ///< L used to map the spectrum into [-1, 1]
  int moments = 0;             ///< N
  Index lanczos_steps = 0;     ///< m
  Index gated = 0;             ///< |S| in VR-SLQ
  Index tested = 0;            ///< explicit residual tests in VR-SLQ
};

struct SdeEstimate {
  DiscreteDistribution density;
  BudgetLedger ledger;
  std::vector<RunDiagnostics> runs;
};

/// Stochastic Lanczos quadrature: m Lanczos steps (full reorthogonalization)
/// from a uniform unit vector; atoms at the Ritz values with weights
/// (v_j^T e_1)^2. Charges exactly the steps performed (m unless the Krylov
/// space is exhausted earlier).
DiscreteDistribution slq(const SymmetricOperator &op, Index m, SeededStream &stream,
                         BudgetLedger &ledger);

/// SLQ from a given unit start vector g.
DiscreteDistribution slq(const SymmetricOperator &op, const Vector &g, Index m,
                         BudgetLedger &ledger);

struct VrSlqOptions {
  Index l = 1;         ///< number of top-magnitude Ritz pairs eligible for gating
  double beta = 2.0;   ///< residual threshold ||A||_est / n^beta
  double C = 5.0;      ///< weight gate C sqrt(log(l / delta)) / n
  double delta = 0.01;
};

struct VrSlqResult {
  DiscreteDistribution density;
  std::vector<Index> gated; ///< positions (descending magnitude) admitted to S
  Index tested = 0;         ///< residual tests performed, one product each
  Index steps = 0;          ///< Lanczos steps performed
};

/// Variance-reduced SLQ with m Lanczos steps. For each of the top l Ritz
/// pairs passing the weight gate, the residual ||A Q v_j - lambda_j Q v_j|| is
/// computed with one charged product (pairs whose Lanczos residual estimate
/// is more than 10x above the threshold are rejected without a test). Pairs
/// passing both gates get weight exactly 1/n; the remaining mass
/// 1 - |S|/n is spread over the other Ritz values in proportion to their
/// quadrature weights. ||A||_est is the largest Ritz magnitude.
/// Requires 1 <= l <= m <= n. Charges m + tested.
VrSlqResult vr_slq(const SymmetricOperator &op, Index m, const VrSlqOptions &options,
                   SeededStream &stream, BudgetLedger &ledger);

/// VR-SLQ under a total allowance p covering both Lanczos steps and
/// residual tests: Lanczos advances while steps + candidate tests < p, with
/// l = min(steps / 2, max_tested) at each point. Charges at most p.
VrSlqResult vr_slq_budgeted(const SymmetricOperator &op, Index p, Index max_tested,
                            const VrSlqOptions &options, SeededStream &stream,
                            BudgetLedger &ledger);

/// Deflation block size for a Krylov allowance: the largest l with
/// norm cost + l(2q+1) + min(n, l(q+1)) <= allowance, or 0 if none fits.
Index choose_deflation_block(Index n, Index depth, std::uint64_t allowance);

/// One run of CMM, KPM, def-CMM or def-KPM with budget config.budget.
/// Throws BudgetExhausted (with per-stage consumption) when nothing is left
/// for moment estimation.
SdeEstimate moment_method(const SymmetricOperator &op, const SdeConfig &config,
                          SeededStream &stream);

/// Deflated spectral density estimation (def_cmm or def_kpm), averaged over
/// config.effective_trials() runs.
SdeEstimate sde_with_deflation(const SymmetricOperator &op, const SdeConfig &config);

/// Any algorithm, averaged over config.effective_trials() independent runs.
/// Run t draws from SeededStream(config.seed, t + 1), so different
/// algorithms see the same random vectors in the same run. Asserts that the
/// ledger total never exceeds config.budget.
SdeEstimate estimate_density(const SymmetricOperator &op, const SdeConfig &config);

/// Union of the atoms with weights divided by the number of inputs.
DiscreteDistribution average_densities(const std::vector<DiscreteDistribution> &densities);

struct Schatten1Result {
  double value = 0.0;
  SdeEstimate estimate;
  Index deflation_block = 0;
  bool clamped = false; ///< ceil(sqrt(n) / eps) exceeded n and was clamped
};

/// Schatten-1 norm n * sum |x| q(x) from a single def-CMM run with
/// l = ceil(sqrt(n) / eps) and N = ceil(sqrt(n)) moments; the budget is
/// exactly what those parameters require. Requires 0 < eps < 1.
Schatten1Result schatten1_estimate(const SymmetricOperator &op, double eps,
                                   std::uint64_t seed, Index grid = 2000);

} // namespace sde
