#include "sde/sde.hpp"

#include "sde/chebyshev.hpp"
#include "sde/lanczos.hpp"
#include "sde/moment_matching.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sde {

namespace {

bool is_moment_method(Algorithm a) {
  return a == Algorithm::cmm || a == Algorithm::kpm || a == Algorithm::def_cmm ||
         a == Algorithm::def_kpm;
}

bool is_deflated(Algorithm a) { return a == Algorithm::def_cmm || a == Algorithm::def_kpm; }

std::string consumption_report(const BudgetLedger &ledger, std::uint64_t budget) {
  std::ostringstream out;
  out << "budget " << budget << " exhausted before moment estimation; consumed";
  for (const auto &[stage, count] : ledger.counts())
    out << ' ' << stage << '=' << count;
  out << " (total " << ledger.total() << ')';
  return out.str();
}

// With full reorthogonalization the Lanczos residual estimate tracks the
// explicit residual closely, so only predicted passes are tested.
constexpr double kPrescreenSlack = 1.0;

/// Ritz positions among the top l that pass the weight gate and whose
/// Lanczos residual estimate is within `slack` of the threshold.
std::vector<Index> vr_candidates(const TridiagonalEigen &eig, double residual_norm,
                                 Index steps, Index n, Index l,
                                 const VrSlqOptions &options, double slack) {
  std::vector<Index> out;
  if (eig.values.size() == 0)
    return out;
  const double norm_est = std::abs(eig.values(0));
  const double threshold = norm_est / std::pow(static_cast<double>(n), options.beta);
  const double weight_gate =
      options.C * std::sqrt(std::log(static_cast<double>(l) / options.delta)) /
      static_cast<double>(n);
  const Index last_row = eig.rows.size() > 1 ? 1 : 0;
  (void)steps;
  const Index count = std::min<Index>(l, eig.values.size());
  for (Index j = 0; j < count; ++j) {
    const double w = eig.vectors(0, j);
    if (w * w > weight_gate)
      continue;
    if (residual_norm * std::abs(eig.vectors(last_row, j)) > slack * threshold)
      continue;
    out.push_back(j);
  }
  return out;
}

TridiagonalEigen edge_rows_eigen(const LanczosProcess &process) {
  std::vector<Index> rows{0};
  if (process.steps() > 1)
    rows.push_back(process.steps() - 1);
  return tridiagonal_eigen(process.alpha(), process.eta(), rows);
}

/// Explicit residual tests on `candidates` and assembly of the VR-SLQ
/// density. `max_tests` bounds the number of charged tests.
VrSlqResult finish_vr_slq(const SymmetricOperator &op, const LanczosProcess &process,
                          Index l, const VrSlqOptions &options, Index max_tests,
                          BudgetLedger &ledger) {
  const Index n = op.dimension();
  const TridiagonalFactorization fact = process.factorization();
  const RitzDecomposition ritz = tridiag_eig(fact);
  const Index m = ritz.values.size();

  TridiagonalEigen edges;
  edges.values = ritz.values;
  edges.rows = {0, m - 1};
  edges.vectors.resize(2, m);
  edges.vectors.row(0) = ritz.vectors.row(0);
  edges.vectors.row(1) = ritz.vectors.row(m - 1);
  std::vector<Index> candidates =
      vr_candidates(edges, fact.residual_norm, m, n, l, options, kPrescreenSlack);
  if (static_cast<Index>(candidates.size()) > max_tests)
    candidates.resize(static_cast<std::size_t>(std::max<Index>(max_tests, 0)));

  const double threshold =
      std::abs(ritz.values(0)) / std::pow(static_cast<double>(n), options.beta);
  MeteredOperator metered(op, ledger, stage::residual_tests);
  VrSlqResult result;
  result.steps = m;
  std::vector<bool> in_s(static_cast<std::size_t>(m), false);
  for (Index j : candidates) {
    Vector y = fact.Q * ritz.vectors.col(j);
    y.normalize();
    const Vector Ay = metered(y);
    ++result.tested;
    if ((Ay - ritz.values(j) * y).norm() <= threshold) {
      result.gated.push_back(j);
      in_s[static_cast<std::size_t>(j)] = true;
    }
  }

  const double nd = static_cast<double>(n);
  const Index s = static_cast<Index>(result.gated.size());
  double rest_weight = 0.0;
  Index rest_count = 0;
  for (Index j = 0; j < m; ++j)
    if (!in_s[static_cast<std::size_t>(j)]) {
      rest_weight += ritz.weights(j);
      ++rest_count;
    }
  const double rest_mass = 1.0 - static_cast<double>(s) / nd;
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    const double x = ritz.values(j);
    if (in_s[static_cast<std::size_t>(j)]) {
      atoms.push_back({x, rest_count == 0 ? 1.0 / static_cast<double>(s) : 1.0 / nd});
    } else if (rest_weight > 0.0) {
      atoms.push_back({x, rest_mass * ritz.weights(j) / rest_weight});
    } else {
      atoms.push_back({x, rest_mass / static_cast<double>(rest_count)});
    }
  }
  result.density = DiscreteDistribution(std::move(atoms));
  return result;
}

DiscreteDistribution combine_deflated(const DiscreteDistribution &q1,
                                      const DiscreteDistribution &q2, Index s, Index n) {
  const double nd = static_cast<double>(n);
  if (s == 0)
    return q2;
  return q1.reweighted(static_cast<double>(s) / nd)
      .combined_with(q2.reweighted(static_cast<double>(n - s) / nd));
}

} // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
  case Algorithm::cmm: return "cmm";
  case Algorithm::kpm: return "kpm";
  case Algorithm::def_cmm: return "def_cmm";
  case Algorithm::def_kpm: return "def_kpm";
  case Algorithm::slq: return "slq";
  case Algorithm::vr_slq: return "vr_slq";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string &name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '-', '_');
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Algorithm a : all_algorithms())
    if (to_string(a) == key)
      return a;
  throw InvalidArgument("unknown algorithm '" + name + "'");
}

const std::vector<Algorithm> &all_algorithms() {
  static const std::vector<Algorithm> all{Algorithm::cmm,     Algorithm::kpm,
                                          Algorithm::def_cmm, Algorithm::def_kpm,
                                          Algorithm::slq,     Algorithm::vr_slq};
  return all;
}

int SdeConfig::effective_trials() const {
  if (trials)
    return *trials;
  return algorithm == Algorithm::slq || algorithm == Algorithm::vr_slq ? 15 : 1;
}

void SdeConfig::validate() const {
  if (budget < 1)
    throw InvalidArgument("budget must be at least 1");
  if (effective_trials() < 1)
    throw InvalidArgument("trials must be at least 1");
  if (deflation_block && *deflation_block < 0)
    throw InvalidArgument("deflation block size must be nonnegative");
  if (krylov_depth < 0)
    throw InvalidArgument("Krylov depth must be nonnegative");
  if (grid < 1)
    throw InvalidArgument("grid resolution must be positive");
  if (hutchinson_vectors < 1)
    throw InvalidArgument("need at least one Hutchinson vector");
  if (moment_count && *moment_count < 1)
    throw InvalidArgument("moment count must be positive");
  if (!(krylov_fraction >= 0.0 && krylov_fraction < 1.0))
    throw InvalidArgument("Krylov fraction must lie in [0, 1)");
  if (!(beta > 0.0) || !(vr_C > 0.0) || !(vr_delta > 0.0 && vr_delta < 1.0))
    throw InvalidArgument("VR-SLQ constants out of range");
  if (vr_max_tested < 1)
    throw InvalidArgument("VR-SLQ test cap must be positive");
}

DiscreteDistribution slq(const SymmetricOperator &op, Index m, SeededStream &stream,
                         BudgetLedger &ledger) {
  const Index n = op.dimension();
  if (m < 1 || m > n)
    throw InvalidArgument("slq: m must lie in [1, n]");
  return slq(op, unit_sphere_vector(n, stream), m, ledger);
}

DiscreteDistribution slq(const SymmetricOperator &op, const Vector &g, Index m,
                         BudgetLedger &ledger) {
  LanczosProcess process(op, g, m, true, ledger);
  while (process.step()) {
  }
  const TridiagonalEigen eig = tridiagonal_eigen(process.alpha(), process.eta(), {0});
  std::vector<Atom> atoms(static_cast<std::size_t>(eig.values.size()));
  double total = 0.0;
  for (Index j = 0; j < eig.values.size(); ++j) {
    const double w = eig.vectors(0, j) * eig.vectors(0, j);
    atoms[static_cast<std::size_t>(j)] = {eig.values(j), w};
    total += w;
  }
  // Squares of a unit vector's entries; remove rounding drift.
  for (Atom &a : atoms)
    a.weight /= total;
  return DiscreteDistribution(std::move(atoms));
}

VrSlqResult vr_slq(const SymmetricOperator &op, Index m, const VrSlqOptions &options,
                   SeededStream &stream, BudgetLedger &ledger) {
  const Index n = op.dimension();
  if (m < 1 || m > n)
    throw InvalidArgument("vr_slq: m must lie in [1, n]");
  if (options.l < 1 || options.l > m)
    throw InvalidArgument("vr_slq: l must lie in [1, m]");
  const Vector g = unit_sphere_vector(n, stream);
  LanczosProcess process(op, g, m, true, ledger);
  while (process.step()) {
  }
  return finish_vr_slq(op, process, std::min(options.l, process.steps()), options,
                       options.l, ledger);
}

VrSlqResult vr_slq_budgeted(const SymmetricOperator &op, Index p, Index max_tested,
                            const VrSlqOptions &options, SeededStream &stream,
                            BudgetLedger &ledger) {
  const Index n = op.dimension();
  if (p < 1)
    throw InvalidArgument("vr_slq: budget must be positive");
  if (max_tested < 1)
    throw InvalidArgument("vr_slq: test cap must be positive");
  const Vector g = unit_sphere_vector(n, stream);
  const Index capacity = std::min(n, p);
  const Index l_cap = std::min(max_tested, std::max<Index>(p / 2, 1));
  LanczosProcess process(op, g, capacity, true, ledger);
  auto l_at = [&](Index steps) { return std::clamp<Index>(steps / 2, 1, max_tested); };
  while (process.step()) {
    const Index i = process.steps();
    if (i < p - l_cap || !process.can_step())
      continue;
    const TridiagonalEigen eig = edge_rows_eigen(process);
    const auto candidates =
        vr_candidates(eig, process.residual_norm(), i, n, l_at(i), options, kPrescreenSlack);
    if (i + static_cast<Index>(candidates.size()) >= p)
      break;
  }
  const Index steps = process.steps();
  return finish_vr_slq(op, process, l_at(steps), options,
                       static_cast<Index>(p) - steps, ledger);
}

Index choose_deflation_block(Index n, Index depth, std::uint64_t allowance) {
  const Index norm_cost = norm_estimate_iterations(n);
  Index best = 0;
  for (Index l = 1; l <= n; ++l) {
    const Index cost = norm_cost + l * (2 * depth + 1) + std::min(n, l * (depth + 1));
    if (static_cast<std::uint64_t>(cost) > allowance)
      break;
    best = l;
  }
  return best;
}

SdeEstimate moment_method(const SymmetricOperator &op, const SdeConfig &config,
                          SeededStream &stream) {
  config.validate();
  if (!is_moment_method(config.algorithm))
    throw InvalidArgument("moment_method: algorithm " + to_string(config.algorithm) +
                          " does not use Chebyshev moments");
  const Index n = op.dimension();
  const std::uint64_t budget = config.budget;
  SdeEstimate estimate;
  BudgetLedger &ledger = estimate.ledger;
  RunDiagnostics diag;
  diag.budget = budget;

  const bool deflated = is_deflated(config.algorithm);
  DeflationResult deflation;
  if (deflated) {
    const auto allowance = static_cast<std::uint64_t>(
        std::floor(config.krylov_fraction * static_cast<double>(budget)));
    diag.deflation_block = config.deflation_block
                               ? std::min(*config.deflation_block, n)
                               : choose_deflation_block(n, config.krylov_depth, allowance);
    if (diag.deflation_block > 0) {
      SeededStream krylov_stream = stream.substream(1);
      BlockKrylovOptions options{diag.deflation_block, config.krylov_depth, config.beta};
      deflation = block_krylov_deflation(op, options, krylov_stream, ledger);
      if (ledger.total() > budget)
        throw BudgetExhausted(consumption_report(ledger, budget));
    }
  }
  const Index s = deflation.s;
  diag.deflated = s;
  const DiscreteDistribution q1 =
      s > 0 ? DiscreteDistribution::uniform({deflation.lambdas.data(),
                                             static_cast<std::size_t>(s)})
            : DiscreteDistribution();

  if (s == n) {
    estimate.density = q1;
    estimate.runs.push_back(diag);
    return estimate;
  }

  OperatorPtr target = borrow(op);
  if (s > 0)
    target = std::make_shared<DeflatedOperator>(target, deflation.Z);
  SeededStream norm_stream = stream.substream(2);
  const double L = spectral_norm_upper_bound(
      *target, norm_stream, ledger, deflated ? stage::deflated_norm : stage::norm_estimate);
  diag.scale = L;

  DiscreteDistribution q2 = DiscreteDistribution::point(0.0);
  if (L > 0.0) {
    const std::uint64_t used = ledger.total();
    const std::uint64_t remaining = budget > used ? budget - used : 0;
    const int b = config.hutchinson_vectors;
    const auto affordable = static_cast<std::int64_t>(remaining / static_cast<std::uint64_t>(b));
    int N = static_cast<int>(std::min<std::int64_t>(affordable, 1 << 20));
    if (config.moment_count) {
      if (*config.moment_count > N)
        throw BudgetExhausted(consumption_report(ledger, budget));
      N = *config.moment_count;
    }
    if (N < 1)
      throw BudgetExhausted(consumption_report(ledger, budget));
    diag.moments = N;

    const ScaledOperator scaled(target, 1.0 / L);
    SeededStream moment_stream = stream.substream(3);
    MomentVector moments = estimate_moments(scaled, N, b, moment_stream, ledger);
    if (s > 0)
      moments = adjust_moments_for_deflation(moments, n, s);
    const Index d = std::max<Index>(config.grid, N);
    const bool cmm = config.algorithm == Algorithm::cmm || config.algorithm == Algorithm::def_cmm;
    const GridDensity grid_density =
        cmm ? solve_moment_matching(moments, d).density : kpm_density(moments, d);
    q2 = rescale_density(grid_density, L);
  }
  estimate.density = combine_deflated(q1, q2, s, n);
  estimate.runs.push_back(diag);
  return estimate;
}

SdeEstimate sde_with_deflation(const SymmetricOperator &op, const SdeConfig &config) {
  if (!is_deflated(config.algorithm))
    throw InvalidArgument("sde_with_deflation: algorithm must be def_cmm or def_kpm");
  return estimate_density(op, config);
}

SdeEstimate estimate_density(const SymmetricOperator &op, const SdeConfig &config) {
  config.validate();
  const Index n = op.dimension();
  const int trials = config.effective_trials();
  const std::uint64_t per_run = config.budget / static_cast<std::uint64_t>(trials);
  if (per_run < 1)
    throw BudgetExhausted("budget " + std::to_string(config.budget) + " is smaller than the " +
                          std::to_string(trials) + " runs it must cover");

  SdeEstimate result;
  std::vector<DiscreteDistribution> densities;
  densities.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    SeededStream stream(config.seed, static_cast<std::uint64_t>(t) + 1);
    SdeEstimate run;
    RunDiagnostics diag;
    diag.budget = per_run;
    switch (config.algorithm) {
    case Algorithm::slq: {
      const Index m = std::min<Index>(n, static_cast<Index>(per_run));
      run.density = slq(op, m, stream, run.ledger);
      diag.lanczos_steps = static_cast<Index>(run.ledger.count(stage::lanczos));
      run.runs.push_back(diag);
      break;
    }
    case Algorithm::vr_slq: {
      VrSlqOptions options{1, config.beta, config.vr_C, config.vr_delta};
      VrSlqResult vr = vr_slq_budgeted(op, static_cast<Index>(per_run), config.vr_max_tested,
                                       options, stream, run.ledger);
      run.density = std::move(vr.density);
      diag.lanczos_steps = vr.steps;
      diag.gated = static_cast<Index>(vr.gated.size());
      diag.tested = vr.tested;
      run.runs.push_back(diag);
      break;
    }
    default: {
      SdeConfig single = config;
      single.budget = per_run;
      single.trials = 1;
      run = moment_method(op, single, stream);
      break;
    }
    }
    if (run.ledger.total() > per_run)
      throw Error("internal error: " + to_string(config.algorithm) + " used " +
                  std::to_string(run.ledger.total()) + " products with a budget of " +
                  std::to_string(per_run));
    densities.push_back(std::move(run.density));
    result.ledger.merge(run.ledger);
    result.runs.insert(result.runs.end(), run.runs.begin(), run.runs.end());
  }
  result.density = average_densities(densities);
  if (result.ledger.total() > config.budget)
    throw Error("internal error: budget ceiling exceeded");
  return result;
}

DiscreteDistribution average_densities(const std::vector<DiscreteDistribution> &densities) {
  if (densities.empty())
    throw InvalidArgument("average_densities: empty list");
  if (densities.size() == 1)
    return densities.front();
  const double factor = 1.0 / static_cast<double>(densities.size());
  DiscreteDistribution out;
  for (const auto &d : densities)
    out = out.combined_with(d.reweighted(factor));
  return out.merged();
}

Schatten1Result schatten1_estimate(const SymmetricOperator &op, double eps,
                                   std::uint64_t seed, Index grid) {
  if (!(eps > 0.0 && eps < 1.0))
    throw InvalidArgument("schatten1_estimate: eps must lie in (0, 1)");
  const Index n = op.dimension();
  const double root_n = std::sqrt(static_cast<double>(n));
  Schatten1Result result;
  const auto wanted = static_cast<Index>(std::ceil(root_n / eps));
  result.clamped = wanted > n;
  result.deflation_block = std::min(wanted, n);

  SdeConfig config;
  config.algorithm = Algorithm::def_cmm;
  config.trials = 1;
  config.deflation_block = result.deflation_block;
  config.krylov_depth = default_krylov_depth(n);
  config.moment_count = static_cast<int>(std::ceil(root_n));
  config.grid = std::max<Index>(grid, *config.moment_count);
  config.seed = seed;
  const Index l = result.deflation_block;
  const Index q = config.krylov_depth;
  config.budget = static_cast<std::uint64_t>(
      2 * norm_estimate_iterations(n) + l * (2 * q + 1) + std::min(n, l * (q + 1)) +
      static_cast<Index>(*config.moment_count) * config.hutchinson_vectors);

  result.estimate = estimate_density(op, config);
  double total = 0.0;
  for (const Atom &a : result.estimate.density.atoms())
    total += std::abs(a.location) * a.weight;
  result.value = static_cast<double>(n) * total;
  return result;
}

} // namespace sde
