#include "doctest.h"
#include "oracles.hpp"

#include "sde/metrics.hpp"
#include "sde/moment_matching.hpp"
#include "sde/randgen.hpp"

using namespace sde;

namespace {

void check_simplex(const GridDensity &q) {
  CHECK(q.weights.size() == q.d + 1);
  CHECK(q.weights.minCoeff() >= 0.0);
  CHECK(std::abs(q.weights.sum() - 1.0) <= 1e-9);
}

MomentVector moments_of(const std::vector<double> &locations,
                        const std::vector<double> &weights, int N) {
  MomentVector m;
  m.values.assign(static_cast<std::size_t>(N), 0.0);
  for (std::size_t k = 0; k < locations.size(); ++k)
    for (int i = 1; i <= N; ++i)
      m.values[static_cast<std::size_t>(i - 1)] += weights[k] * cheb_normalized(i, locations[k]);
  return m;
}

} // namespace

TEST_CASE("moment matrix entries and row bound") {
  const Matrix M = moment_matrix(6, 50);
  CHECK(M.rows() == 6);
  CHECK(M.cols() == 51);
  for (int i = 1; i <= 6; ++i) {
    CHECK(M.row(i - 1).cwiseAbs().maxCoeff() <= sqrt_two_over_pi / i + 1e-15);
    CHECK(M(i - 1, 10) == doctest::Approx(cheb_normalized(i, -1.0 + 2.0 * 10 / 50) / i));
  }
}

TEST_CASE("grid atom at zero is recovered") {
  const Index d = 64;
  const int N = 10;
  const MomentVector m = moments_of({0.0}, {1.0}, N);
  const auto sol = solve_moment_matching(m, d);
  check_simplex(sol.density);
  CHECK(sol.objective <= 1e-7);
  CHECK(wasserstein1(sol.density.to_distribution(), DiscreteDistribution::point(0.0)) <=
        2.0 / d + 1e-6);
}

TEST_CASE("zero moments with N = 1") {
  MomentVector m;
  m.values = {0.0};
  const auto sol = solve_moment_matching(m, 16);
  check_simplex(sol.density);
  double first = 0.0;
  for (Index j = 0; j <= 16; ++j)
    first += sol.density.weights(j) * cheb_normalized(1, sol.density.support(j));
  CHECK(std::abs(first) <= 1e-7);
}

TEST_CASE("exact moments of a diagonal spectrum") {
  const Index n = 64;
  const int N = 30;
  SeededStream s(8, 0);
  std::vector<double> ev(n);
  for (double &x : ev)
    x = s.uniform(-1.0, 1.0);
  const MomentVector m = exact_moments(ev, N);
  const auto sol = solve_moment_matching(m, 2048);
  check_simplex(sol.density);
  const double w1 = wasserstein1(sol.density.to_distribution(),
                                 DiscreteDistribution::uniform(ev).merged());
  CHECK(w1 <= 40.0 / N);
  CHECK(w1 <= 0.1);
}

TEST_CASE("small instances match exhaustive vertex enumeration") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SeededStream s(seed, 5);
    const Index d = 2 + static_cast<Index>(s.uniform() * 7.0);
    const int N = 1 + static_cast<int>(s.uniform() * 3.0);
    if (d < N)
      continue;
    MomentVector m;
    for (int i = 0; i < N; ++i)
      m.values.push_back(s.uniform(-0.9, 0.9));
    const auto sol = solve_moment_matching(m, d);
    check_simplex(sol.density);
    Vector z(N);
    for (int i = 1; i <= N; ++i)
      z(i - 1) = m(i) / i;
    const double best = oracle::moment_lp_by_vertices(moment_matrix(N, d), z);
    CHECK(std::abs(sol.objective - best) <= 1e-8);
  }
}

TEST_CASE("finer grids never increase the optimum") {
  SeededStream s(12, 0);
  std::vector<double> ev(40);
  for (double &x : ev)
    x = std::tanh(s.normal());
  MomentVector m = exact_moments(ev, 12);
  for (double &v : m.values)
    v += 0.01 * s.normal();
  double previous = std::numeric_limits<double>::infinity();
  for (Index d : {64, 256, 1024}) {
    const auto sol = solve_moment_matching(m, d);
    CHECK(sol.objective <= previous + 1e-9);
    previous = sol.objective;
  }
}

TEST_CASE("preconditions") {
  MomentVector m;
  CHECK_THROWS_AS(solve_moment_matching(m, 10), InvalidArgument);
  m.values = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(solve_moment_matching(m, 2), InvalidArgument);
  CHECK_THROWS_AS(kpm_density(m, 2), InvalidArgument);
}

TEST_CASE("simplex projection") {
  Vector v(4);
  v << 0.5, 0.5, 0.5, -1.0;
  const Vector p = project_onto_simplex(v);
  CHECK(p.minCoeff() >= 0.0);
  CHECK(p.sum() == doctest::Approx(1.0));
  CHECK(p(0) == doctest::Approx(1.0 / 3.0));
  CHECK(p(3) == 0.0);
  Vector inside(3);
  inside << 0.2, 0.3, 0.5;
  CHECK(project_onto_simplex(inside).isApprox(inside));
}

TEST_CASE("Jackson coefficients") {
  const auto b = jackson_coefficients(20);
  REQUIRE(b.size() == 20);
  CHECK(b[0] <= 1.0);
  for (std::size_t k = 1; k < b.size(); ++k)
    CHECK(b[k] <= b[k - 1] + 1e-15);
  CHECK(b.back() >= 0.0);
  CHECK(b.back() <= 0.05);
}

TEST_CASE("KPM with zero moments is the Chebyshev weight") {
  MomentVector m;
  m.values.assign(5, 0.0);
  const Index d = 100;
  const GridDensity q = kpm_density(m, d);
  check_simplex(q);
  Vector expected(d + 1);
  const double edge = 1.0 - 0.5 / d;
  for (Index j = 0; j <= d; ++j) {
    const double x = std::clamp(q.support(j), -edge, edge);
    expected(j) = 1.0 / std::sqrt(1.0 - x * x);
  }
  expected /= expected.sum();
  CHECK((q.weights - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("KPM output is a valid density for random moments") {
  SeededStream s(13, 0);
  for (int trial = 0; trial < 10; ++trial) {
    MomentVector m;
    for (int i = 0; i < 15; ++i)
      m.values.push_back(s.uniform(-0.8, 0.8));
    check_simplex(kpm_density(m, 300));
  }
}

TEST_CASE("CMM is at least as accurate as KPM on a uniform spectrum") {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SeededStream s(seed, 14);
    std::vector<double> ev(200);
    for (double &x : ev)
      x = s.uniform(-1.0, 1.0);
    const auto exact = DiscreteDistribution::uniform(ev).merged();
    const MomentVector m = exact_moments(ev, 20);
    const double cmm = wasserstein1(solve_moment_matching(m, 1000).density.to_distribution(), exact);
    const double kpm = wasserstein1(kpm_density(m, 1000).to_distribution(), exact);
    wins += kpm >= cmm;
    // Both reconstructions carry the O(1/N) guarantee.
    CHECK(cmm <= std::numbers::pi / 20);
    CHECK(kpm <= std::numbers::pi / 20);
  }
  CHECK(wins >= 8);
}

TEST_CASE("rescale_density") {
  GridDensity q;
  q.d = 4;
  q.weights = Vector::Zero(5);
  q.weights(3) = 0.6; // x = 0.5
  q.weights(0) = 0.4; // x = -1
  const auto same = rescale_density(q, 1.0);
  CHECK(wasserstein1(same, q.to_distribution()) == 0.0);
  const auto twice = rescale_density(q, 2.0);
  CHECK(twice.atoms()[1].location == doctest::Approx(1.0));
  const auto ref = DiscreteDistribution::point(0.1);
  CHECK(wasserstein1(twice, ref.scaled(2.0)) ==
        doctest::Approx(2.0 * wasserstein1(q.to_distribution(), ref)));
  CHECK_THROWS_AS(rescale_density(q, 0.0), InvalidArgument);
}
