#include "doctest.h"
#include "oracles.hpp"

#include "sde/chebyshev.hpp"
#include "sde/randgen.hpp"

#include <numbers>

using namespace sde;

TEST_CASE("cheb_eval") {
  CHECK(cheb_eval(0, 0.7) == 1.0);
  CHECK(cheb_eval(1, 0.3) == 0.3);
  CHECK(cheb_eval(2, 0.5) == doctest::Approx(-0.5));
  CHECK(cheb_eval(3, 0.5) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cheb_eval(-1, 0.0), InvalidArgument);
}

TEST_CASE("recurrence agrees with cos(k theta)") {
  for (int k = 0; k <= 64; ++k)
    for (int t = 0; t <= 40; ++t) {
      const double x = std::cos(std::numbers::pi * t / 40.0);
      CHECK(std::abs(cheb_eval(k, x) - oracle::chebyshev_trig(k, x)) <= 1e-10);
      std::vector<double> coeff(static_cast<std::size_t>(k + 1), 0.0);
      coeff.back() = 1.0;
      CHECK(std::abs(clenshaw(coeff, x) - oracle::chebyshev_trig(k, x)) <= 1e-10);
    }
}

TEST_CASE("normalized polynomials") {
  CHECK(cheb_normalized(0, 0.123) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));
  CHECK(cheb_normalized(2, 0.0) == doctest::Approx(-std::sqrt(2.0 / std::numbers::pi)));
  for (int k = 1; k <= 30; ++k)
    for (int j = 0; j <= 200; ++j) {
      const double x = -1.0 + 2.0 * j / 200.0;
      CHECK(std::abs(cheb_normalized(k, x)) <= sqrt_two_over_pi + 1e-15);
    }
  const auto all = cheb_normalized_all(6, 0.37);
  for (int k = 0; k <= 6; ++k)
    CHECK(all[static_cast<std::size_t>(k)] == doctest::Approx(cheb_normalized(k, 0.37)));
}

TEST_CASE("orthonormality under the Chebyshev weight") {
  // Gauss-Chebyshev quadrature: int f(x) w(x) dx = (pi / K) sum f(x_k).
  const int K = 10000;
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; j <= 6; ++j) {
      double acc = 0.0;
      for (int k = 0; k < K; ++k) {
        const double x = std::cos(std::numbers::pi * (k + 0.5) / K);
        acc += cheb_normalized(i, x) * cheb_normalized(j, x);
      }
      acc *= std::numbers::pi / K;
      CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) <= 1e-6);
    }
}

TEST_CASE("cheb_moment_quadratic_form") {
  BudgetLedger ledger;
  SeededStream stream(3, 0);
  SUBCASE("A = I") {
    DiagonalOperator I(Vector::Ones(10));
    const auto f = cheb_moment_quadratic_form(I, unit_sphere_vector(10, stream), 3, ledger);
    CHECK(f[1] == doctest::Approx(sqrt_two_over_pi));
    CHECK(ledger.total() == 3);
  }
  SUBCASE("A = 0") {
    DiagonalOperator Z(Vector::Zero(10));
    const auto f = cheb_moment_quadratic_form(Z, unit_sphere_vector(10, stream), 2, ledger);
    CHECK(f[2] == doctest::Approx(-sqrt_two_over_pi));
  }
  SUBCASE("matrix-function oracle at n = 20") {
    Vector eigs(20);
    for (Index i = 0; i < 20; ++i)
      eigs(i) = stream.uniform(-1.0, 1.0);
    DenseOperator A = dense_from_eigendecomposition(eigs, random_orthogonal(20, stream));
    const Vector g = unit_sphere_vector(20, stream);
    const auto f = cheb_moment_quadratic_form(A, g, 8, ledger);
    for (int i = 0; i <= 8; ++i) {
      const Matrix Ti =
          oracle::matrix_function(A.matrix(), [i](double x) { return cheb_normalized(i, x); });
      CHECK(std::abs(f[static_cast<std::size_t>(i)] - g.dot(Ti * g)) <= 1e-10);
    }
  }
  SUBCASE("negative N") {
    DiagonalOperator I(Vector::Ones(3));
    CHECK_THROWS_AS(cheb_moment_quadratic_form(I, Vector::Unit(3, 0), -1, ledger),
                    InvalidArgument);
  }
}

TEST_CASE("estimate_moments") {
  SUBCASE("A = I gives sqrt(2/pi) exactly and charges N b") {
    DiagonalOperator I(Vector::Ones(25));
    for (int b : {1, 4, 9}) {
      SeededStream stream(b, 0);
      BudgetLedger ledger;
      const MomentVector m = estimate_moments(I, 5, b, stream, ledger);
      CHECK(m(1) == doctest::Approx(sqrt_two_over_pi).epsilon(1e-14));
      CHECK(ledger.total() == static_cast<std::uint64_t>(5 * b));
      CHECK(m.hutchinson_vectors == b);
    }
  }
  SUBCASE("b = 1 equals one quadratic form") {
    Vector d(15);
    SeededStream s(4, 0);
    for (Index i = 0; i < 15; ++i)
      d(i) = s.uniform(-1.0, 1.0);
    DiagonalOperator A(d);
    SeededStream a(5, 5), b(5, 5);
    BudgetLedger ledger;
    const MomentVector m = estimate_moments(A, 4, 1, a, ledger);
    const auto f = cheb_moment_quadratic_form(A, unit_sphere_vector(15, b), 4, ledger);
    for (int i = 1; i <= 4; ++i)
      CHECK(m(i) == f[static_cast<std::size_t>(i)]);
  }
  SUBCASE("error envelope against the exact trace over 20 seeds") {
    const Index n = 400;
    Vector d(n);
    SeededStream s(6, 0);
    for (Index i = 0; i < n; ++i)
      d(i) = s.uniform(-1.0, 1.0);
    DiagonalOperator A(d);
    const std::vector<double> ev(d.data(), d.data() + n);
    const MomentVector exact = exact_moments(ev, 5);
    const double log_inv_delta = std::log(20.0);
    double err_small = 0.0, err_large = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SeededStream stream(seed, 77);
      BudgetLedger ledger;
      const MomentVector few = estimate_moments(A, 5, 2, stream, ledger);
      const MomentVector many = estimate_moments(A, 5, 50, stream, ledger);
      for (int i = 1; i <= 5; ++i) {
        double fro = 0.0;
        for (double x : ev)
          fro += cheb_normalized(i, x) * cheb_normalized(i, x);
        fro = std::sqrt(fro);
        CHECK(std::abs(many(i) - exact(i)) <= 5.0 * log_inv_delta / n * fro);
        err_small += std::abs(few(i) - exact(i));
        err_large += std::abs(many(i) - exact(i));
      }
    }
    CHECK(err_large < err_small);
  }
}

TEST_CASE("adjust_moments_for_deflation") {
  MomentVector m;
  m.values = {0.1, 0.2, -0.3};
  SUBCASE("s = 0 is the identity") {
    const MomentVector a = adjust_moments_for_deflation(m, 10, 0);
    CHECK(a.values == m.values);
  }
  SUBCASE("affine inversion") {
    const double x = 0.42;
    MomentVector t;
    t.values = {0.0, (8.0 * x + 2.0 * cheb_normalized(2, 0.0)) / 10.0, 0.0};
    CHECK(adjust_moments_for_deflation(t, 10, 2)(2) == doctest::Approx(x));
  }
  SUBCASE("odd moments only rescale") {
    const MomentVector a = adjust_moments_for_deflation(m, 10, 3);
    CHECK(a(1) == doctest::Approx(10.0 * 0.1 / 7.0));
    CHECK(a(3) == doctest::Approx(10.0 * -0.3 / 7.0));
  }
  SUBCASE("s >= n is rejected") {
    CHECK_THROWS_AS(adjust_moments_for_deflation(m, 5, 5), InvalidArgument);
  }
}
