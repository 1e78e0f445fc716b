#include "doctest.h"

#include "sde/randgen.hpp"

using namespace sde;

TEST_CASE("gaussian_matrix") {
  SUBCASE("determinism and stream separation") {
    SeededStream a(42, 1), b(42, 1), c(42, 2);
    const Matrix A = gaussian_matrix(5, 4, a);
    CHECK(A == gaussian_matrix(5, 4, b));
    CHECK(A != gaussian_matrix(5, 4, c));
  }
  SUBCASE("moments of 1e5 samples") {
    SeededStream s(7, 0);
    const Matrix G = gaussian_matrix(1000, 100, s);
    const double mean = G.mean();
    const double var = (G.array() - mean).square().mean();
    CHECK(std::abs(mean) <= 0.02);
    CHECK(std::abs(var - 1.0) <= 0.05);
  }
  SUBCASE("empty shapes are rejected") {
    SeededStream s(1, 0);
    CHECK_THROWS_AS(gaussian_matrix(0, 3, s), InvalidArgument);
  }
}

TEST_CASE("substreams depend only on the key") {
  SeededStream root(5, 3);
  SeededStream x = root.substream(2);
  root.uniform();
  SeededStream y = root.substream(2);
  CHECK(x.next_u64() == y.next_u64());
  CHECK(root.substream(1).next_u64() != root.substream(2).next_u64());
}

TEST_CASE("uniform draws lie in [0, 1)") {
  SeededStream s(0, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("unit_sphere_vector") {
  SeededStream s(9, 0);
  for (Index n : {1, 2, 17, 300})
    CHECK(std::abs(unit_sphere_vector(n, s).norm() - 1.0) <= 1e-12);
  const Vector v = unit_sphere_vector(1, s);
  CHECK(std::abs(std::abs(v(0)) - 1.0) <= 1e-15);

  const Index n = 20;
  Vector u = Vector::Zero(n);
  u(3) = 1.0;
  double acc = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const double p = u.dot(unit_sphere_vector(n, s));
    acc += p * p;
  }
  CHECK(std::abs(acc / draws - 1.0 / n) <= 0.2 / n);
}

TEST_CASE("random_orthogonal") {
  SeededStream s(10, 0);
  const Matrix one = random_orthogonal(1, s);
  CHECK(std::abs(std::abs(one(0, 0)) - 1.0) <= 1e-15);
  const Matrix Q = random_orthogonal(20, s);
  CHECK((Q.transpose() * Q - Matrix::Identity(20, 20)).norm() <= 1e-10);
  CHECK(std::abs(std::abs(Q.determinant()) - 1.0) <= 1e-8);
}
