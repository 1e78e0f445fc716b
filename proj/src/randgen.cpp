#include "sde/randgen.hpp"

#include <cmath>

namespace sde {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id),
      engine_(mix64(mix64(seed) ^ mix64(stream_id + 0x632be59bd9b4e019ULL))) {}

SeededStream SeededStream::substream(std::uint64_t k) const {
  return SeededStream(seed_, mix64(stream_id_ * 0x100000001b3ULL + k + 1));
}

double SeededStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededStream::normal() {
  if (spare_) {
    double value = *spare_;
    spare_.reset();
    return value;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  return u * factor;
}

Vector gaussian_vector(Index n, SeededStream &stream) {
  Vector v(n);
  for (Index i = 0; i < n; ++i)
    v(i) = stream.normal();
  return v;
}

Matrix gaussian_matrix(Index rows, Index cols, SeededStream &stream) {
  if (rows < 1 || cols < 1)
    throw InvalidArgument("gaussian_matrix: rows and cols must be positive");
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      m(i, j) = stream.normal();
  return m;
}

Vector unit_sphere_vector(Index n, SeededStream &stream) {
  if (n < 1)
    throw InvalidArgument("unit_sphere_vector: n must be positive");
  Vector v;
  double norm = 0.0;
  do {
    v = gaussian_vector(n, stream);
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

Matrix random_orthogonal(Index n, SeededStream &stream) {
  if (n < 1)
    throw InvalidArgument("random_orthogonal: n must be positive");
  Matrix g = gaussian_matrix(n, n, stream);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix &r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0)
      q.col(j) = -q.col(j);
  return q;
}

} // namespace sde
