#pragma once

#include "sde/types.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace sde {

/// Deterministic random source keyed by (seed, stream id).
///
/// The engine is a std::mt19937_64 whose state is derived by SplitMix64
/// mixing of the key, so distinct ids give unrelated sequences and no state
/// is shared between streams. Normal deviates use the Marsaglia polar method
/// on 53-bit uniforms (the standard library's normal_distribution is not
/// reproducible across implementations).
class SeededStream {
public:
  SeededStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Independent child stream; depends only on (seed, id, k).
  SeededStream substream(std::uint64_t k) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// SplitMix64 finalizer; exposed for deriving per-trial seeds.
std::uint64_t mix64(std::uint64_t x);

Vector gaussian_vector(Index n, SeededStream &stream);

/// rows x cols matrix with i.i.d. N(0,1) entries, filled column by column.
Matrix gaussian_matrix(Index rows, Index cols, SeededStream &stream);

/// Uniform on the unit sphere S^{n-1}: a normalized Gaussian vector.
Vector unit_sphere_vector(Index n, SeededStream &stream);

/// Haar-distributed orthogonal matrix: Householder QR of a Gaussian matrix
/// with the signs of diag(R) folded into Q.
Matrix random_orthogonal(Index n, SeededStream &stream);

} // namespace sde
