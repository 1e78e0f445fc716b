#pragma once

#include "sde/operators.hpp"
#include "sde/randgen.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sde::datasets {

/// A benchmark matrix, with its spectrum when it is known by construction
/// (saves the dense eigendecomposition in the exact-density oracle).
struct TestMatrix {
  OperatorPtr op;
  std::optional<std::vector<double>> spectrum;
  std::string name;

  Index dimension() const { return op->dimension(); }
};

/// V diag(lambda) V^T with lambda_i ~ N(0, 1) scaled so max |lambda_i| = 1
/// and V Haar orthogonal.
TestMatrix gaussian_matrix(Index n, SeededStream &stream);

/// As gaussian_matrix with lambda_i ~ U[-1, 1].
TestMatrix uniform_matrix(Index n, SeededStream &stream);

/// diag(1, 1/2, ..., 1/n).
TestMatrix inverse_spectrum(Index n);

/// diag(1, 2^-2, 2^-4, ...): entry i (0-based) is 2^(-2i), formed from its
/// exponent; entries whose binary exponent is below -1074 are exact zeros.
TestMatrix power_law_spectrum(Index n);

/// diag of r Gaussian entries scaled to max magnitude 1, followed by n - r
/// zeros. Requires r <= n.
TestMatrix low_rank(Index n, SeededStream &stream, Index r = 100);

struct MatrixMarketOptions {
  /// D^{-1/2} A D^{-1/2} with D the row sums of |A|; rows with zero degree
  /// stay zero.
  bool normalize = true;
};

/// Reads a coordinate Matrix Market file with `symmetric` storage and
/// `pattern`, `real` or `integer` values. Entries of one triangle are
/// mirrored; a duplicate coordinate keeps its last value. Throws ParseError
/// with the line number on malformed input.
TestMatrix load_matrix_market(const std::string &path,
                              const MatrixMarketOptions &options = {});

/// Builds a matrix from "gaussian:n", "uniform:n", "inverse:n", "powerlaw:n",
/// "lowrank:n" or "lowrank:n:r", or a path ending in ".mtx". Random
/// generators draw from SeededStream(seed, 0).
TestMatrix make_matrix(const std::string &source, std::uint64_t seed,
                       const MatrixMarketOptions &mtx_options = {});

} // namespace sde::datasets
