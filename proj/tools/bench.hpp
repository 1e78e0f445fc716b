#pragma once

#include "sde/datasets.hpp"
#include "sde/sde.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sdebench {

/// Parameters shared by every subcommand.
struct BenchOptions {
  std::string matrix;
  std::vector<sde::Algorithm> algorithms;
  std::vector<std::uint64_t> budgets;
  int trials = 10;
  std::uint64_t seed = 0;
  bool normalize_adjacency = true;
  unsigned threads = 1;
  /// Algorithm parameters; the profile fills the defaults.
  sde::SdeConfig config;
};

/// Applies a named profile: "paper" (b = 15, q = 15, 15 SLQ runs, d = 20000,
/// 1:3 moment:Krylov split) or "quick" (same with d = 2000). Throws
/// sde::InvalidArgument for unknown names.
sde::SdeConfig profile_config(const std::string &name);

struct SweepRow {
  std::string matrix;
  std::string algorithm;
  std::uint64_t budget = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double w1 = 0.0;
  std::uint64_t matvecs = 0;
};

inline constexpr const char *sweep_header = "matrix,algorithm,budget,trial,seed,w1,matvecs";

/// Seed used for trial t (1-based) of a sweep with base seed s.
std::uint64_t trial_seed(std::uint64_t base, int trial);

/// Exact spectral density of a benchmark matrix (from the known spectrum
/// when available).
sde::DiscreteDistribution reference_density(const sde::datasets::TestMatrix &m);

/// Every (algorithm, budget, trial) cell, computed on `options.threads`
/// workers and returned sorted by algorithm order, budget and trial. A cell
/// whose budget cannot cover its algorithm gets w1 = NaN.
std::vector<SweepRow> run_sweep(const BenchOptions &options, std::ostream &log);

void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows);
/// Throws sde::ParseError on a bad header or row.
std::vector<SweepRow> read_sweep_csv(std::istream &in);

void write_density_csv(std::ostream &out, const sde::DiscreteDistribution &density);

/// SVG 1.1 line plot: mean W1 per algorithm against budget on a log y axis,
/// with a shaded band between the 10th and 90th percentiles. Throws
/// sde::InvalidArgument when there is nothing to plot.
std::string render_svg(const std::vector<SweepRow> &rows);

/// Linear-interpolation percentile, p in [0, 1].
double percentile(std::vector<double> values, double p);

/// Entry point: returns the process exit code (0 ok, 1 runtime failure,
/// 2 usage error).
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace sdebench
