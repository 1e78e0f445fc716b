#include "sde/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sde::datasets {

namespace {

TestMatrix conjugated(std::vector<double> lambda, SeededStream &stream,
                      std::string name) {
  const Index n = static_cast<Index>(lambda.size());
  double scale = 0.0;
  for (double x : lambda)
    scale = std::max(scale, std::abs(x));
  if (scale > 0.0)
    for (double &x : lambda)
      x /= scale;
  const Matrix V = random_orthogonal(n, stream);
  const Vector values = Eigen::Map<const Vector>(lambda.data(), n);
  Matrix A = V * values.asDiagonal() * V.transpose();
  A = 0.5 * (A + A.transpose()).eval();
  return {std::make_shared<DenseOperator>(std::move(A)), std::move(lambda),
          std::move(name)};
}

TestMatrix diagonal(std::vector<double> entries, std::string name) {
  const Vector d = Eigen::Map<const Vector>(entries.data(), static_cast<Index>(entries.size()));
  return {std::make_shared<DiagonalOperator>(d), std::move(entries), std::move(name)};
}

void require_positive(Index n, const char *who) {
  if (n < 1)
    throw InvalidArgument(std::string(who) + ": n must be at least 1");
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Index parse_index(const std::string &text, const std::string &source) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception &) {
    throw InvalidArgument("bad matrix source '" + source + "'");
  }
  if (used != text.size() || value < 1)
    throw InvalidArgument("bad matrix source '" + source + "'");
  return static_cast<Index>(value);
}

} // namespace

TestMatrix gaussian_matrix(Index n, SeededStream &stream) {
  require_positive(n, "gaussian_matrix");
  std::vector<double> lambda(static_cast<std::size_t>(n));
  for (double &x : lambda)
    x = stream.normal();
  return conjugated(std::move(lambda), stream, "gaussian:" + std::to_string(n));
}

TestMatrix uniform_matrix(Index n, SeededStream &stream) {
  require_positive(n, "uniform_matrix");
  std::vector<double> lambda(static_cast<std::size_t>(n));
  for (double &x : lambda)
    x = stream.uniform(-1.0, 1.0);
  return conjugated(std::move(lambda), stream, "uniform:" + std::to_string(n));
}

TestMatrix inverse_spectrum(Index n) {
  require_positive(n, "inverse_spectrum");
  std::vector<double> entries(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    entries[static_cast<std::size_t>(i)] = 1.0 / static_cast<double>(i + 1);
  return diagonal(std::move(entries), "inverse:" + std::to_string(n));
}

TestMatrix power_law_spectrum(Index n) {
  require_positive(n, "power_law_spectrum");
  std::vector<double> entries(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double exponent = -2.0 * static_cast<double>(i);
    entries[static_cast<std::size_t>(i)] = exponent < -1074.0 ? 0.0 : std::exp2(exponent);
  }
  return diagonal(std::move(entries), "powerlaw:" + std::to_string(n));
}

TestMatrix low_rank(Index n, SeededStream &stream, Index r) {
  require_positive(n, "low_rank");
  if (r < 0 || r > n)
    throw InvalidArgument("low_rank: rank must lie in [0, n]");
  std::vector<double> entries(static_cast<std::size_t>(n), 0.0);
  double scale = 0.0;
  for (Index i = 0; i < r; ++i) {
    entries[static_cast<std::size_t>(i)] = stream.normal();
    scale = std::max(scale, std::abs(entries[static_cast<std::size_t>(i)]));
  }
  if (scale > 0.0)
    for (Index i = 0; i < r; ++i)
      entries[static_cast<std::size_t>(i)] /= scale;
  return diagonal(std::move(entries), "lowrank:" + std::to_string(n));
}

TestMatrix load_matrix_market(const std::string &path,
                              const MatrixMarketOptions &options) {
  std::ifstream in(path);
  if (!in)
    throw InvalidArgument("cannot open '" + path + "'");

  std::string line;
  long line_number = 0;
  if (!std::getline(in, line))
    throw ParseError("empty Matrix Market file", 1);
  ++line_number;
  {
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
      throw ParseError("missing %%MatrixMarket matrix header", line_number);
    if (lower(format) != "coordinate")
      throw ParseError("only coordinate format is supported", line_number);
    field = lower(field);
    if (field != "pattern" && field != "real" && field != "integer")
      throw ParseError("unsupported field '" + field + "'", line_number);
    if (lower(symmetry) != "symmetric")
      throw ParseError("only symmetric storage is supported", line_number);
    const bool pattern = field == "pattern";

    long rows = -1, cols = -1, entries = -1;
    while (std::getline(in, line)) {
      ++line_number;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '%')
        continue;
      std::istringstream size_line(line);
      if (!(size_line >> rows >> cols >> entries) || rows < 1 || cols != rows || entries < 0)
        throw ParseError("malformed size line", line_number);
      break;
    }
    if (rows < 0)
      throw ParseError("missing size line", line_number);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(2 * entries));
    long read = 0;
    while (read < entries && std::getline(in, line)) {
      ++line_number;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '%')
        continue;
      std::istringstream entry(line);
      long i = 0, j = 0;
      double value = 1.0;
      if (!(entry >> i >> j) || (!pattern && !(entry >> value)))
        throw ParseError("malformed entry", line_number);
      if (i < 1 || i > rows || j < 1 || j > rows)
        throw ParseError("index out of range", line_number);
      if (!std::isfinite(value))
        throw ParseError("non-finite value", line_number);
      triplets.emplace_back(i - 1, j - 1, value);
      if (i != j)
        triplets.emplace_back(j - 1, i - 1, value);
      ++read;
    }
    if (read < entries)
      throw ParseError("expected " + std::to_string(entries) + " entries, found " +
                           std::to_string(read),
                       line_number);

    SparseMatrix A(rows, rows);
    A.setFromTriplets(triplets.begin(), triplets.end(),
                      [](double, double latest) { return latest; });
    A.makeCompressed();

    if (options.normalize) {
      Vector scale = Vector::Zero(rows);
      for (Index r = 0; r < A.outerSize(); ++r) {
        double degree = 0.0;
        for (SparseMatrix::InnerIterator it(A, r); it; ++it)
          degree += std::abs(it.value());
        scale(r) = degree > 0.0 ? 1.0 / std::sqrt(degree) : 0.0;
      }
      for (Index r = 0; r < A.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(A, r); it; ++it)
          it.valueRef() *= scale(r) * scale(it.col());
    }
    std::string name = path;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos)
      name = name.substr(slash + 1);
    return {std::make_shared<SparseOperator>(std::move(A)), std::nullopt, name};
  }
}

TestMatrix make_matrix(const std::string &source, std::uint64_t seed,
                       const MatrixMarketOptions &mtx_options) {
  if (source.size() > 4 && source.substr(source.size() - 4) == ".mtx")
    return load_matrix_market(source, mtx_options);
  std::vector<std::string> parts;
  std::stringstream ss(source);
  for (std::string part; std::getline(ss, part, ':');)
    parts.push_back(part);
  if (parts.size() < 2)
    throw InvalidArgument("bad matrix source '" + source + "'");
  const std::string kind = lower(parts[0]);
  const Index n = parse_index(parts[1], source);
  SeededStream stream(seed, 0);
  if (kind == "lowrank" && parts.size() <= 3) {
    const Index r = parts.size() == 3 ? parse_index(parts[2], source) : std::min<Index>(100, n);
    TestMatrix m = low_rank(n, stream, r);
    m.name = source;
    return m;
  }
  if (parts.size() != 2)
    throw InvalidArgument("bad matrix source '" + source + "'");
  if (kind == "gaussian")
    return gaussian_matrix(n, stream);
  if (kind == "uniform")
    return uniform_matrix(n, stream);
  if (kind == "inverse")
    return inverse_spectrum(n);
  if (kind == "powerlaw")
    return power_law_spectrum(n);
  throw InvalidArgument("unknown matrix generator '" + parts[0] + "'");
}

} // namespace sde::datasets
