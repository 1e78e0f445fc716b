#include "bench.hpp"

#include "sde/metrics.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace sdebench {

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double x) {
  if (std::isnan(x))
    return "nan";
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

std::vector<std::string> split(const std::string &line, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(line);
  while (std::getline(in, part, sep))
    parts.push_back(part);
  if (!line.empty() && line.back() == sep)
    parts.emplace_back();
  return parts;
}

std::uint64_t parse_u64(const std::string &text, long line) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception &) {
    throw sde::ParseError("expected an unsigned integer, got '" + text + "'", line);
  }
  if (used != text.size() || text.front() == '-')
    throw sde::ParseError("expected an unsigned integer, got '" + text + "'", line);
  return v;
}

double parse_double(const std::string &text, long line) {
  if (text == "nan")
    return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception &) {
    throw sde::ParseError("expected a number, got '" + text + "'", line);
  }
  if (used != text.size())
    throw sde::ParseError("expected a number, got '" + text + "'", line);
  return v;
}

std::string xml_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

std::ofstream open_output(const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw sde::Error("cannot write '" + path + "'");
  return out;
}

void print_ledger(std::ostream &out, const sde::SdeEstimate &estimate, std::uint64_t budget) {
  out << "stage,matvecs\n";
  for (const auto &[stage, count] : estimate.ledger.counts())
    out << stage << ',' << count << '\n';
  out << "total," << estimate.ledger.total() << '\n';
  out << "budget," << budget << '\n';
  for (std::size_t r = 0; r < estimate.runs.size(); ++r) {
    const auto &d = estimate.runs[r];
    out << "# run " << r + 1 << ": l=" << d.deflation_block << " s=" << d.deflated
        << " L=" << format_double(d.scale) << " N=" << d.moments << " m=" << d.lanczos_steps
        << " gated=" << d.gated << " tested=" << d.tested << '\n';
  }
}

} // namespace

sde::SdeConfig profile_config(const std::string &name) {
  sde::SdeConfig c;
  c.hutchinson_vectors = 15;
  c.krylov_depth = 15;
  c.krylov_fraction = 0.75;
  c.grid = 20000;
  if (name == "paper")
    return c;
  if (name == "quick") {
    c.grid = 2000;
    return c;
  }
  throw sde::InvalidArgument("unknown profile '" + name + "' (expected paper or quick)");
}

std::uint64_t trial_seed(std::uint64_t base, int trial) {
  return base + static_cast<std::uint64_t>(trial);
}

sde::DiscreteDistribution reference_density(const sde::datasets::TestMatrix &m) {
  if (m.spectrum)
    return sde::DiscreteDistribution::uniform(*m.spectrum).merged();
  return sde::exact_density(*m.op);
}

std::vector<SweepRow> run_sweep(const BenchOptions &options, std::ostream &log) {
  const sde::datasets::TestMatrix m = sde::datasets::make_matrix(
      options.matrix, options.seed, {options.normalize_adjacency});
  const sde::DiscreteDistribution exact = reference_density(m);

  std::vector<SweepRow> rows;
  for (sde::Algorithm a : options.algorithms)
    for (std::uint64_t budget : options.budgets)
      for (int t = 1; t <= options.trials; ++t) {
        SweepRow row;
        row.matrix = options.matrix;
        row.algorithm = sde::to_string(a);
        row.budget = budget;
        row.trial = t;
        row.seed = trial_seed(options.seed, t);
        rows.push_back(row);
      }

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow &row = rows[i];
      sde::SdeConfig config = options.config;
      config.algorithm = sde::parse_algorithm(row.algorithm);
      config.budget = row.budget;
      config.seed = row.seed;
      try {
        const sde::SdeEstimate e = sde::estimate_density(*m.op, config);
        row.w1 = sde::wasserstein1(e.density, exact);
        row.matvecs = e.ledger.total();
      } catch (const sde::BudgetExhausted &ex) {
        row.w1 = std::numeric_limits<double>::quiet_NaN();
        row.matvecs = 0;
        std::lock_guard<std::mutex> lock(log_mutex);
        log << "warning: " << row.algorithm << " at budget " << row.budget << " trial "
            << row.trial << ": " << ex.what() << '\n';
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads,
                                                          static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  return rows;
}

void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows) {
  out << sweep_header << '\n';
  for (const SweepRow &r : rows)
    out << r.matrix << ',' << r.algorithm << ',' << r.budget << ',' << r.trial << ','
        << r.seed << ',' << format_double(r.w1) << ',' << r.matvecs << '\n';
}

std::vector<SweepRow> read_sweep_csv(std::istream &in) {
  std::string line;
  long number = 1;
  if (!std::getline(in, line))
    throw sde::ParseError("empty results file", 1);
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  const auto header = split(line, ',');
  const auto expected = split(sweep_header, ',');
  if (header.size() < 6 || !std::equal(expected.begin(), expected.begin() + 6, header.begin()))
    throw sde::ParseError("header must start with matrix,algorithm,budget,trial,seed,w1", 1);
  const bool has_matvecs = header.size() >= 7 && header[6] == "matvecs";
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const auto f = split(line, ',');
    if (f.size() != header.size())
      throw sde::ParseError("expected " + std::to_string(header.size()) + " fields", number);
    SweepRow r;
    r.matrix = f[0];
    r.algorithm = f[1];
    r.budget = parse_u64(f[2], number);
    r.trial = static_cast<int>(parse_u64(f[3], number));
    r.seed = parse_u64(f[4], number);
    r.w1 = parse_double(f[5], number);
    r.matvecs = has_matvecs ? parse_u64(f[6], number) : 0;
    rows.push_back(r);
  }
  return rows;
}

void write_density_csv(std::ostream &out, const sde::DiscreteDistribution &density) {
  out << "location,weight\n";
  for (const sde::Atom &a : density.atoms())
    out << format_double(a.location) << ',' << format_double(a.weight) << '\n';
}

double percentile(std::vector<double> values, double p) {
  if (values.empty())
    throw sde::InvalidArgument("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::string render_svg(const std::vector<SweepRow> &rows) {
  struct Point {
    double budget, mean, lo, hi;
  };
  // Series keyed by label, in order of first appearance.
  std::vector<std::string> labels;
  std::map<std::string, std::map<std::uint64_t, std::vector<double>>> samples;
  std::vector<std::string> matrices;
  for (const SweepRow &r : rows) {
    if (!std::isfinite(r.w1))
      continue;
    if (std::find(matrices.begin(), matrices.end(), r.matrix) == matrices.end())
      matrices.push_back(r.matrix);
  }
  const bool label_matrix = matrices.size() > 1;
  for (const SweepRow &r : rows) {
    if (!std::isfinite(r.w1))
      continue;
    const std::string label = label_matrix ? r.matrix + " " + r.algorithm : r.algorithm;
    if (!samples.count(label))
      labels.push_back(label);
    samples[label][r.budget].push_back(std::max(r.w1, 1e-16));
  }
  if (labels.empty())
    throw sde::InvalidArgument("no finite results to plot");

  std::map<std::string, std::vector<Point>> series;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto &label : labels)
    for (const auto &[budget, values] : samples[label]) {
      double mean = 0.0;
      for (double v : values)
        mean += v;
      mean /= static_cast<double>(values.size());
      Point p{static_cast<double>(budget), mean, percentile(values, 0.1), percentile(values, 0.9)};
      series[label].push_back(p);
      xmin = std::min(xmin, p.budget);
      xmax = std::max(xmax, p.budget);
      ymin = std::min({ymin, p.lo, p.mean});
      ymax = std::max({ymax, p.hi, p.mean});
    }
  double lymin = std::floor(std::log10(ymin));
  double lymax = std::ceil(std::log10(ymax));
  if (lymax <= lymin)
    lymax = lymin + 1.0;
  if (xmax <= xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }

  const double width = 720, height = 480, left = 80, right = 170, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  auto X = [&](double b) { return left + (b - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double w) { return top + (lymax - std::log10(w)) / (lymax - lymin) * ph; };
  static const char *palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string title = label_matrix ? "spectral density error" : matrices.front();
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << xml_escape(title) << "</text>\n";

  svg << "<g id=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\""
      << top + ph << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\"/>\n</g>\n";
  svg << "<g id=\"yticks\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (int e = static_cast<int>(lymin); e <= static_cast<int>(lymax); ++e) {
    const double y = Y(std::pow(10.0, e));
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << fixed(y, 2) << "\" x2=\"" << left + pw
        << "\" y2=\"" << fixed(y, 2) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << fixed(y + 4, 2)
        << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  svg << "</g>\n<g id=\"xticks\" font-family=\"sans-serif\" font-size=\"12\">\n";
  std::vector<double> budgets;
  for (const auto &label : labels)
    for (const Point &p : series[label])
      budgets.push_back(p.budget);
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  for (double b : budgets)
    svg << "<text x=\"" << fixed(X(b), 2) << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\">" << static_cast<std::uint64_t>(b) << "</text>\n";
  svg << "</g>\n";
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">matrix-vector products</text>\n"
      << "<text transform=\"translate(20 " << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << "Wasserstein-1 error</text>\n";

  for (std::size_t k = 0; k < labels.size(); ++k) {
    const auto &pts = series[labels[k]];
    const char *color = palette[k % std::size(palette)];
    svg << "<g class=\"series\" id=\"series-" << k << "\">\n";
    if (pts.size() == 1) {
      const Point &p = pts.front();
      svg << "<line class=\"band\" x1=\"" << fixed(X(p.budget), 2) << "\" y1=\"" << fixed(Y(p.lo), 2)
          << "\" x2=\"" << fixed(X(p.budget), 2) << "\" y2=\"" << fixed(Y(p.hi), 2)
          << "\" stroke=\"" << color << "\" stroke-opacity=\"0.4\" stroke-width=\"6\"/>\n"
          << "<circle class=\"marker\" cx=\"" << fixed(X(p.budget), 2) << "\" cy=\""
          << fixed(Y(p.mean), 2) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
    } else {
      svg << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (const Point &p : pts)
        svg << fixed(X(p.budget), 2) << ',' << fixed(Y(p.hi), 2) << ' ';
      for (auto it = pts.rbegin(); it != pts.rend(); ++it)
        svg << fixed(X(it->budget), 2) << ',' << fixed(Y(it->lo), 2) << ' ';
      svg << "\"/>\n<polyline class=\"mean\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2.5\" points=\"";
      for (const Point &p : pts)
        svg << fixed(X(p.budget), 2) << ',' << fixed(Y(p.mean), 2) << ' ';
      svg << "\"/>\n";
    }
    const double ly = top + 10 + 20.0 * static_cast<double>(k);
    svg << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2.5\"/>\n"
        << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(labels[k]) << "</text>\n"
        << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Spectral density estimation benchmarks"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  std::string matrix, profile = "paper", out_path, in_path, plot_in, plot_out;
  std::vector<std::string> algos;
  std::uint64_t budget = 0;
  std::vector<std::uint64_t> budgets;
  int trials = 10, averaging = 0, hutchinson = 0;
  std::uint64_t seed = 0;
  bool normalize = true;
  long long grid = 0, depth = -1, block = -1;
  double beta = 0.0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  app.add_option("--matrix", matrix,
                 "gaussian:n, uniform:n, inverse:n, powerlaw:n, lowrank:n[:r] or a .mtx file");
  app.add_option("--algo,--algos", algos, "cmm, kpm, def_cmm, def_kpm, slq, vr_slq")->delimiter(',');
  app.add_option("--budget", budget, "matrix-vector product budget");
  app.add_option("--budgets", budgets, "comma-separated budgets for sweep")->delimiter(',');
  app.add_option("--trials", trials, "independent trials per sweep cell")->capture_default_str();
  app.add_option("--seed", seed, "base random seed")->capture_default_str();
  app.add_option("--profile", profile, "parameter profile: paper or quick")->capture_default_str();
  app.add_option("--out", out_path, "output file");
  app.add_flag("--normalize-adjacency,!--raw-adjacency", normalize,
               "degree-normalize .mtx graphs (default on)");
  app.add_option("--grid", grid, "moment-matching grid resolution d");
  app.add_option("--hutchinson", hutchinson, "Hutchinson vectors b");
  app.add_option("--krylov-depth", depth, "block Krylov depth q");
  app.add_option("--deflation-block", block, "block Krylov size l (default: from budget)");
  app.add_option("--beta", beta, "residual threshold exponent");
  app.add_option("--averaging", averaging, "runs averaged per estimate (default 15 for SLQ)");
  app.add_option("--threads", threads, "sweep worker threads");

  auto *estimate = app.add_subcommand("estimate", "estimate one spectral density");
  auto *sweep = app.add_subcommand("sweep", "W1 error over algorithms, budgets and trials");
  auto *exact = app.add_subcommand("exact", "exact spectral density");
  auto *plot = app.add_subcommand("plot", "SVG plot of a sweep CSV");
  plot->add_option("input", plot_in, "sweep CSV");
  plot->add_option("output", plot_out, "SVG file");
  app.add_option("--in", in_path, "input file for plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    BenchOptions options;
    options.matrix = matrix;
    options.trials = trials;
    options.seed = seed;
    options.normalize_adjacency = normalize;
    options.threads = threads;
    try {
      options.config = profile_config(profile);
    } catch (const sde::InvalidArgument &e) {
      throw UsageError(e.what());
    }
    if (grid > 0)
      options.config.grid = grid;
    if (hutchinson > 0)
      options.config.hutchinson_vectors = hutchinson;
    if (depth >= 0)
      options.config.krylov_depth = depth;
    if (block >= 0)
      options.config.deflation_block = block;
    if (beta > 0.0)
      options.config.beta = beta;
    if (averaging > 0)
      options.config.trials = averaging;
    for (const auto &a : algos) {
      try {
        options.algorithms.push_back(sde::parse_algorithm(a));
      } catch (const sde::InvalidArgument &e) {
        throw UsageError(e.what());
      }
    }
    auto need_matrix = [&] {
      if (matrix.empty())
        throw UsageError("--matrix is required");
    };
    auto load = [&] {
      try {
        return sde::datasets::make_matrix(matrix, seed, {normalize});
      } catch (const sde::ParseError &) {
        throw;
      } catch (const sde::InvalidArgument &e) {
        throw UsageError(e.what());
      }
    };

    if (*estimate) {
      need_matrix();
      if (options.algorithms.size() != 1)
        throw UsageError("estimate needs exactly one --algo");
      if (budget < 1)
        throw UsageError("--budget must be at least 1");
      const auto m = load();
      sde::SdeConfig config = options.config;
      config.algorithm = options.algorithms.front();
      config.budget = budget;
      config.seed = seed;
      try {
        config.validate();
      } catch (const sde::InvalidArgument &e) {
        throw UsageError(e.what());
      }
      const sde::SdeEstimate e = sde::estimate_density(*m.op, config);
      if (out_path.empty()) {
        write_density_csv(out, e.density);
        print_ledger(err, e, budget);
      } else {
        auto file = open_output(out_path);
        write_density_csv(file, e.density);
        print_ledger(out, e, budget);
      }
      return 0;
    }
    if (*sweep) {
      need_matrix();
      if (options.algorithms.empty())
        options.algorithms = sde::all_algorithms();
      if (budgets.empty() && budget > 0)
        budgets.push_back(budget);
      if (budgets.empty())
        throw UsageError("sweep needs --budgets");
      for (std::uint64_t b : budgets)
        if (b < 1)
          throw UsageError("budgets must be at least 1");
      if (trials < 1)
        throw UsageError("--trials must be at least 1");
      options.budgets = budgets;
      load();
      const auto rows = run_sweep(options, err);
      if (out_path.empty()) {
        write_sweep_csv(out, rows);
      } else {
        auto file = open_output(out_path);
        write_sweep_csv(file, rows);
        out << "wrote " << rows.size() << " rows to " << out_path << '\n';
      }
      return 0;
    }
    if (*exact) {
      need_matrix();
      const auto m = load();
      const auto density = reference_density(m);
      if (out_path.empty()) {
        write_density_csv(out, density);
      } else {
        auto file = open_output(out_path);
        write_density_csv(file, density);
      }
      return 0;
    }
    if (*plot) {
      const std::string input = !plot_in.empty() ? plot_in : in_path;
      const std::string output = !plot_out.empty() ? plot_out : out_path;
      if (input.empty() || output.empty())
        throw UsageError("plot needs an input CSV and an output SVG");
      std::ifstream in(input);
      if (!in)
        throw sde::Error("cannot read '" + input + "'");
      const auto rows = read_sweep_csv(in);
      if (rows.empty())
        throw sde::Error("'" + input + "' has no result rows");
      auto file = open_output(output);
      file << render_svg(rows);
      return 0;
    }
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

} // namespace sdebench
