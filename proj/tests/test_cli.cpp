#include "doctest.h"

#include "bench.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sdebench");
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sdebench::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "sdebench_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::size_t count(const std::string &text, const std::string &needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
    ++n;
  return n;
}

} // namespace

TEST_CASE("estimate writes a normalized density and a ledger") {
  const auto path = scratch("est.csv");
  const Result r = cli({"estimate", "--matrix", "inverse:200", "--algo", "slq", "--budget", "60",
                        "--seed", "1", "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("total,60") != std::string::npos);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "location,weight");
  double mass = 0.0;
  int atoms = 0;
  while (std::getline(in, line)) {
    mass += std::stod(line.substr(line.find(',') + 1));
    ++atoms;
  }
  CHECK(atoms <= 60);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

  const auto again = scratch("est2.csv");
  REQUIRE(cli({"estimate", "--matrix", "inverse:200", "--algo", "slq", "--budget", "60", "--seed",
               "1", "--out", again.string()})
              .code == 0);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({"estimate", "--matrix", "inverse:200", "--algo", "slq", "--budget", "0"}).code == 2);
  CHECK(cli({"estimate", "--matrix", "inverse:200", "--algo", "magic", "--budget", "10"}).code == 2);
  CHECK(cli({"estimate", "--matrix", "inverse:200", "--algo", "slq", "--budget", "ten"}).code == 2);
  CHECK(cli({"estimate", "--matrix", "nothing:5", "--algo", "slq", "--budget", "10"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"sweep", "--matrix", "inverse:50", "--profile", "fancy", "--budgets", "10"}).code == 2);
}

TEST_CASE("sweep rows, schema and determinism") {
  const std::vector<std::string> args{"sweep",    "--matrix", "inverse:120", "--algo",
                                      "slq,cmm",  "--budgets", "60,120",     "--trials",
                                      "3",        "--seed",   "4",           "--profile",
                                      "quick",    "--threads", "2"};
  const Result a = cli(args);
  REQUIRE(a.code == 0);
  std::istringstream in(a.out);
  const auto rows = sdebench::read_sweep_csv(in);
  CHECK(rows.size() == 2 * 2 * 3);
  for (const auto &row : rows) {
    CHECK(row.matvecs <= row.budget);
    CHECK(std::isfinite(row.w1));
    CHECK(row.seed == sdebench::trial_seed(4, row.trial));
  }
  CHECK(cli(args).out == a.out);

  std::ostringstream again;
  sdebench::write_sweep_csv(again, rows);
  CHECK(again.str() == a.out);
}

TEST_CASE("flags override the config file") {
  const auto cfg = scratch("bench.conf");
  std::ofstream(cfg) << "matrix=inverse:90\nalgo=slq\nbudget=30\nseed=2\n";
  const Result from_file = cli({"estimate", "--config", cfg.string()});
  REQUIRE(from_file.code == 0);
  CHECK(from_file.err.find("total,30") != std::string::npos);
  const Result overridden = cli({"estimate", "--config", cfg.string(), "--budget", "45"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.err.find("total,45") != std::string::npos);
}

TEST_CASE("exact density") {
  const Result r = cli({"exact", "--matrix", "inverse:4"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("location,weight\n", 0) == 0);
  CHECK(count(r.out, "\n") == 5);
}

TEST_CASE("plot of the committed fixture") {
  const fs::path fixture = fs::path(SDE_FIXTURE_DIR) / "sweep_small.csv";
  const auto svg_path = scratch("fixture.svg");
  REQUIRE(cli({"plot", fixture.string(), svg_path.string()}).code == 0);
  const std::string svg = slurp(svg_path);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
  CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
  CHECK(count(svg, "class=\"series\"") == 2);
  CHECK(count(svg, "<polyline class=\"mean\"") == 2);
  CHECK(count(svg, "<polygon class=\"band\"") == 2);
  CHECK(count(svg, "<circle") == 0);
  CHECK(svg.find(">slq</text>") != std::string::npos);
  CHECK(svg.find(">cmm</text>") != std::string::npos);
  // Log axis: one tick per decade between 1e-3 and 1e-1.
  CHECK(svg.find(">1e-3</text>") != std::string::npos);
  CHECK(svg.find(">1e-1</text>") != std::string::npos);
  // Each mean polyline has three vertices.
  const std::regex polyline("<polyline class=\"mean\"[^>]*points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), polyline); it != std::sregex_iterator(); ++it)
    CHECK(count((*it)[1].str(), ",") == 3);
  CHECK(svg == slurp(fs::path(SDE_FIXTURE_DIR) / "sweep_small.svg"));
}

TEST_CASE("one algorithm at one budget gives a single marker") {
  const auto csv = scratch("single.csv");
  std::ofstream(csv) << sdebench::sweep_header << "\nx,slq,10,1,1,0.5,10\nx,slq,10,2,2,0.25,10\n";
  const auto svg_path = scratch("single.svg");
  REQUIRE(cli({"plot", "--in", csv.string(), "--out", svg_path.string()}).code == 0);
  const std::string svg = slurp(svg_path);
  CHECK(count(svg, "<circle") == 1);
  CHECK(count(svg, "<polyline") == 0);
}

TEST_CASE("empty or malformed CSV is an error") {
  const auto empty = scratch("empty.csv");
  std::ofstream(empty) << sdebench::sweep_header << "\n";
  CHECK(cli({"plot", empty.string(), scratch("e.svg").string()}).code == 1);
  const auto nothing = scratch("nothing.csv");
  std::ofstream(nothing) << "";
  CHECK(cli({"plot", nothing.string(), scratch("n.svg").string()}).code == 1);
  std::istringstream bad(std::string(sdebench::sweep_header) + "\nx,slq,ten,1,1,0.5,10\n");
  CHECK_THROWS_AS(sdebench::read_sweep_csv(bad), sde::ParseError);
}

TEST_CASE("percentile") {
  CHECK(sdebench::percentile({1, 2, 3, 4, 5}, 0.5) == 3.0);
  CHECK(sdebench::percentile({1, 2, 3, 4, 5}, 0.1) == doctest::Approx(1.4));
  CHECK(sdebench::percentile({7}, 0.9) == 7.0);
}
