#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>

#include "doctest.h"

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cone::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string temp_path(const char* name) { return std::string("/tmp/cone_cli_test_") + name; }

}  // namespace

TEST_CASE("eval bessel with both methods on the real line") {
  const Run r = cli({"eval", "bessel", "--algebra", "r", "--lambda", "2", "--x", "1", "--method", "both", "--samples", "200000"});
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  const json j = json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["config"]["command"] == json({"eval", "bessel"}));
  const double series = j["series"]["value"]["re"], integral = j["integral"]["value"]["re"];
  const double sigma = j["integral"]["error"];
  // I_2(1) = Gamma(2) I_1(2) on the real line.
  CHECK(series == doctest::Approx(boost::math::cyl_bessel_i(1.0, 2.0)).epsilon(1e-12));
  CHECK(j["delta"].get<double>() == doctest::Approx(std::abs(series - integral)));
  CHECK(std::abs(series - integral) <= std::max(3 * sigma, 1e-3 * series));
}

TEST_CASE("parameter precondition exits with a math error") {
  const Run r = cli({"eval", "bessel", "--lambda", "1", "--k", "0", "--algebra", "symr2"});
  CHECK(r.code == cone::cli::kMath);
  CHECK(r.out.empty());
  CHECK(r.err.find("ParameterOutOfRange") != std::string::npos);
  const Run cone_err = cli({"semigroup", "kernel", "--algebra", "symr2", "--lambda", "3", "--x", "[1,-1]"});
  CHECK(cone_err.code == cone::cli::kMath);
  CHECK(cone_err.err.find("NotInCone") != std::string::npos);
}

TEST_CASE("argument errors exit with code 2") {
  CHECK(cli({"eval", "bessel", "--bogus"}).code == cone::cli::kUsage);
  CHECK(cli({"eval", "bessel", "--x", "[1,"}).code == cone::cli::kUsage);
  CHECK(cli({"eval", "bessel", "--algebra", "octonion3"}).code == cone::cli::kUsage);
  CHECK(cli({"eval", "bessel", "--kind", "K"}).code == cone::cli::kUsage);
  CHECK(cli({"eval"}).code == cone::cli::kUsage);
  CHECK(cli({}).code == cone::cli::kUsage);
  CHECK(cli({"tabulate", "bessel", "--points", "0"}).code == cone::cli::kUsage);
  CHECK(cli({"tabulate", "bessel", "--x-min", "3", "--x-max", "1"}).code == cone::cli::kUsage);
  CHECK(cli({"--config", "/nonexistent/config.json"}).code == cone::cli::kUsage);
  const Run help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("tabulate") != std::string::npos);
}

TEST_CASE("Monte Carlo output is byte identical for a fixed seed") {
  const std::vector<std::string> args = {"eval", "bessel", "--algebra", "symr2", "--lambda", "4", "--x", "[0.8,0.3]",
                                         "--method", "integral", "--samples", "50000", "--seed", "7"};
  const Run a = cli(args), b = cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::vector<std::string> one = args;
  one.insert(one.begin(), {"--threads", "1"});
  const json ja = json::parse(a.out), j1 = json::parse(cli(one).out);
  CHECK(ja["integral"] == j1["integral"]);
  std::vector<std::string> other = args;
  other.back() = "8";
  CHECK(json::parse(cli(other).out)["integral"]["value"] != ja["integral"]["value"]);
}

TEST_CASE("rerunning from the echoed config reproduces the output") {
  const Run a = cli({"eval", "bessel", "--algebra", "spin3", "--lambda", "4.5", "--x", "[0.6,0.2]", "--method", "both",
                     "--samples", "40000", "--seed", "3"});
  REQUIRE(a.code == 0);
  const std::string path = temp_path("config.json");
  {
    std::ofstream f(path);
    f << json::parse(a.out)["config"].dump();
  }
  const Run b = cli({"--config", path});
  CHECK(b.code == 0);
  CHECK(a.out == b.out);
  // The whole output document is accepted as well.
  {
    std::ofstream f(path);
    f << a.out;
  }
  CHECK(cli({"--config", path}).out == a.out);
  std::remove(path.c_str());
}

TEST_CASE("kernel evaluation") {
  const Run r = cli({"eval", "kernel", "--algebra", "r", "--lambda", "2.5", "--t-re", "0.8", "--x", "1.5", "--y", "0.7"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const double t = 0.8, x = 1.5, y = 0.7, lam = 2.5, s = std::sinh(t);
  const double z = 2 * std::sqrt(x * y) / s;
  const double ref = std::exp(-(x + y) / std::tanh(t)) * std::tgamma(lam) * std::pow(z / 2, 1 - lam) *
                     boost::math::cyl_bessel_i(lam - 1, z);
  CHECK(j["value"]["re"].get<double>() == doctest::Approx(ref).epsilon(1e-11));
  CHECK(j["meta"]["decay_exponent"].get<double>() == doctest::Approx(std::tanh(t / 2)).epsilon(1e-14));
  const Run alias = cli({"semigroup", "kernel", "--algebra", "r", "--lambda", "2.5", "--t-re", "0.8", "--x", "1.5", "--y", "0.7"});
  CHECK(json::parse(alias.out)["value"] == j["value"]);
}

TEST_CASE("tabulate Bessel values") {
  const Run r = cli({"tabulate", "bessel", "--algebra", "r", "--lambdas", "1,2,3", "--x-min", "0", "--x-max", "4",
                     "--points", "41"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 1 + 3 * 41);
  CHECK(rows[0] == std::vector<std::string>{"lambda", "x", "re", "im", "error"});
  for (size_t i = 1; i < rows.size(); i += 17) {
    const double lam = std::stod(rows[i][0]), x = std::stod(rows[i][1]), v = std::stod(rows[i][2]);
    const double ref = x == 0 ? 1.0 : std::tgamma(lam) * std::pow(x, (1 - lam) / 2) * boost::math::cyl_bessel_i(lam - 1, 2 * std::sqrt(x));
    CHECK(v == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("tabulate kernel decay and bound ratios") {
  const std::string path = temp_path("decay.csv");
  const Run r = cli({"tabulate", "kernel-decay", "--algebra", "symr2", "--lambda", "2", "--t-re", "1", "--s-max", "10",
                     "--points", "21", "--out", path});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["rows"] == 21);
  std::ifstream f(path);
  const auto rows = csv_rows(std::string(std::istreambuf_iterator<char>(f), {}));
  REQUIRE(rows.size() == 22);
  for (size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][3]) < std::stod(rows[i - 1][3]));
  std::remove(path.c_str());

  const Run b = cli({"tabulate", "bound-ratio", "--algebra", "r", "--lambda", "3", "--samples", "100"});
  REQUIRE(b.code == 0);
  const auto br = csv_rows(b.out);
  REQUIRE(br.size() > 100);
  double c_star = std::stod(br[1][4]), worst = 0;
  for (size_t i = 1; i < br.size(); ++i) worst = std::max(worst, std::stod(br[i][3]));
  CHECK(worst <= c_star);
}

TEST_CASE("tabulate Pochhammer and Gamma") {
  const Run p = cli({"tabulate", "poch", "--algebra", "symr2", "--s-re", "2.5", "--max-weight", "2"});
  REQUIRE(p.code == 0);
  const auto rows = csv_rows(p.out);
  REQUIRE(rows.size() == 5);
  // (s)_{(1,1)} = s (s - 1/2) for d = 1.
  CHECK(rows[4][0] == "1 1");
  CHECK(std::stod(rows[4][3]) == doctest::Approx(2.5 * 2.0));
  const Run g = cli({"tabulate", "gamma", "--algebra", "hermc2", "--s-min", "3", "--s-max", "3", "--points", "1"});
  REQUIRE(g.code == 0);
  const auto gr = csv_rows(g.out);
  REQUIRE(gr.size() == 2);
  CHECK(std::stod(gr[1][2]) == doctest::Approx(2 * M_PI * 2.0 * 1.0).epsilon(1e-12));
}

TEST_CASE("check commands report JSON") {
  const std::string path = temp_path("bound.csv");
  const Run b = cli({"bessel", "check-bound", "--algebra", "r", "--lambda", "3", "--samples", "200", "--csv", path});
  REQUIRE(b.code == 0);
  const json jb = json::parse(b.out);
  CHECK(jb["violations"] == 0);
  CHECK(jb["validation_max"].get<double>() <= jb["c_star"].get<double>());
  std::remove(path.c_str());

  const Run c = cli({"semigroup", "compose-check", "--algebra", "r", "--lambda", "3", "--s-re", "0.5", "--t-re", "0.5"});
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out)["discrepancy"].get<double>() <= 1e-6);

  const Run k = cli({"semigroup", "bound-check", "--algebra", "r", "--lambda", "2", "--t-re", "0.5", "--t-im", "1",
                     "--samples", "100", "--csv", path});
  REQUIRE(k.code == 0);
  const json jk = json::parse(k.out);
  CHECK(jk["violations"] == 0);
  CHECK(jk["kappa"].get<double>() > 0);
  std::ifstream f(path);
  const auto rows = csv_rows(std::string(std::istreambuf_iterator<char>(f), {}));
  CHECK(rows[0] == std::vector<std::string>{"split", "tr_x", "tr_y", "abs_k", "bound"});
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i][0] == "validation") CHECK(std::stod(rows[i][3]) <= std::stod(rows[i][4]));
  std::remove(path.c_str());
}

TEST_CASE("sample-domain on the real line") {
  const Run r = cli({"sample-domain", "--algebra", "r", "--samples", "100000", "--seed", "5"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const double p = M_PI / 4, n = j["samples"];
  CHECK(std::abs(j["acceptance"].get<double>() - p) <= 3 * std::sqrt(p * (1 - p) / n));
  CHECK(std::abs(j["volume"].get<double>() - M_PI) <= 3 * j["volume_error"].get<double>());
}

TEST_CASE("verify suites") {
  const Run r = cli({"verify", "core", "--quick", "--algebra", "spin4"});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["failed"] == 0);
  CHECK(j["passed"].get<int>() > 0);
  for (const json& c : j["checks"]) CHECK(c["detail"]["algebra"] == "spin4");
  const Run b = cli({"verify", "bessel", "--quick", "--algebra", "r"});
  CHECK(b.code == 0);
  CHECK(json::parse(b.out)["table"].size() == 9);
  CHECK(cli({"verify", "core", "--algebra", "nope"}).code == cone::cli::kUsage);
}
