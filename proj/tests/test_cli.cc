#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

// Drives the installed command-line binary end to end.  The binary path
// arrives through CIRCLECOUNT_BIN so the same test runs against any build
// tree; every assertion below is against frozen output bytes or parsed
// fields, never against internals.

namespace {

std::string bin_path() {
  const char *env = std::getenv("CIRCLECOUNT_BIN");
  REQUIRE_MESSAGE(env != nullptr, "CIRCLECOUNT_BIN must point at the binary");
  return env;
}

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::filesystem::path scratch_file(const std::string &name) {
  return std::filesystem::temp_directory_path() / ("circlecount_cli_" + name);
}

void write_file(const std::filesystem::path &p, const std::string &content) {
  std::ofstream f(p);
  REQUIRE(f.good());
  f << content;
}

std::string read_file(const std::filesystem::path &p) {
  std::ifstream f(p);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

RunResult run_cli(const std::string &args) {
  std::filesystem::path errfile = scratch_file("stderr.txt");
  std::string cmd = "\"" + bin_path() + "\" " + args + " 2>" + errfile.string();
  FILE *pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int rc = pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.err = read_file(errfile);
  return r;
}

std::vector<std::string> lines_of(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split_semis(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ';') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

const char *kToyConfig =
    "{\"form\":\"x1*x2\",\"s\":2,\"m\":2,\"b\":\"0\",\"P\":1,\"qmax\":4,"
    "\"R\":0.25,\"seed\":9}";

}  // namespace

TEST_CASE("missing or unknown subcommands exit with status 1") {
  RunResult none = run_cli("");
  CHECK(none.status == 1);
  RunResult bogus = run_cli("frobnicate");
  CHECK(bogus.status == 1);
  CHECK(bogus.out.empty());
}

TEST_CASE("expand prints the coefficient forms and the discriminant") {
  RunResult r = run_cli("expand --form \"x1*x2\" --s 2 --m 2");
  CHECK(r.status == 0);
  std::vector<std::string> ls = lines_of(r.out);
  REQUIRE(ls.size() == 6);
  CHECK(ls[0] == "base x1*x2");
  CHECK(ls[1] == "s=2 m=2 d=2 r=3");
  CHECK(ls[2] == "(1,1)  A=1  x1*x2");
  CHECK(ls[3] == "(1,2)  A=2  x1*x4 + x2*x3");
  CHECK(ls[4] == "(2,2)  A=1  x3*x4");
  CHECK(ls[5] == "disc  x1^2*x4^2 - 2*x1*x2*x3*x4 + x2^2*x3^2");
}

TEST_CASE("count emits one CSV row with the exact value") {
  RunResult r = run_cli("count --form \"x1*x2\" --s 2 --m 2 --P 1 --b 0");
  CHECK(r.status == 0);
  CHECK(r.out == "P;b;count\n1;0;17\n");
}

TEST_CASE("config files drive the run and explicit flags override them") {
  std::filesystem::path cfg = scratch_file("toy.json");
  write_file(cfg, kToyConfig);
  RunResult base = run_cli("count --config " + cfg.string());
  CHECK(base.status == 0);
  CHECK(base.out == "P;b;count\n1;0;17\n");
  RunResult over = run_cli("count --config " + cfg.string() + " --P 0");
  CHECK(over.status == 0);
  CHECK(over.out == "P;b;count\n0;0;1\n");
}

TEST_CASE("check reports the verdict on both sides of the threshold") {
  RunResult hi = run_cli("check --s 205 --d 2 --m 2");
  CHECK(hi.status == 0);
  nlohmann::json jhi = nlohmann::json::parse(hi.out);
  CHECK(jhi.at("verdict").get<bool>() == true);
  CHECK(jhi.at("excluded_case").get<bool>() == false);
  CHECK(jhi.at("eta_star").get<std::string>() == "4/13");

  RunResult lo = run_cli("check --s 204 --d 2 --m 2");
  CHECK(lo.status == 0);
  nlohmann::json jlo = nlohmann::json::parse(lo.out);
  CHECK(jlo.at("verdict").get<bool>() == false);
  CHECK(jlo.at("verdict_small_degree").get<bool>() == false);
  CHECK(jlo.at("verdict_large_degree").get<bool>() == true);
}

TEST_CASE("sums evaluates rational and arc points from a file") {
  std::filesystem::path one = scratch_file("one_point.json");
  write_file(one, "[{\"type\":\"rational\",\"q\":1,\"a0\":0,\"a\":[0,0,0]}]");
  RunResult unit = run_cli("sums " + one.string() + " --form \"x1*x2\" --s 2 --m 2 --P 1");
  CHECK(unit.status == 0);
  CHECK(unit.out == "point;re;im;abs\n0;1;0;1\n");

  std::filesystem::path pts = scratch_file("two_points.json");
  write_file(pts,
             "[{\"type\":\"rational\",\"q\":3,\"a0\":1,\"a\":[0,1,2]},"
             "{\"type\":\"arc\",\"alphas\":[0.25,0.5,0.125],\"alpha0\":0.0625}]");
  RunResult r = run_cli("sums " + pts.string() + " --form \"x1*x2\" --s 2 --m 2 --P 2");
  CHECK(r.status == 0);
  std::vector<std::string> ls = lines_of(r.out);
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == "point;re;im;abs");
  for (int row = 1; row <= 2; ++row) {
    std::vector<std::string> f = split_semis(ls[row]);
    REQUIRE(f.size() == 4);
    CHECK(f[0] == std::to_string(row - 1));
    double re = std::stod(f[1]), im = std::stod(f[2]), ab = std::stod(f[3]);
    CHECK(ab == doctest::Approx(std::hypot(re, im)).epsilon(1e-12));
  }
}

TEST_CASE("budget exhaustion exits with status 2") {
  RunResult r = run_cli("count --form \"x1*x2\" --s 2 --m 2 --P 3 --b 0 --max-evals 10");
  CHECK(r.status == 2);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("the excluded shape warns on stderr but still runs") {
  RunResult r = run_cli("expand --form \"x1^4 + x2^4\" --s 2 --m 2");
  CHECK(r.status == 0);
  CHECK(r.err.find("excluded case d == 2m") != std::string::npos);
  CHECK(lines_of(r.out).size() >= 2);
}

TEST_CASE("schedule mode descends monotonically to the natural window") {
  RunResult r = run_cli(
      "arcs --schedule eta_from_one --form \"x1*x2\" --s 2 --m 2 --k 102.5 --l 25.625");
  CHECK(r.status == 0);
  std::vector<std::string> ls = lines_of(r.out);
  REQUIRE(ls.size() >= 3);
  CHECK(ls[0] == "index;value");
  CHECK(ls[1] == "0;1");
  double prev = 2.0;
  for (size_t i = 1; i < ls.size(); ++i) {
    std::vector<std::string> f = split_semis(ls[i]);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == std::to_string(i - 1));
    double v = std::stod(f[1]);
    CHECK(v < prev);
    prev = v;
  }
  // the endpoint is the natural window k/((2m-1)k + l), here exactly 4/13
  CHECK(prev == 4.0 / 13.0);

  RunResult bad = run_cli(
      "arcs --schedule eta_from_one --form \"x1*x2\" --s 2 --m 2 --k 3 --l 2");
  CHECK(bad.status == 1);
  CHECK(bad.err.find("infeasible") != std::string::npos);
}

TEST_CASE("volume mode emits a consistent row and is deterministic") {
  std::string args =
      "arcs --volume-family M0 --form \"x1*x2\" --s 2 --m 2 --P 100 --eta 0.5 --seed 7";
  RunResult r = run_cli(args);
  CHECK(r.status == 0);
  std::vector<std::string> ls = lines_of(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "family;P;estimate;ci_low;ci_high;bound;ratio;hits;samples");
  std::vector<std::string> f = split_semis(ls[1]);
  REQUIRE(f.size() == 9);
  CHECK(f[0] == "M0");
  CHECK(f[1] == "100");
  double est = std::stod(f[2]), lo = std::stod(f[3]), hi = std::stod(f[4]);
  double bound = std::stod(f[5]), ratio = std::stod(f[6]);
  CHECK(lo <= est);
  CHECK(est <= hi);
  CHECK(bound == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(ratio == doctest::Approx(est / bound).epsilon(1e-9));
  unsigned long hits = std::stoul(f[7]), samples = std::stoul(f[8]);
  CHECK(hits <= samples);
  CHECK(samples >= 10000);
  RunResult again = run_cli(args);
  CHECK(again.out == r.out);
}

TEST_CASE("box-sweep mode reports one row per box size") {
  RunResult r = run_cli("arcs --form \"x1*x2\" --s 2 --m 2 --eta 0.3 --seed 5");
  CHECK(r.status == 0);
  std::vector<std::string> ls = lines_of(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == "P;exponent;minor_points;max_abs;max_ratio");
  long expect_p = 2;
  for (size_t i = 1; i < ls.size(); ++i, ++expect_p) {
    std::vector<std::string> f = split_semis(ls[i]);
    REQUIRE(f.size() == 5);
    CHECK(f[0] == std::to_string(expect_p));
    CHECK(std::stod(f[4]) > 0.0);
  }
}

TEST_CASE("chi-p and series emit the frozen small tables") {
  RunResult chip = run_cli("chi-p --form \"x1*x2\" --s 2 --m 2 --b 0 --prime 2 --depth 2");
  CHECK(chip.status == 0);
  CHECK(chip.out == "i;chi\n0;1\n1;7\n2;40\n");

  RunResult ser = run_cli("series --form \"x1*x2\" --s 2 --m 2 --b 0 --qmax 4");
  CHECK(ser.status == 0);
  CHECK(ser.out == "q;value\n1;1\n2;6\n3;16\n4;33\n");
}

TEST_CASE("chi-inf traces the refinement ladder") {
  RunResult r = run_cli("chi-inf --form \"x1*x2\" --s 2 --m 2 --b 0 --P 2 --R 0.25");
  CHECK(r.status == 0);
  std::vector<std::string> ls = lines_of(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == "R;value;err");
  const char *radii[] = {"0.0625", "0.125", "0.25"};
  for (int i = 1; i <= 3; ++i) {
    std::vector<std::string> f = split_semis(ls[i]);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == radii[i - 1]);
    CHECK(!f[1].empty());
    if (i < 3)
      CHECK(f[2].empty());
    else
      CHECK(!f[2].empty());
  }
}

TEST_CASE("predict writes byte-identical reports and a CSV companion") {
  std::filesystem::path cfg = scratch_file("predict_cfg.json");
  write_file(cfg, kToyConfig);
  std::filesystem::path out1 = scratch_file("predict_a.json");
  std::filesystem::path out2 = scratch_file("predict_b.json");
  RunResult r1 = run_cli("predict --config " + cfg.string() + " --out " + out1.string());
  RunResult r2 = run_cli("predict --config " + cfg.string() + " --out " + out2.string());
  CHECK(r1.status == 0);
  CHECK(r2.status == 0);
  CHECK(r1.out.empty());

  std::string j1 = read_file(out1), j2 = read_file(out2);
  REQUIRE(!j1.empty());
  CHECK(j1 == j2);
  std::filesystem::path csv1 = out1, csv2 = out2;
  csv1.replace_extension(".csv");
  csv2.replace_extension(".csv");
  std::string c1 = read_file(csv1), c2 = read_file(csv2);
  REQUIRE(!c1.empty());
  CHECK(c1 == c2);

  nlohmann::json rep = nlohmann::json::parse(j1);
  CHECK(rep.at("schema_version").get<int>() == 1);
  CHECK(rep.at("exact").at("count").get<std::string>() == "17");
  CHECK(rep.at("transform_check").at("count").get<std::string>() == "17");
  CHECK(rep.at("prediction").at("exponent").get<long long>() == -6);
  CHECK(rep.at("hypothesis").at("eta_star").get<std::string>() == "4/13");
  std::string hash = rep.at("config_hash").get<std::string>();
  CHECK(hash.size() == 16);
  CHECK(hash.find_first_not_of("0123456789abcdef") == std::string::npos);

  CHECK(lines_of(c1)[0] == "key;value");
  CHECK(c1.find("config_hash;" + hash) != std::string::npos);
  CHECK(c1.find("prediction.exponent;-6") != std::string::npos);
}
