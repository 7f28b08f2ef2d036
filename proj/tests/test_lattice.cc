#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "circle/lattice.hh"

using namespace circle;

namespace {

ParametricExpansion exp_of(const char *text, int s, int m = 2) {
  return expand_parametric(parse_form(text, s), m);
}

TupleMatrix cols(int s, std::vector<std::vector<long>> columns) {
  TupleMatrix x(s, static_cast<int>(columns.size()));
  for (size_t i = 0; i < columns.size(); ++i)
    for (int n = 0; n < s; ++n) x.at(n, static_cast<int>(i)) = columns[i][n];
  return x;
}

// plain full-box reference without pruning or parallel splitting
std::vector<TupleMatrix> brute_solutions(const ParametricExpansion &exp, long P,
                                         bool filtered, const ZZ &b) {
  std::vector<TupleMatrix> out;
  int total = exp.m * exp.s;
  std::vector<long> v(total, -P);
  while (true) {
    TupleMatrix x(exp.s, exp.m);
    for (int i = 0; i < total; ++i) x.e[i] = v[i];
    bool ok = true;
    for (const MultiIndex &j : exp.index_set)
      if (exp.phi(j).eval(x.e) != 0) { ok = false; break; }
    if (ok && filtered && gram_det(x) != b) ok = false;
    if (ok) out.push_back(x);
    int pos = total - 1;
    while (pos >= 0 && v[pos] == P) v[pos--] = -P;
    if (pos < 0) break;
    ++v[pos];
  }
  return out;
}

}  // namespace

TEST_CASE("rank_of handles the documented cases") {
  CHECK(rank_of(cols(2, {{0, 0}, {0, 0}})) == 0);
  CHECK(rank_of(cols(2, {{1, 0}, {0, 1}})) == 2);
  CHECK(rank_of(cols(2, {{1, 2}, {2, 4}})) == 1);
}

TEST_CASE("saturation_index matches hand Smith forms") {
  CHECK(saturation_index(cols(2, {{1, 0}, {0, 1}})) == 1);
  CHECK(saturation_index(cols(2, {{2, 0}, {0, 2}})) == 4);
  CHECK(saturation_index(cols(3, {{1, 0, 0}, {0, 2, 0}})) == 2);
  CHECK_THROWS_AS(saturation_index(cols(2, {{1, 2}, {2, 4}})), RankDeficientError);
  CHECK_THROWS_AS(saturation_index(cols(2, {{0, 0}, {0, 0}})), RankDeficientError);
}

TEST_CASE("smith saturation basis spans the saturation") {
  SmithResult sr = smith_saturation(cols(2, {{2, 0}, {0, 2}}));
  REQUIRE(sr.divisors.size() == 2);
  CHECK(sr.divisors[0] * sr.divisors[1] == 4);
  // saturation of 2Z^2 is Z^2 itself
  CHECK(gram_det(sr.sat_basis) == 1);

  SmithResult sr2 = smith_saturation(cols(3, {{1, 0, 0}, {0, 2, 0}}));
  CHECK(gram_det(sr2.sat_basis) == 1);
}

TEST_CASE("box counts match the frozen enumeration values") {
  ParametricExpansion xy = exp_of("x1*x2", 2);
  CHECK(count_Nm(xy, 0) == 1);
  CHECK(count_Nm(xy, 1) == 17);
  CHECK(count_Nm_b(xy, 1, ZZ(0)) == 17);
  CHECK(count_Nm_b(xy, 1, ZZ(1)) == 0);
  CHECK(count_Nm(xy, 2) == 49);
  CHECK(count_Nm_b(xy, 2, ZZ(0)) == 49);

  ParametricExpansion sq = exp_of("x1^2 + x2^2", 2);
  CHECK(count_Nm(sq, 0) == 1);
  CHECK(count_Nm(sq, 1) == 1);
  CHECK(count_Nm(sq, 2) == 1);

  ParametricExpansion cu = exp_of("x1^3 + x2^3 + x3^3", 3);
  CHECK(count_Nm(cu, 1) == 25);
  CHECK(count_Nm(cu, 2) == 73);
  CHECK(count_Nm_b(cu, 2, ZZ(0)) == 73);
}

TEST_CASE("stream agrees with the unpruned brute-force box scan") {
  for (const char *text : {"x1*x2", "x1^2 + x2^2"}) {
    ParametricExpansion exp = exp_of(text, 2);
    for (long P = 0; P <= 2; ++P) {
      std::vector<TupleMatrix> expect = brute_solutions(exp, P, false, ZZ(0));
      std::vector<TupleMatrix> got;
      EnumOptions opt;
      enumerate_solutions(exp, P, opt, [&](const SolutionRecord &rec) { got.push_back(rec.x); });
      REQUIRE(got.size() == expect.size());
      for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == expect[i]);
    }
  }
}

TEST_CASE("records satisfy the rank and primitivity invariants") {
  ParametricExpansion xy = exp_of("x1*x2", 2);
  int full_rank = 0;
  EnumOptions opt;
  enumerate_solutions(xy, 2, opt, [&](const SolutionRecord &rec) {
    CHECK((rec.disc_value == 0) == (rec.rank < xy.m));
    CHECK(rec.has_sat == (rec.rank == xy.m));
    if (rec.has_sat) {
      ++full_rank;
      CHECK(rec.sat_index >= 1);
      CHECK(rec.primitive == (rec.sat_index == 1));
    }
  });
  CHECK(full_rank == 0);  // every solution of this toy lies on one axis
}

TEST_CASE("discriminant histogram partitions the total count") {
  for (const char *text : {"x1*x2", "x1^2 + x2^2"}) {
    ParametricExpansion exp = exp_of(text, 2);
    for (long P = 0; P <= 2; ++P) {
      std::map<ZZ, ZZ> hist = count_by_disc(exp, P);
      ZZ total = 0;
      for (const auto &kv : hist) {
        total += kv.second;
        CHECK(count_Nm_b(exp, P, kv.first) == kv.second);
      }
      CHECK(total == count_Nm(exp, P));
    }
  }
}

TEST_CASE("count is monotone in the box radius") {
  ParametricExpansion cu = exp_of("x1^3 + x2^3 + x3^3", 3);
  ZZ prev = -1;
  for (long P = 0; P <= 2; ++P) {
    ZZ n = count_Nm(cu, P);
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("discriminant transforms with the square of a change of basis") {
  Rng rng(42);
  int done = 0;
  while (done < 200) {
    TupleMatrix x(3, 2);
    for (int i = 0; i < 6; ++i)
      x.e[i] = static_cast<long>(rng.below(11)) - 5;
    if (rank_of(x) != 2) continue;
    long a = static_cast<long>(rng.below(7)) - 3;
    long b = static_cast<long>(rng.below(7)) - 3;
    long c = static_cast<long>(rng.below(7)) - 3;
    long d = static_cast<long>(rng.below(7)) - 3;
    ZZ det = ZZ(a) * d - ZZ(b) * c;
    if (det == 0) continue;
    TupleMatrix y(3, 2);
    for (int n = 0; n < 3; ++n) {
      y.at(n, 0) = a * x.at(n, 0) + c * x.at(n, 1);
      y.at(n, 1) = b * x.at(n, 0) + d * x.at(n, 1);
    }
    CHECK(gram_det(y) == det * det * gram_det(x));
    ++done;
  }
}

TEST_CASE("discriminant factors through the saturation") {
  Rng rng(43);
  int done = 0;
  while (done < 100) {
    TupleMatrix x(3, 2);
    for (int i = 0; i < 6; ++i)
      x.e[i] = static_cast<long>(rng.below(13)) - 6;
    if (rank_of(x) != 2) continue;
    SmithResult sr = smith_saturation(x);
    ZZ idx = saturation_index(x);
    CHECK(gram_det(x) == idx * idx * gram_det(sr.sat_basis));
    ++done;
  }
}

TEST_CASE("parallel enumeration keeps order and set") {
  ParametricExpansion xy = exp_of("x1*x2", 2);
  std::vector<TupleMatrix> serial, parallel;
  EnumOptions opt;
  enumerate_solutions(xy, 2, opt, [&](const SolutionRecord &r) { serial.push_back(r.x); });
  opt.workers = 4;
  enumerate_solutions(xy, 2, opt, [&](const SolutionRecord &r) { parallel.push_back(r.x); });
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);
}

TEST_CASE("budget gate rejects oversized boxes") {
  ParametricExpansion xy = exp_of("x1*x2", 2);
  Budget tight(10);
  EnumOptions opt;
  opt.budget = &tight;
  CHECK_THROWS_AS(
      enumerate_solutions(xy, 1, opt, [](const SolutionRecord &) {}),
      BudgetError);
  Budget enough(100000);
  CHECK(count_Nm(xy, 1, 1, &enough) == 17);
}

TEST_CASE("csv sink emits the documented columns") {
  ParametricExpansion sq = exp_of("x1^2 + x2^2", 2);
  std::ostringstream os;
  EnumOptions opt;
  write_solutions_csv(os, sq, 1, opt);
  CHECK(os.str() ==
        "entries;disc;rank;sat_index;primitive\n"
        "0,0,0,0;0;0;;\n");

  // a full-rank record renders its saturation fields
  ParametricExpansion xy = exp_of("x1*x2", 2);
  std::ostringstream os2;
  write_solutions_csv(os2, xy, 1, opt);
  std::string out = os2.str();
  CHECK(std::count(out.begin(), out.end(), '\n') == 18);  // header + 17 records
  CHECK(out.find("-1,0,-1,0;0;1;;") != std::string::npos);
}

TEST_CASE("filtered stream respects the discriminant") {
  ParametricExpansion xy = exp_of("x1*x2", 2);
  EnumOptions opt;
  opt.has_filter = true;
  opt.b = 0;
  int n = 0;
  enumerate_solutions(xy, 1, opt, [&](const SolutionRecord &rec) {
    CHECK(rec.disc_value == 0);
    ++n;
  });
  CHECK(n == 17);

  opt.b = 5;
  int none = 0;
  enumerate_solutions(xy, 1, opt, [&](const SolutionRecord &) { ++none; });
  CHECK(none == 0);
}
