#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "circle/forms.hh"
#include "circle/util.hh"

using namespace circle;

namespace {

ZZ rnd_int(Rng &rng, long lo, long hi) {
  return ZZ(lo + static_cast<long>(rng.below(static_cast<uint64_t>(hi - lo + 1))));
}

TupleMatrix rnd_tuple(Rng &rng, int s, int m, long bound) {
  TupleMatrix x(s, m);
  for (int i = 0; i < m; ++i)
    for (int n = 0; n < s; ++n) x.at(n, i) = rnd_int(rng, -bound, bound);
  return x;
}

std::vector<ZZ> rnd_vec(Rng &rng, int s, long bound) {
  std::vector<ZZ> v(s);
  for (int n = 0; n < s; ++n) v[n] = rnd_int(rng, -bound, bound);
  return v;
}

Form toy_xy() { return parse_form("x1*x2", 2); }
Form toy_sumsq() { return parse_form("x1^2 + x2^2", 2); }
Form toy_cubes() { return parse_form("x1^3 + x2^3 + x3^3", 3); }

// F(sum_i t_i x_i) evaluated directly, the expansion ground truth
ZZ substituted_eval(const Form &F, const TupleMatrix &x, const std::vector<ZZ> &t) {
  std::vector<ZZ> pt(F.nvars, ZZ(0));
  for (int n = 0; n < F.nvars; ++n)
    for (int i = 0; i < x.m; ++i) pt[n] += t[i] * x.at(n, i);
  return F.eval(pt);
}

ZZ expansion_eval(const ParametricExpansion &exp, const TupleMatrix &x, const std::vector<ZZ> &t) {
  ZZ acc = 0;
  for (const MultiIndex &j : exp.index_set) {
    ZZ tpow = 1;
    for (int v : j.entries) tpow *= t[v - 1];
    acc += exp.phi(j).eval(x.e) * tpow;
  }
  return acc;
}

}  // namespace

TEST_CASE("parser handles the documented grammar") {
  Form f = toy_xy();
  CHECK(f.terms.size() == 1);
  CHECK(f.degree() == 2);

  Form g = toy_sumsq();
  CHECK(g.terms.size() == 2);
  CHECK(g.degree() == 2);

  Form h = parse_form("x1^5 + x2^5 + x3^5", 3);
  CHECK(h.terms.size() == 3);
  CHECK(h.degree() == 5);

  Form k = parse_form("3*x1^2*x2 - x3^3", 3);
  CHECK(k.terms.size() == 2);
  CHECK(k.eval({ZZ(1), ZZ(2), ZZ(1)}) == 5);

  // cancellation leaves the zero form
  CHECK(parse_form("x1 - x1", 1).is_zero());
}

TEST_CASE("parser reports positions on bad input") {
  CHECK_THROWS_AS(parse_form("x3", 2), ParseError);
  CHECK_THROWS_AS(parse_form("x1 + + x2", 2), ParseError);
  CHECK_THROWS_AS(parse_form("", 2), ParseError);
  CHECK_THROWS_AS(parse_form("x1^", 2), ParseError);
  try {
    parse_form("x1 * y", 2);
    CHECK(false);
  } catch (const ParseError &e) {
    CHECK(e.pos >= 5);
  }
}

TEST_CASE("parse-print-parse is idempotent") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Form f(3);
    for (int t = 0; t < 4; ++t) {
      std::vector<int> e(3);
      for (int v = 0; v < 3; ++v) e[v] = static_cast<int>(rng.below(4));
      f.add_term(e, rnd_int(rng, -9, 9));
    }
    if (f.is_zero()) continue;
    Form g = parse_form(print_form(f), 3);
    CHECK(g == f);
    CHECK(print_form(g) == print_form(f));
  }
}

TEST_CASE("rank_r matches the multiset count") {
  CHECK(rank_r(2, 2) == 3);
  CHECK(rank_r(2, 3) == 4);
  CHECK(rank_r(1, 7) == 1);
  CHECK(rank_r(3, 2) == 6);
  CHECK_THROWS_AS(rank_r(1000, 50), std::overflow_error);
}

TEST_CASE("expansion of x1^2 with m=2 gives the three squares") {
  ParametricExpansion exp = expand_parametric(parse_form("x1^2", 1), 2);
  CHECK(exp.r == 3);
  CHECK(exp.index_set.size() == 3);
  CHECK(exp.index_set[0].entries == std::vector<int>{1, 1});
  CHECK(exp.index_set[1].entries == std::vector<int>{1, 2});
  CHECK(exp.index_set[2].entries == std::vector<int>{2, 2});

  // variables: X_{1,1} -> x1, X_{2,1} -> x2 in the flat 2-variable ring
  CHECK(exp.phi(exp.index_set[0]) == parse_form("x1^2", 2));
  CHECK(exp.phi(exp.index_set[1]) == parse_form("2*x1*x2", 2));
  CHECK(exp.phi(exp.index_set[2]) == parse_form("x2^2", 2));
}

TEST_CASE("expansion of x1*x2 with m=2 matches the hand computation") {
  ParametricExpansion exp = expand_parametric(toy_xy(), 2);
  // X_{1,1},X_{1,2},X_{2,1},X_{2,2} -> x1,x2,x3,x4
  CHECK(exp.phi(MultiIndex({1, 2})) == parse_form("x1*x4 + x2*x3", 4));
  CHECK(exp.phi(MultiIndex({1, 1})) == parse_form("x1*x2", 4));
  CHECK(exp.phi(MultiIndex({2, 2})) == parse_form("x3*x4", 4));
}

TEST_CASE("expansion identity holds exactly on seeded random points") {
  Rng rng(101);
  for (const Form &F : {toy_xy(), toy_sumsq(), toy_cubes()}) {
    ParametricExpansion exp = expand_parametric(F, 2);
    CHECK(static_cast<int64_t>(exp.index_set.size()) == exp.r);
    for (int trial = 0; trial < 400; ++trial) {
      TupleMatrix x = rnd_tuple(rng, exp.s, 2, 10);
      std::vector<ZZ> t{rnd_int(rng, -10, 10), rnd_int(rng, -10, 10)};
      CHECK(substituted_eval(F, x, t) == expansion_eval(exp, x, t));
    }
  }
}

TEST_CASE("phi_j equals the multinomial factor times the polarization") {
  Rng rng(202);
  for (const Form &F : {toy_xy(), toy_cubes()}) {
    ParametricExpansion exp = expand_parametric(F, 2);
    for (const MultiIndex &j : exp.index_set) {
      QQ aj = exp.a_factors.at(j);
      for (int trial = 0; trial < 25; ++trial) {
        TupleMatrix x = rnd_tuple(rng, exp.s, 2, 6);
        std::vector<std::vector<ZZ>> slots;
        for (int v : j.entries) slots.push_back(x.col(v - 1));
        QQ expect = aj * eval_phi(F, slots);
        CHECK(expect.get_den() == 1);
        CHECK(ZZ(expect.get_num()) == exp.phi(j).eval(x.e));
      }
    }
  }
}

TEST_CASE("gram_disc matches hand values") {
  TupleMatrix id2(2, 2);
  id2.at(0, 0) = 1;
  id2.at(1, 1) = 1;
  CHECK(gram_disc(id2) == 1);

  TupleMatrix eq(2, 2);
  eq.at(0, 0) = 3; eq.at(1, 0) = 4;
  eq.at(0, 1) = 3; eq.at(1, 1) = 4;
  CHECK(gram_disc(eq) == 0);

  TupleMatrix ex(3, 2);
  ex.at(0, 0) = 1; ex.at(1, 0) = 2; ex.at(2, 0) = 2;
  ex.at(0, 1) = 2; ex.at(1, 1) = 1; ex.at(2, 1) = 0;
  CHECK(gram_disc(ex) == 29);
}

TEST_CASE("disc polynomial agrees with gram_disc numerically") {
  Rng rng(303);
  for (const Form &F : {toy_xy(), toy_cubes()}) {
    ParametricExpansion exp = expand_parametric(F, 2);
    CHECK(exp.disc.is_homogeneous());
    CHECK(exp.disc.degree() == 2 * exp.m);
    for (int trial = 0; trial < 50; ++trial) {
      TupleMatrix x = rnd_tuple(rng, exp.s, 2, 8);
      CHECK(exp.disc.eval(x.e) == gram_disc(x));
    }
  }
}

namespace {

// independent four-element oracle for m=2: {e, (13), (24), (13)(24)}
ZZ det_T_oracle_m2(const std::vector<std::vector<ZZ>> &h) {
  auto det2 = [&](const std::vector<ZZ> &a, const std::vector<ZZ> &b,
                  const std::vector<ZZ> &c, const std::vector<ZZ> &d) -> ZZ {
    int s = static_cast<int>(a.size());
    ZZ ac = 0, ad = 0, bc = 0, bd = 0;
    for (int n = 0; n < s; ++n) {
      ac += a[n] * c[n];
      ad += a[n] * d[n];
      bc += b[n] * c[n];
      bd += b[n] * d[n];
    }
    return ac * bd - ad * bc;
  };
  return det2(h[0], h[1], h[2], h[3]) + det2(h[2], h[1], h[0], h[3]) +
         det2(h[0], h[3], h[2], h[1]) + det2(h[2], h[3], h[0], h[1]);
}

}  // namespace

TEST_CASE("det_T matches the explicit group sum") {
  std::vector<ZZ> e1{ZZ(1), ZZ(0)}, e2{ZZ(0), ZZ(1)};
  CHECK(det_T({e1, e2, e1, e2}) == 4);

  std::vector<ZZ> z{ZZ(0), ZZ(0)};
  Rng rng(404);
  std::vector<ZZ> a = rnd_vec(rng, 2, 5), b = rnd_vec(rng, 2, 5);
  CHECK(det_T({z, a, z, b}) == 0);  // h_1 = h_3 = 0 kills every summand

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<ZZ>> h;
    for (int i = 0; i < 4; ++i) h.push_back(rnd_vec(rng, 3, 7));
    CHECK(det_T(h) == det_T_oracle_m2(h));
  }
}

TEST_CASE("d_form expands det_T linearly in the last slot") {
  Rng rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<ZZ>> h;
    for (int i = 0; i < 3; ++i) h.push_back(rnd_vec(rng, 2, 6));
    std::vector<ZZ> x = rnd_vec(rng, 2, 6);
    ZZ lhs = 0;
    for (int n = 1; n <= 2; ++n) lhs += x[n - 1] * d_form(h, n);
    std::vector<std::vector<ZZ>> full = h;
    full.push_back(x);
    CHECK(lhs == det_T(full));
  }

  std::vector<ZZ> z{ZZ(0), ZZ(0)};
  CHECK(d_form({z, z, z}, 1) == 0);
  CHECK(d_form({z, z, z}, 2) == 0);
}

TEST_CASE("d_form is linear in each slot") {
  Rng rng(606);
  for (int slot = 0; slot < 3; ++slot) {
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<std::vector<ZZ>> h;
      for (int i = 0; i < 3; ++i) h.push_back(rnd_vec(rng, 2, 5));
      std::vector<ZZ> u = rnd_vec(rng, 2, 5), v = rnd_vec(rng, 2, 5);
      ZZ a = rnd_int(rng, -4, 4), b = rnd_int(rng, -4, 4);
      for (int n = 1; n <= 2; ++n) {
        auto hu = h, hv = h, hc = h;
        hu[slot] = u;
        hv[slot] = v;
        std::vector<ZZ> comb(2);
        for (int t = 0; t < 2; ++t) comb[t] = a * u[t] + b * v[t];
        hc[slot] = comb;
        CHECK(d_form(hc, n) == a * d_form(hu, n) + b * d_form(hv, n));
      }
    }
  }
}

TEST_CASE("polarization normalization and symmetry") {
  Form xy = toy_xy();
  CHECK(eval_phi(xy, {{ZZ(1), ZZ(0)}, {ZZ(0), ZZ(1)}}) == QQ(1, 2));
  CHECK(eval_phi(xy, {{ZZ(0), ZZ(1)}, {ZZ(1), ZZ(0)}}) == QQ(1, 2));

  Rng rng(707);
  for (const Form &F : {toy_xy(), toy_sumsq(), toy_cubes()}) {
    int d = F.degree();
    ZZ dfact = 1;
    for (int i = 2; i <= d; ++i) dfact *= i;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<ZZ> x = rnd_vec(rng, F.nvars, 8);
      std::vector<std::vector<ZZ>> rep(d, x);
      QQ diag = eval_phi(F, rep);
      CHECK(diag == QQ(F.eval(x)));

      std::vector<std::vector<ZZ>> v;
      for (int i = 0; i < d; ++i) v.push_back(rnd_vec(rng, F.nvars, 8));
      QQ val = eval_phi(F, v);
      QQ scaled = val * QQ(dfact);
      CHECK(scaled.get_den() == 1);  // d! * phi is integral
      std::swap(v[0], v[d - 1]);
      CHECK(eval_phi(F, v) == val);  // symmetric in the arguments
    }
  }
}

TEST_CASE("b_form gives the coefficient forms of the last slot") {
  Form sq = parse_form("x1^2", 1);
  Rng rng(808);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ZZ> v = rnd_vec(rng, 1, 9);
    CHECK(b_form(sq, {v}, 1) == QQ(v[0]));
  }
  for (const Form &F : {toy_xy(), toy_cubes()}) {
    int d = F.degree();
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::vector<ZZ>> v;
      for (int i = 0; i < d - 1; ++i) v.push_back(rnd_vec(rng, F.nvars, 6));
      std::vector<ZZ> x = rnd_vec(rng, F.nvars, 6);
      QQ lhs = 0;
      for (int n = 1; n <= F.nvars; ++n) lhs += QQ(x[n - 1]) * b_form(F, v, n);
      std::vector<std::vector<ZZ>> full = v;
      full.push_back(x);
      CHECK(lhs == eval_phi(F, full));
    }
    std::vector<std::vector<ZZ>> zeros(d - 1, std::vector<ZZ>(F.nvars, ZZ(0)));
    for (int n = 1; n <= F.nvars; ++n) CHECK(b_form(F, zeros, n) == 0);
  }
}

TEST_CASE("delta_diff along a column-linear slot forgets that column") {
  ParametricExpansion exp = expand_parametric(toy_xy(), 2);
  // phi_(1,2) is linear in column 1, so one difference along slot 1 no longer
  // depends on column 1 and a second difference along slot 1 vanishes
  const Form &phi12 = exp.phi(MultiIndex({1, 2}));
  TupleFn g = [&](const TupleMatrix &x) { return phi12.eval(x.e); };
  Rng rng(909);
  std::vector<ZZ> h = rnd_vec(rng, 2, 5);
  TupleFn dg = delta_diff(g, 1, h);
  for (int trial = 0; trial < 20; ++trial) {
    TupleMatrix x = rnd_tuple(rng, 2, 2, 9);
    TupleMatrix y = x;
    y.at(0, 0) = rnd_int(rng, -9, 9);
    y.at(1, 0) = rnd_int(rng, -9, 9);
    CHECK(dg(x) == dg(y));
  }
  TupleFn ddg = delta_diff(dg, 1, rnd_vec(rng, 2, 5));
  for (int trial = 0; trial < 20; ++trial) CHECK(ddg(rnd_tuple(rng, 2, 2, 9)) == 0);
}

TEST_CASE("d+1 differences annihilate every phi_j") {
  Rng rng(1010);
  for (const Form &F : {toy_xy(), toy_cubes()}) {
    ParametricExpansion exp = expand_parametric(F, 2);
    for (const MultiIndex &j : exp.index_set) {
      const Form &phi = exp.phi(j);
      TupleFn g = [&phi](const TupleMatrix &x) { return phi.eval(x.e); };
      for (int d = 0; d <= exp.d; ++d)
        g = delta_diff(std::move(g), 1 + static_cast<int>(rng.below(2)),
                       rnd_vec(rng, exp.s, 4));
      for (int trial = 0; trial < 10; ++trial)
        CHECK(g(rnd_tuple(rng, exp.s, 2, 6)) == 0);
    }
  }
}

TEST_CASE("differences of the discriminant vanish when an index repeats thrice") {
  ParametricExpansion exp = expand_parametric(toy_xy(), 2);
  const Form disc = exp.disc;
  Rng rng(1111);
  for (const auto &pattern : {std::vector<int>{1, 1, 1}, std::vector<int>{2, 2, 2}}) {
    for (int trial = 0; trial < 50; ++trial) {
      TupleFn g = [&disc](const TupleMatrix &x) { return disc.eval(x.e); };
      for (int slot : pattern) g = delta_diff(std::move(g), slot, rnd_vec(rng, 2, 5));
      CHECK(g(rnd_tuple(rng, 2, 2, 7)) == 0);
    }
  }
}

TEST_CASE("pattern (1,2,1) difference of the discriminant matches det_T") {
  ParametricExpansion exp = expand_parametric(toy_sumsq(), 2);
  const Form disc = exp.disc;
  Rng rng(1212);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<ZZ> h1 = rnd_vec(rng, 2, 5), h2 = rnd_vec(rng, 2, 5), h3 = rnd_vec(rng, 2, 5);
    TupleFn g = [&disc](const TupleMatrix &x) { return disc.eval(x.e); };
    g = delta_diff(std::move(g), 1, h3);
    g = delta_diff(std::move(g), 2, h2);
    g = delta_diff(std::move(g), 1, h1);
    auto residue = [&](const TupleMatrix &x) -> ZZ {
      return g(x) - det_T({h1, h2, h3, x.col(1)});
    };
    ZZ first = residue(rnd_tuple(rng, 2, 2, 9));
    for (int probe = 0; probe < 6; ++probe)
      CHECK(residue(rnd_tuple(rng, 2, 2, 9)) == first);
  }
}

TEST_CASE("doubled-index differences depend only on the singleton column") {
  ParametricExpansion exp = expand_parametric(toy_xy(), 2);
  const Form disc = exp.disc;
  Rng rng(1313);
  // index 1 twice, index 2 once: the value may depend on column 2 only
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<ZZ> h1 = rnd_vec(rng, 2, 5), h2 = rnd_vec(rng, 2, 5), h3 = rnd_vec(rng, 2, 5);
    TupleFn g = [&disc](const TupleMatrix &x) { return disc.eval(x.e); };
    g = delta_diff(std::move(g), 1, h1);
    g = delta_diff(std::move(g), 2, h2);
    g = delta_diff(std::move(g), 1, h3);
    TupleMatrix x = rnd_tuple(rng, 2, 2, 7);
    ZZ base = g(x);
    for (int probe = 0; probe < 5; ++probe) {
      TupleMatrix y = x;
      y.at(0, 0) = rnd_int(rng, -7, 7);  // perturb column 1 only
      y.at(1, 0) = rnd_int(rng, -7, 7);
      CHECK(g(y) == base);
    }
  }
}

TEST_CASE("d-1 differences of the weighted expansion are linear with polarization gradient") {
  Form F = toy_cubes();  // d = 3
  ParametricExpansion exp = expand_parametric(F, 2);
  Rng rng(1414);
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<ZZ> weights;
    Form combined(exp.m * exp.s);
    for (const MultiIndex &j : exp.index_set) {
      ZZ c = rnd_int(rng, -3, 3);
      combined = combined + exp.phi(j).scaled(c);
    }
    std::vector<ZZ> h = rnd_vec(rng, 3, 4), w = rnd_vec(rng, 3, 4);
    int slot_a = 1 + static_cast<int>(rng.below(2));
    int slot_b = 1 + static_cast<int>(rng.below(2));
    TupleFn g = [&combined](const TupleMatrix &x) { return combined.eval(x.e); };
    g = delta_diff(std::move(g), slot_b, w);
    g = delta_diff(std::move(g), slot_a, h);

    // second differences are x-independent: the map is affine-linear
    TupleMatrix x0 = rnd_tuple(rng, 3, 2, 6), x1 = rnd_tuple(rng, 3, 2, 6);
    for (int probe = 0; probe < 4; ++probe) {
      TupleMatrix delta = rnd_tuple(rng, 3, 2, 3);
      TupleMatrix x0d = x0, x1d = x1;
      for (size_t idx = 0; idx < x0.e.size(); ++idx) {
        x0d.e[idx] += delta.e[idx];
        x1d.e[idx] += delta.e[idx];
      }
      CHECK(g(x0d) - g(x0) == g(x1d) - g(x1));
    }

    // per-slot gradient is proportional to the polarization against (h, w)
    TupleMatrix zero(3, 2);
    ZZ at0 = g(zero);
    for (int kslot = 0; kslot < 2; ++kslot) {
      std::vector<ZZ> grad(3), pol(3);
      for (int n = 0; n < 3; ++n) {
        TupleMatrix e(3, 2);
        e.at(n, kslot) = 1;
        grad[n] = g(e) - at0;
        std::vector<ZZ> en(3, ZZ(0));
        en[n] = 1;
        QQ p = eval_phi(F, {h, w, en}) * 6;  // d! clears the denominator
        CHECK(p.get_den() == 1);
        pol[n] = ZZ(p.get_num());
      }
      for (int n = 0; n < 3; ++n)
        for (int n2 = n + 1; n2 < 3; ++n2)
          CHECK(grad[n] * pol[n2] == grad[n2] * pol[n]);
    }
  }
}

TEST_CASE("vanishing d_form tuples force the det_T consequence") {
  // enumerate all h in [-1,1]^{3x2}; where every d_n is zero the paired
  // determinant sum with the repeated middle column vanishes too
  std::vector<std::vector<ZZ>> h(3, std::vector<ZZ>(2));
  int zeros = 0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        for (int d = -1; d <= 1; ++d)
          for (int e = -1; e <= 1; ++e)
            for (int f = -1; f <= 1; ++f) {
              h[0] = {ZZ(a), ZZ(b)};
              h[1] = {ZZ(c), ZZ(d)};
              h[2] = {ZZ(e), ZZ(f)};
              if (d_form(h, 1) == 0 && d_form(h, 2) == 0) {
                ++zeros;
                CHECK(det_T({h[0], h[1], h[2], h[1]}) == 0);
              }
            }
  CHECK(zeros == 249);  // frozen brute-force value for m=2, s=2, H=1
}

TEST_CASE("compiled kernels agree with exact evaluation") {
  Rng rng(1515);
  ParametricExpansion exp = expand_parametric(toy_cubes(), 2);
  const Form &f = exp.disc;
  ModForm mf = ModForm::compile(f, 23);
  LastVarSplit sp = LastVarSplit::compile(f, 23);
  RealForm rf = RealForm::compile(f);
  IntForm itf = IntForm::compile(f);

  std::vector<int64_t> pt(f.nvars);
  std::vector<double> ptd(f.nvars);
  std::vector<ZZ> ptz(f.nvars);
  std::vector<int64_t> coeffs(sp.deg + 1);
  for (int trial = 0; trial < 200; ++trial) {
    for (int v = 0; v < f.nvars; ++v) {
      pt[v] = static_cast<int64_t>(rng.below(23));
      ptd[v] = static_cast<double>(pt[v]);
      ptz[v] = pt[v];
    }
    ZZ exact = f.eval(ptz);
    ZZ red = exact % 23;
    if (red < 0) red += 23;
    CHECK(mf.eval(pt.data()) == to_i64(red));
    sp.eval_coeffs(pt.data(), coeffs.data());
    CHECK(LastVarSplit::horner(coeffs.data(), sp.deg, pt[f.nvars - 1], 23) == to_i64(red));
    CHECK(itf.eval(pt.data()) == to_i64(exact));
    CHECK(rf.eval(ptd.data()) == doctest::Approx(to_double(exact)));
  }
}
