#include "circle/expsum.hh"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace circle {

namespace {

double wrap01(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;  // guard the floor rounding edge
}

// alpha as mant * 2^{-s} with 53-bit integer mantissa; exact for any double
struct FracScaler {
  int64_t mant = 0;
  int s = 53;

  static FracScaler make(double alpha) {
    FracScaler fs;
    double a = wrap01(alpha);
    if (a == 0.0) return fs;
    int e = 0;
    double f = std::frexp(a, &e);  // a = f * 2^e, f in [0.5, 1), e <= 0
    fs.mant = static_cast<int64_t>(std::ldexp(f, 53));
    fs.s = 53 - e;
    return fs;
  }

  // (alpha * k) mod 1 in [0, 1)
  double frac(int64_t k) const {
    if (mant == 0 || k == 0) return 0.0;
    bool neg = k < 0;
    uint64_t absk = neg ? -static_cast<uint64_t>(k) : static_cast<uint64_t>(k);
    unsigned __int128 prod = static_cast<unsigned __int128>(mant) * absk;
    double f;
    if (s >= 128) {
      f = std::ldexp(static_cast<double>(prod), -s);
    } else {
      unsigned __int128 rem = prod & ((static_cast<unsigned __int128>(1) << s) - 1);
      f = std::ldexp(static_cast<double>(rem), -s);
    }
    if (neg && f > 0.0) f = 1.0 - f;
    return f >= 1.0 ? 0.0 : f;
  }

  double frac_big(const ZZ &k) const {
    if (mant == 0 || k == 0) return 0.0;
    ZZ absk = abs(k);
    ZZ prod = ZZ(mant) * absk;
    mpz_fdiv_r_2exp(prod.get_mpz_t(), prod.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
    double f = std::ldexp(prod.get_d(), -s);
    if (k < 0 && f > 0.0) f = 1.0 - f;
    return f >= 1.0 ? 0.0 : f;
  }
};

uint64_t pow_checked(uint64_t base, int e) {
  uint64_t out = 1;
  for (int i = 0; i < e; ++i) {
    if (out > UINT64_MAX / base) return UINT64_MAX;
    out *= base;
  }
  return out;
}

}  // namespace

double frac_mul(double alpha, int64_t k) { return FracScaler::make(alpha).frac(k); }

double frac_mul_big(double alpha, const ZZ &k) { return FracScaler::make(alpha).frac_big(k); }

ArcPoint ArcPoint::wrapped() const {
  ArcPoint out;
  out.alphas.reserve(alphas.size());
  for (double a : alphas) out.alphas.push_back(wrap01(a));
  out.alpha0 = wrap01(alpha0);
  return out;
}

RationalPoint RationalPoint::reduced() const {
  if (q <= 0) throw ShapeError("rational point: modulus must be positive");
  RationalPoint out = *this;
  auto norm = [&](long v) {
    long r = v % out.q;
    return r < 0 ? r + out.q : r;
  };
  out.a0 = norm(out.a0);
  for (auto &v : out.a) v = norm(v);
  long g = out.q;
  g = std::gcd(g, out.a0);
  for (long v : out.a) g = std::gcd(g, v);
  if (g > 1) {
    out.q /= g;
    out.a0 /= g;
    for (auto &v : out.a) v /= g;
  }
  return out;
}

bool RationalPoint::is_reduced() const {
  if (q <= 0) return false;
  long g = std::gcd(q, a0);
  for (long v : a) g = std::gcd(g, v);
  if (g != 1) return false;
  if (a0 < 0 || a0 >= q) return false;
  for (long v : a)
    if (v < 0 || v >= q) return false;
  return true;
}

ArcPoint RationalPoint::to_arc() const {
  if (q <= 0) throw ShapeError("rational point: modulus must be positive");
  ArcPoint out;
  out.alphas.reserve(a.size());
  const double qd = static_cast<double>(q);
  for (long v : a) out.alphas.push_back(wrap01(static_cast<double>(v) / qd));
  out.alpha0 = wrap01(static_cast<double>(a0) / qd);
  return out;
}

CC t_sum(const ParametricExpansion &exp, long P, const ArcPoint &alpha, int workers,
         Budget *budget) {
  if (P < 0) throw ShapeError("t_sum: box radius must be nonnegative");
  std::vector<const Form *> forms = exp.forms_in_order(true);
  if (alpha.alphas.size() != static_cast<size_t>(exp.r))
    throw ShapeError("t_sum: expected r phase coefficients");

  const int dim = static_cast<int>(exp.ms());
  const uint64_t width = static_cast<uint64_t>(2 * P + 1);
  const uint64_t points = pow_checked(width, dim);
  if (budget) budget->require(points);

  std::vector<double> coeffs(alpha.alphas.begin(), alpha.alphas.end());
  coeffs.push_back(alpha.alpha0);
  std::vector<FracScaler> scalers;
  for (double c : coeffs) scalers.push_back(FracScaler::make(wrap01(c)));

  // int64 evaluation is exact whenever every form's box bound fits
  bool fits = true;
  for (const Form *f : forms)
    if (!fits_i64(f->abs_bound_int(ZZ(P)))) fits = false;

  std::vector<IntForm> ifs;
  if (fits)
    for (const Form *f : forms) ifs.push_back(IntForm::compile(*f));

  const uint64_t inner = points / width;
  std::vector<KahanC> parts(width);
  parallel_for_chunks(width, workers, [&](uint64_t chunk) {
    KahanC acc;
    if (fits) {
      std::vector<int64_t> pt(dim);
      pt[0] = -P + static_cast<long>(chunk);
      for (uint64_t c = 0; c < inner; ++c) {
        uint64_t t = c;
        for (int k = 1; k < dim; ++k) {
          pt[k] = -P + static_cast<long>(t % width);
          t /= width;
        }
        double ph = 0.0;
        for (size_t i = 0; i < ifs.size(); ++i) {
          if (scalers[i].mant == 0) continue;
          ph += scalers[i].frac(ifs[i].eval(pt.data()));
        }
        double ang = 2.0 * M_PI * ph;
        acc.add(std::cos(ang), std::sin(ang));
      }
    } else {
      std::vector<ZZ> pt(dim);
      pt[0] = -P + static_cast<long>(chunk);
      for (uint64_t c = 0; c < inner; ++c) {
        uint64_t t = c;
        for (int k = 1; k < dim; ++k) {
          pt[k] = -P + static_cast<long>(t % width);
          t /= width;
        }
        double ph = 0.0;
        for (size_t i = 0; i < forms.size(); ++i) {
          if (scalers[i].mant == 0) continue;
          ph += scalers[i].frac_big(forms[i]->eval(pt));
        }
        double ang = 2.0 * M_PI * ph;
        acc.add(std::cos(ang), std::sin(ang));
      }
    }
    parts[chunk] = acc;
  });

  KahanC total;
  for (auto &p : parts) total.merge(p);
  return CC(total.re.get(), total.im.get());
}

CC s_q(const ParametricExpansion &exp, const RationalPoint &rp, int workers, Budget *budget) {
  if (rp.q <= 0) throw ShapeError("s_q: modulus must be positive");
  if (rp.q > (1l << 31) - 1) throw ShapeError("s_q: modulus exceeds the modular kernel range");
  if (rp.a.size() != static_cast<size_t>(exp.r))
    throw ShapeError("s_q: expected r numerators");

  const int dim = static_cast<int>(exp.ms());
  const uint64_t q = static_cast<uint64_t>(rp.q);
  const uint64_t points = pow_checked(q, dim);
  if (budget) budget->require(points);

  // single combined phase form: sum_j a_j phi_j + a0 disc
  std::vector<const Form *> forms = exp.forms_in_order(true);
  Form combined(forms[0]->nvars);
  for (int64_t j = 0; j < exp.r; ++j) combined = combined + forms[j]->scaled(ZZ(rp.a[j]));
  combined = combined + forms[exp.r]->scaled(ZZ(rp.a0));

  LastVarSplit split = LastVarSplit::compile(combined, rp.q);

  std::vector<double> tre(q), tim(q);
  for (uint64_t t = 0; t < q; ++t) {
    double ang = 2.0 * M_PI * static_cast<double>(t) / static_cast<double>(q);
    tre[t] = std::cos(ang);
    tim[t] = std::sin(ang);
  }

  // chunk over the first coordinate when there is more than one; the last
  // coordinate always runs through the hoisted horner kernel
  const uint64_t nchunks = dim >= 2 ? q : 1;
  const uint64_t outer_rest = dim >= 2 ? points / q / q : 1;
  std::vector<KahanC> parts(nchunks);
  parallel_for_chunks(nchunks, workers, [&](uint64_t chunk) {
    std::vector<int64_t> outer(dim >= 2 ? dim - 1 : 0);
    std::vector<int64_t> coeffs(split.deg + 1);
    if (dim >= 2) outer[0] = static_cast<int64_t>(chunk);
    KahanC acc;
    for (uint64_t c = 0; c < outer_rest; ++c) {
      uint64_t t = c;
      for (int k = 1; k < dim - 1; ++k) {
        outer[k] = static_cast<int64_t>(t % q);
        t /= q;
      }
      split.eval_coeffs(outer.data(), coeffs.data());
      for (uint64_t last = 0; last < q; ++last) {
        int64_t v = LastVarSplit::horner(coeffs.data(), split.deg,
                                         static_cast<int64_t>(last), rp.q);
        acc.add(tre[v], tim[v]);
      }
    }
    parts[chunk] = acc;
  });

  KahanC total;
  for (auto &p : parts) total.merge(p);
  return CC(total.re.get(), total.im.get());
}

Estimate v_box(const ParametricExpansion &exp, double P, const std::vector<double> &beta,
               const QuadratureSpec &spec) {
  return box_integral(exp, beta, P, spec);
}

Residual major_arc_residual(const ParametricExpansion &exp, long P, const ArcPoint &alpha,
                            const RationalPoint &rp, const QuadratureSpec &spec, int workers,
                            Budget *budget) {
  if (P < 1) throw ShapeError("major_arc_residual: box radius must be positive");
  if (alpha.alphas.size() != static_cast<size_t>(exp.r))
    throw ShapeError("major_arc_residual: expected r phase coefficients");

  // beta = alpha - a/q with each component wrapped to [-1/2, 1/2)
  auto center = [](double x) {
    double f = x - std::floor(x);
    return f >= 0.5 ? f - 1.0 : f;
  };
  std::vector<double> beta(exp.r + 1);
  const double qd = static_cast<double>(rp.q);
  for (int64_t j = 0; j < exp.r; ++j)
    beta[j] = center(alpha.alphas[j] - static_cast<double>(rp.a[j]) / qd);
  beta[exp.r] = center(alpha.alpha0 - static_cast<double>(rp.a0) / qd);

  CC tp = t_sum(exp, P, alpha, workers, budget);
  CC sq = s_q(exp, rp, workers, budget);
  Estimate vp = v_box(exp, static_cast<double>(P), beta, spec);

  const double ms = static_cast<double>(exp.ms());
  CC approx = sq * vp.value / std::pow(qd, ms);

  Residual out;
  out.lhs = std::abs(tp - approx);
  double load = 1.0;
  for (int64_t j = 0; j < exp.r; ++j)
    load += std::abs(beta[j]) * std::pow(static_cast<double>(P), exp.d);
  load += std::abs(beta[exp.r]) * std::pow(static_cast<double>(P), 2.0 * exp.m);
  out.rhs_scale = std::pow(static_cast<double>(P), ms - 1.0) * qd * load;
  return out;
}

ZZ count_via_dft(const ParametricExpansion &exp, long P, const ZZ &b, int workers,
                 Budget *budget) {
  if (P < 0) throw ShapeError("count_via_dft: box radius must be nonnegative");
  std::vector<const Form *> forms = exp.forms_in_order(true);
  const int dim = static_cast<int>(exp.ms());
  const uint64_t width = static_cast<uint64_t>(2 * P + 1);
  const uint64_t points = pow_checked(width, dim);
  const size_t nc = forms.size();
  if (budget) budget->require(points);

  // pass 1: exact box maxima fixing the window size Q
  bool fits = true;
  for (const Form *f : forms)
    if (!fits_i64(f->abs_bound_int(ZZ(P)))) fits = false;
  if (!fits_i64(abs(b))) fits = false;

  ZZ maxval = 0;
  {
    std::vector<ZZ> pt(dim);
    std::vector<int64_t> pti(dim);
    std::vector<IntForm> ifs;
    if (fits)
      for (const Form *f : forms) ifs.push_back(IntForm::compile(*f));
    const int64_t bi = fits ? to_i64(b) : 0;
    for (uint64_t c = 0; c < points; ++c) {
      uint64_t t = c;
      for (int k = 0; k < dim; ++k) {
        long v = -P + static_cast<long>(t % width);
        if (fits)
          pti[k] = v;
        else
          pt[k] = v;
        t /= width;
      }
      if (fits) {
        for (size_t i = 0; i < nc; ++i) {
          int64_t v = ifs[i].eval(pti.data());
          if (i + 1 == nc) v -= bi;
          ZZ av = ZZ(v < 0 ? -v : v);
          if (av > maxval) maxval = av;
        }
      } else {
        for (size_t i = 0; i < nc; ++i) {
          ZZ v = forms[i]->eval(pt);
          if (i + 1 == nc) v -= b;
          ZZ av = abs(v);
          if (av > maxval) maxval = av;
        }
      }
    }
  }

  ZZ qz = 2 * maxval + 1;
  if (qz > (1l << 31) - 1) throw ShapeError("count_via_dft: window exceeds the modular kernel range");
  const int64_t Q = to_i64(qz);
  if (budget) {
    uint64_t cost = points;  // residue pass
    uint64_t table = static_cast<uint64_t>(Q) * static_cast<uint64_t>(Q);
    cost = cost > UINT64_MAX - table ? UINT64_MAX : cost + table;
    budget->require(cost);
  }

  // normalized geometric kernel per residue: (1/Q) sum_t e(t v / Q); the
  // trigonometric sums are honest floats, with G(0)/Q = 1 exactly
  std::vector<double> ure(Q), uim(Q);
  for (int64_t k = 0; k < Q; ++k) {
    double ang = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(Q);
    ure[k] = std::cos(ang);
    uim[k] = std::sin(ang);
  }
  std::vector<double> gre(Q), gim(Q);
  for (int64_t v = 0; v < Q; ++v) {
    Kahan re, im;
    for (int64_t t = 0; t < Q; ++t) {
      int64_t k = static_cast<int64_t>(static_cast<__int128>(v) * t % Q);
      re.add(ure[k]);
      im.add(uim[k]);
    }
    gre[v] = re.get() / static_cast<double>(Q);
    gim[v] = im.get() / static_cast<double>(Q);
  }

  // pass 2: per point, product of kernels over the shifted residues
  Form shifted = *forms[nc - 1] + Form::constant(forms[nc - 1]->nvars, -b);
  std::vector<ModForm> mfs;
  for (size_t i = 0; i + 1 < nc; ++i) mfs.push_back(ModForm::compile(*forms[i], Q));
  mfs.push_back(ModForm::compile(shifted, Q));

  std::vector<KahanC> parts(width);
  const uint64_t inner = points / width;
  parallel_for_chunks(width, workers, [&](uint64_t chunk) {
    std::vector<int64_t> pt(dim);
    pt[0] = -P + static_cast<long>(chunk);
    // ModForm expects residues in [0, Q)
    std::vector<int64_t> res(dim);
    KahanC acc;
    for (uint64_t c = 0; c < inner; ++c) {
      uint64_t t = c;
      for (int k = 1; k < dim; ++k) {
        pt[k] = -P + static_cast<long>(t % width);
        t /= width;
      }
      for (int k = 0; k < dim; ++k) {
        int64_t v = pt[k] % Q;
        res[k] = v < 0 ? v + Q : v;
      }
      double pre = 1.0, pim = 0.0;
      for (const ModForm &mf : mfs) {
        int64_t v = mf.eval(res.data());
        double nre = pre * gre[v] - pim * gim[v];
        pim = pre * gim[v] + pim * gre[v];
        pre = nre;
      }
      acc.add(pre, pim);
    }
    parts[chunk] = acc;
  });

  KahanC total;
  for (auto &p : parts) total.merge(p);
  const double re = total.re.get(), im = total.im.get();
  const double nearest = std::round(re);
  if (std::abs(re - nearest) > 1e-6 || std::abs(im) > 1e-6)
    throw PrecisionError("count_via_dft: dual-window total is not integral",
                         std::max(std::abs(re - nearest), std::abs(im)));
  return ZZ(static_cast<long>(nearest));
}

}  // namespace circle
