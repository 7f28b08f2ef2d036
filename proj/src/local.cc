#include "circle/local.hh"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace circle {

namespace {

uint64_t pow_checked(uint64_t base, int e) {
  uint64_t out = 1;
  for (int i = 0; i < e; ++i) {
    if (base != 0 && out > UINT64_MAX / base) return UINT64_MAX;
    out *= base;
  }
  return out;
}

bool is_prime_small(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

long mobius(long n) {
  long mu = 1;
  for (long d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      n /= d;
      if (n % d == 0) return 0;
      mu = -mu;
    }
  }
  if (n > 1) mu = -mu;
  return mu;
}

std::vector<long> divisors_of(long n) {
  std::vector<long> out;
  for (long d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      if (d != n / d) out.push_back(n / d);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ZZ zz_of_i128(__int128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  ZZ z = ZZ(static_cast<unsigned long>(u >> 64));
  z <<= 64;
  z += ZZ(static_cast<unsigned long>(u & UINT64_MAX));
  return neg ? ZZ(-z) : z;
}

// compiled per-form kernels for a residue scan mod q, with the target b
// folded into the discriminant slot
struct SplitPack {
  long q = 1;
  int dim = 0;
  size_t nf = 0;
  uint64_t points = 0, nchunks = 1, outer_rest = 1;
  std::vector<LastVarSplit> splits;
};

SplitPack make_splits(const ParametricExpansion &exp, long q, const ZZ &b) {
  if (q < 1) throw ShapeError("residue scan: modulus must be positive");
  if (q > (1l << 31) - 1) throw ShapeError("residue scan: modulus exceeds the modular kernel range");
  SplitPack pack;
  pack.q = q;
  pack.dim = static_cast<int>(exp.ms());
  std::vector<const Form *> forms = exp.forms_in_order(true);
  pack.nf = forms.size();
  pack.points = pow_checked(static_cast<uint64_t>(q), pack.dim);
  pack.nchunks = pack.dim >= 2 ? static_cast<uint64_t>(q) : 1;
  pack.outer_rest = pack.dim >= 2 ? pack.points / q / q : 1;
  for (size_t c = 0; c < pack.nf; ++c) {
    Form f = *forms[c];
    if (c + 1 == pack.nf) f = f + Form::constant(f.nvars, -b);
    pack.splits.push_back(LastVarSplit::compile(f, q));
  }
  return pack;
}

struct ScanResult {
  ZZ count = 0;
  double re = 0.0, im = 0.0;
};

// one pass over x mod q accumulating the exact solution count and, when
// asked, the dual character sum collapsed to a product of normalized
// geometric factors (one per coefficient form)
ScanResult residue_scan(const ParametricExpansion &exp, long q, const ZZ &b, bool with_char,
                        int workers, Budget *budget) {
  SplitPack pack = make_splits(exp, q, b);
  if (budget) budget->require(pack.points);

  std::vector<double> gre, gim;
  if (with_char) {
    std::vector<double> ure(q), uim(q);
    for (long k = 0; k < q; ++k) {
      double ang = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(q);
      ure[k] = std::cos(ang);
      uim[k] = std::sin(ang);
    }
    gre.resize(q);
    gim.resize(q);
    for (long v = 0; v < q; ++v) {
      Kahan sre, sim;
      for (long t = 0; t < q; ++t) {
        long k = static_cast<long>(static_cast<__int128>(v) * t % q);
        sre.add(ure[k]);
        sim.add(uim[k]);
      }
      gre[v] = sre.get() / static_cast<double>(q);
      gim[v] = sim.get() / static_cast<double>(q);
    }
  }

  const int dim = pack.dim;
  const size_t nf = pack.nf;
  std::vector<uint64_t> counts(pack.nchunks, 0);
  std::vector<KahanC> sums(pack.nchunks);
  parallel_for_chunks(pack.nchunks, workers, [&](uint64_t chunk) {
    std::vector<int64_t> outer(dim >= 2 ? dim - 1 : 0);
    std::vector<std::vector<int64_t>> coeffs(nf);
    for (size_t c = 0; c < nf; ++c) coeffs[c].resize(pack.splits[c].deg + 1);
    if (dim >= 2) outer[0] = static_cast<int64_t>(chunk);
    uint64_t hits = 0;
    KahanC acc;
    for (uint64_t w = 0; w < pack.outer_rest; ++w) {
      uint64_t t = w;
      for (int k = 1; k < dim - 1; ++k) {
        outer[k] = static_cast<int64_t>(t % q);
        t /= q;
      }
      for (size_t c = 0; c < nf; ++c)
        pack.splits[c].eval_coeffs(outer.data(), coeffs[c].data());
      for (long last = 0; last < q; ++last) {
        if (with_char) {
          double pre = 1.0, pim = 0.0;
          bool zero = true;
          for (size_t c = 0; c < nf; ++c) {
            int64_t v = LastVarSplit::horner(coeffs[c].data(), pack.splits[c].deg, last, q);
            zero = zero && v == 0;
            double nre = pre * gre[v] - pim * gim[v];
            pim = pre * gim[v] + pim * gre[v];
            pre = nre;
          }
          if (zero) ++hits;
          acc.add(pre, pim);
        } else {
          bool zero = true;
          for (size_t c = 0; c < nf && zero; ++c)
            zero = LastVarSplit::horner(coeffs[c].data(), pack.splits[c].deg, last, q) == 0;
          if (zero) ++hits;
        }
      }
    }
    counts[chunk] = hits;
    sums[chunk] = acc;
  });

  ScanResult out;
  KahanC total;
  for (uint64_t c = 0; c < pack.nchunks; ++c) {
    out.count += ZZ(counts[c]);
    total.merge(sums[c]);
  }
  out.re = total.re.get();
  out.im = total.im.get();
  return out;
}

// exact density normalizer p^{i(ms-r-1)} as a rational multiplier
QQ chi_normalizer(const ParametricExpansion &exp, long p, int i) {
  long e = exp.ms() - exp.r - 1;
  ZZ pw;
  mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p),
                static_cast<unsigned long>(i) * static_cast<unsigned long>(std::labs(e)));
  QQ norm;
  if (e >= 0)
    norm = QQ(ZZ(1), pw);
  else
    norm = QQ(pw, ZZ(1));
  norm.canonicalize();
  return norm;
}

}  // namespace

ZZ congruence_count(const ParametricExpansion &exp, long modulus, const ZZ &b, int workers,
                    Budget *budget) {
  return residue_scan(exp, modulus, b, false, workers, budget).count;
}

ChiPair chi_p_truncated(const ParametricExpansion &exp, long p, int i, const ZZ &b,
                        int workers, Budget *budget) {
  if (!is_prime_small(p)) throw ShapeError("chi_p: modulus base must be a prime");
  if (i < 0) throw ShapeError("chi_p: depth must be nonnegative");
  uint64_t q = pow_checked(static_cast<uint64_t>(p), i);
  if (q > static_cast<uint64_t>((1l << 31) - 1))
    throw ShapeError("chi_p: modulus exceeds the modular kernel range");

  ScanResult scan = residue_scan(exp, static_cast<long>(q), b, true, workers, budget);
  QQ norm = chi_normalizer(exp, p, i);
  double factor = to_double(norm);

  ChiPair out;
  out.count_form = to_double(QQ(scan.count, ZZ(1)) * norm);
  out.character_form = scan.re * factor;
  double dev = std::max(std::abs(out.character_form - out.count_form),
                        std::abs(scan.im * factor));
  if (dev > 1e-6)
    throw PrecisionError("chi_p: character and count forms disagree", dev);
  return out;
}

LocalDensitySeries chi_p_series(const ParametricExpansion &exp, long p, int max_i,
                                const ZZ &b, int workers, Budget *budget) {
  if (!is_prime_small(p)) throw ShapeError("chi_p: modulus base must be a prime");
  if (max_i < 0) throw ShapeError("chi_p: depth must be nonnegative");
  LocalDensitySeries out;
  out.p = p;
  long q = 1;
  for (int i = 0; i <= max_i; ++i) {
    ZZ cnt = congruence_count(exp, q, b, workers, budget);
    double chi = to_double(QQ(cnt, ZZ(1)) * chi_normalizer(exp, p, i));
    out.values.emplace_back(i, chi);
    if (i < max_i) {
      if (q > ((1l << 31) - 1) / p) throw ShapeError("chi_p: modulus exceeds the modular kernel range");
      q *= p;
    }
  }
  int steady = 0;
  for (size_t i = 1; i < out.values.size(); ++i) {
    double diff = std::abs(out.values[i].second - out.values[i - 1].second);
    steady = diff < out.tolerance ? steady + 1 : 0;
  }
  out.stabilized = steady >= 2;
  return out;
}

QQ singular_series_layer(const ParametricExpansion &exp, long q, const ZZ &b, int workers,
                         Budget *budget) {
  SplitPack pack = make_splits(exp, q, b);
  if (budget) budget->require(pack.points);

  // divisor sieve for the reduced-tuple condition: summing e(a.v/q) over
  // tuples with joint gcd 1 collapses to sum_{h|q} mu(q/h) h^{r+1} [h | v]
  struct Layer {
    long h;
    long mu;
    __int128 weight;  // mu * h^{r+1}
  };
  std::vector<Layer> layers;
  for (long h : divisors_of(q)) {
    long mu = mobius(q / h);
    if (mu == 0) continue;
    __int128 w = 1;
    for (size_t c = 0; c < pack.nf; ++c) w *= h;
    layers.push_back({h, mu, mu > 0 ? w : -w});
  }

  const int dim = pack.dim;
  const size_t nf = pack.nf;
  std::vector<__int128> parts(pack.nchunks, 0);
  parallel_for_chunks(pack.nchunks, workers, [&](uint64_t chunk) {
    std::vector<int64_t> outer(dim >= 2 ? dim - 1 : 0);
    std::vector<std::vector<int64_t>> coeffs(nf);
    std::vector<int64_t> vals(nf);
    for (size_t c = 0; c < nf; ++c) coeffs[c].resize(pack.splits[c].deg + 1);
    if (dim >= 2) outer[0] = static_cast<int64_t>(chunk);
    __int128 acc = 0;
    for (uint64_t w = 0; w < pack.outer_rest; ++w) {
      uint64_t t = w;
      for (int k = 1; k < dim - 1; ++k) {
        outer[k] = static_cast<int64_t>(t % q);
        t /= q;
      }
      for (size_t c = 0; c < nf; ++c)
        pack.splits[c].eval_coeffs(outer.data(), coeffs[c].data());
      for (long last = 0; last < q; ++last) {
        for (size_t c = 0; c < nf; ++c)
          vals[c] = LastVarSplit::horner(coeffs[c].data(), pack.splits[c].deg, last, q);
        for (const Layer &ly : layers) {
          bool all = true;
          for (size_t c = 0; c < nf && all; ++c) all = vals[c] % ly.h == 0;
          if (all) acc += ly.weight;
        }
      }
    }
    parts[chunk] = acc;
  });

  __int128 total = 0;
  for (__int128 v : parts) total += v;
  ZZ num = zz_of_i128(total);
  ZZ den;
  mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(q),
                static_cast<unsigned long>(dim));
  QQ out(num, den);
  out.canonicalize();
  return out;
}

std::vector<std::pair<long, QQ>> singular_series_layers(const ParametricExpansion &exp, long Q,
                                                        const ZZ &b, int workers,
                                                        Budget *budget) {
  if (Q < 1) throw ShapeError("series: truncation bound must be positive");
  std::vector<std::pair<long, QQ>> out;
  for (long q = 1; q <= Q; ++q)
    out.emplace_back(q, singular_series_layer(exp, q, b, workers, budget));
  return out;
}

double singular_series_partial(const ParametricExpansion &exp, long Q, const ZZ &b,
                               int workers, Budget *budget) {
  QQ total = 0;
  for (const auto &[q, layer] : singular_series_layers(exp, Q, b, workers, budget))
    total += layer;
  return to_double(total);
}

std::vector<SqBoundRow> sq_bound_harness(const ParametricExpansion &exp, long q_max,
                                         const QQ &k, const QQ &l, int workers,
                                         Budget *budget) {
  if (q_max < 1) throw ShapeError("term bound table: modulus bound must be positive");
  if (k <= 0 || l <= 0) throw ShapeError("term bound table: growth exponents must be positive");
  const int dim = static_cast<int>(exp.ms());
  const size_t nf = static_cast<size_t>(exp.r) + 1;
  if (budget) {
    uint64_t cost = 0;
    for (long q = 1; q <= q_max; ++q) {
      uint64_t one = pow_checked(static_cast<uint64_t>(q), dim + static_cast<int>(nf));
      cost = cost > UINT64_MAX - one ? UINT64_MAX : cost + one;
    }
    budget->require(cost);
  }

  const double kd = to_double(k), ld = to_double(l);
  const int d = exp.d, m = exp.m;
  const double ms = static_cast<double>(exp.ms());
  std::vector<SqBoundRow> out;
  for (long q = 1; q <= q_max; ++q) {
    std::vector<long> tup(nf, 0);  // digits: a0 then a[0..r-1]
    while (true) {
      long g = q;
      for (long v : tup) g = std::gcd(g, v);
      if (g == 1) {
        SqBoundRow row;
        row.q = q;
        row.a0 = tup[0];
        row.a.assign(tup.begin() + 1, tup.end());
        RationalPoint rp;
        rp.q = q;
        rp.a0 = row.a0;
        rp.a = row.a;
        row.abs_value = std::abs(s_q(exp, rp, workers)) / std::pow(static_cast<double>(q), ms);
        if (2 * m > d) {
          double t1 = std::pow(static_cast<double>(q) / std::gcd(q, row.a0),
                               -ld / (2.0 * m - 1.0));
          double t2 = std::pow(static_cast<double>(q),
                               -1.0 / ((2.0 * m - 1.0) / ld + (d - 1.0) / kd));
          row.bound = std::min(t1, t2);
        } else if (d > 2 * m) {
          long gj = q;
          for (long v : row.a) gj = std::gcd(gj, v);
          double t1 = std::pow(static_cast<double>(q) / gj, -kd / (d - 1.0));
          double t2 = std::pow(static_cast<double>(q),
                               -1.0 / (3.0 * (d - 1.0) / kd + (2.0 * m - 1.0) / ld));
          row.bound = std::min(t1, t2);
        } else {
          row.bound = std::numeric_limits<double>::quiet_NaN();
        }
        row.ratio = row.abs_value / row.bound;
        out.push_back(std::move(row));
      }
      size_t pos = nf;
      while (pos > 0 && tup[pos - 1] == q - 1) tup[--pos] = 0;
      if (pos == 0) break;
      ++tup[pos - 1];
    }
  }
  return out;
}

}  // namespace circle
