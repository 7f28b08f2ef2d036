#include "circle/archimedean.hh"

#include <algorithm>
#include <cmath>
#include <limits>

namespace circle {

namespace {

// Gauss-Legendre nodes and weights on [-1,1] by Newton iteration on the
// three-term recurrence.
void gl_nodes(int n, std::vector<double> &x, std::vector<double> &w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p1 = 0.0, dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

CC tensor_pass(int dim, double halfwidth, int n, const std::function<CC(const double *)> &fn,
               int workers) {
  std::vector<double> x, w;
  gl_nodes(n, x, w);
  uint64_t inner = 1;
  for (int k = 1; k < dim; ++k) inner *= static_cast<uint64_t>(n);

  std::vector<KahanC> parts(n);
  parallel_for_chunks(n, workers, [&](uint64_t chunk) {
    std::vector<double> pt(dim);
    pt[0] = halfwidth * x[chunk];
    const double w0 = w[chunk];
    KahanC acc;
    for (uint64_t c = 0; c < inner; ++c) {
      uint64_t t = c;
      double wp = w0;
      for (int k = 1; k < dim; ++k) {
        int i = static_cast<int>(t % n);
        t /= n;
        pt[k] = halfwidth * x[i];
        wp *= w[i];
      }
      CC v = fn(pt.data());
      acc.add(wp * v.real(), wp * v.imag());
    }
    parts[chunk] = acc;
  });

  KahanC total;
  for (auto &p : parts) total.merge(p);
  double scale = std::pow(halfwidth, dim);
  return CC(total.re.get() * scale, total.im.get() * scale);
}

Estimate mc_pass(int dim, double halfwidth, const std::function<CC(const double *)> &fn,
                 const QuadratureSpec &spec) {
  const uint64_t n = std::max<uint64_t>(spec.sample_count, 1024);
  const uint64_t nchunks = std::min<uint64_t>(256, n);
  std::vector<double> shift = halton_shift(dim, spec.seed);

  std::vector<KahanC> parts(nchunks);
  std::vector<uint64_t> counts(nchunks, 0);
  const uint64_t per = n / nchunks, rem = n % nchunks;
  parallel_for_chunks(nchunks, spec.workers, [&](uint64_t chunk) {
    uint64_t cnt = per + (chunk < rem ? 1 : 0);
    uint64_t start = chunk * per + std::min(chunk, rem);
    std::vector<double> pt(dim), u(dim);
    KahanC acc;
    for (uint64_t i = 0; i < cnt; ++i) {
      halton_fill(start + i + 1, dim, shift, u.data());
      for (int k = 0; k < dim; ++k) pt[k] = halfwidth * (2.0 * u[k] - 1.0);
      CC v = fn(pt.data());
      acc.add(v.real(), v.imag());
    }
    parts[chunk] = acc;
    counts[chunk] = cnt;
  });

  KahanC total;
  for (auto &p : parts) total.merge(p);
  const double volume = std::pow(2.0 * halfwidth, dim);
  const double mean_re = total.re.get() / static_cast<double>(n);
  const double mean_im = total.im.get() / static_cast<double>(n);

  // spread of per-chunk means as the error scale
  double var = 0.0;
  int used = 0;
  for (uint64_t c = 0; c < nchunks; ++c) {
    if (!counts[c]) continue;
    double mr = parts[c].re.get() / static_cast<double>(counts[c]);
    double mi = parts[c].im.get() / static_cast<double>(counts[c]);
    var += (mr - mean_re) * (mr - mean_re) + (mi - mean_im) * (mi - mean_im);
    ++used;
  }
  Estimate est;
  est.value = CC(volume * mean_re, volume * mean_im);
  if (used > 1)
    est.err = volume * std::sqrt(var / (static_cast<double>(used) * (used - 1)));
  else
    est.err = volume;  // single chunk: no spread information
  est.converged = est.err <= spec.tolerance * std::max(1.0, std::abs(est.value));
  return est;
}

int auto_axis_points(double osc_hint) {
  double n = 4.0 * std::ceil(std::max(0.0, osc_hint)) + 4.0;
  return std::max(8, static_cast<int>(n));
}

double pow_points(int n, int dim) {
  return std::pow(static_cast<double>(n), dim);
}

}  // namespace

Estimate integrate_cube(int dim, double halfwidth, double osc_hint,
                        const std::function<CC(const double *)> &fn,
                        const QuadratureSpec &spec) {
  if (dim < 1) throw ShapeError("integrate_cube: dimension must be positive");
  if (spec.tolerance <= 0) throw ShapeError("integrate_cube: tolerance must be positive");

  bool want_tensor = spec.method == QuadMethod::tensor_gauss;
  const bool explicit_nodes = spec.points_per_axis > 0;
  if (want_tensor && dim > 6) {
    if (explicit_nodes) throw ShapeError("integrate_cube: tensor grids limited to 6 axes");
    want_tensor = false;
  }

  if (want_tensor) {
    int n1 = explicit_nodes ? spec.points_per_axis : auto_axis_points(osc_hint);
    int n2 = n1 + std::max(2, n1 / 3);
    double cost = pow_points(n1, dim) + pow_points(n2, dim);
    if (cost > static_cast<double>(spec.max_evals)) {
      if (explicit_nodes)
        throw BudgetError(cost > 1e18 ? UINT64_MAX : static_cast<uint64_t>(cost),
                          spec.max_evals);
      want_tensor = false;  // oscillation too fast for the grid budget
    }
    if (want_tensor) {
      CC coarse = tensor_pass(dim, halfwidth, n1, fn, spec.workers);
      CC fine = tensor_pass(dim, halfwidth, n2, fn, spec.workers);
      Estimate est;
      est.value = fine;
      est.err = std::abs(fine - coarse);
      est.converged = est.err <= spec.tolerance * std::max(1.0, std::abs(fine));
      return est;
    }
  }

  if (dim > 20) throw ShapeError("integrate_cube: sampling limited to 20 axes");
  return mc_pass(dim, halfwidth, fn, spec);
}

double phase_oscillation(const ParametricExpansion &exp, const std::vector<double> &beta,
                         double halfwidth) {
  std::vector<const Form *> fs = exp.forms_in_order(true);
  if (beta.size() != fs.size()) throw ShapeError("phase_oscillation: coefficient count");
  double osc = 0.0;
  for (size_t c = 0; c < fs.size(); ++c)
    osc = std::max(osc, std::abs(beta[c]) * fs[c]->abs_bound(halfwidth));
  return osc;
}

namespace {

struct PhasePack {
  std::vector<RealForm> fs;
  std::vector<double> beta;

  static PhasePack make(const ParametricExpansion &exp, const std::vector<double> &beta) {
    std::vector<const Form *> forms = exp.forms_in_order(true);
    if (beta.size() != forms.size())
      throw ShapeError("box_integral: expected r+1 phase coefficients");
    PhasePack p;
    for (const Form *f : forms) p.fs.push_back(RealForm::compile(*f));
    p.beta = beta;
    return p;
  }

  CC operator()(const double *pt) const {
    double ph = 0.0;
    for (size_t c = 0; c < fs.size(); ++c)
      if (beta[c] != 0.0) ph += beta[c] * fs[c].eval(pt);
    double ang = 2.0 * M_PI * ph;
    return CC(std::cos(ang), std::sin(ang));
  }
};

}  // namespace

Estimate box_integral(const ParametricExpansion &exp, const std::vector<double> &beta,
                      double halfwidth, const QuadratureSpec &spec) {
  if (halfwidth <= 0) throw ShapeError("box_integral: halfwidth must be positive");
  PhasePack pack = PhasePack::make(exp, beta);
  double osc = phase_oscillation(exp, beta, halfwidth);
  return integrate_cube(static_cast<int>(exp.ms()), halfwidth, osc,
                        [&pack](const double *pt) { return pack(pt); }, spec);
}

Estimate v1(const ParametricExpansion &exp, const std::vector<double> &beta,
            const QuadratureSpec &spec) {
  return box_integral(exp, beta, 1.0, spec);
}

namespace {

// integral of e(y beta) over beta in [-R, R]: sin(2 pi R y) / (pi y)
double window_kernel(double R, double y) {
  double a = 2.0 * M_PI * R * y;
  if (std::abs(a) < 1e-6) return 2.0 * R * (1.0 - a * a / 6.0);
  return std::sin(a) / (M_PI * y);
}

}  // namespace

ChiInfResult chi_inf_truncated(const ParametricExpansion &exp, const ZZ &b, long P, double R,
                               const QuadratureSpec &spec) {
  if (R <= 0) throw ShapeError("chi_inf_truncated: window must be positive");
  if (P < 1) throw ShapeError("chi_inf_truncated: scale must be positive");

  std::vector<const Form *> forms = exp.forms_in_order(true);
  std::vector<RealForm> fs;
  for (const Form *f : forms) fs.push_back(RealForm::compile(*f));
  const size_t nc = fs.size();
  const double shift = to_double(b) / std::pow(static_cast<double>(P), 2.0 * exp.m);

  double bound = 0.0;
  for (const Form *f : forms) bound = std::max(bound, f->abs_bound(1.0));

  ChiInfResult out;
  for (double scale : {0.25, 0.5, 1.0}) {
    double Rs = R * scale;
    auto fn = [&fs, nc, shift, Rs](const double *pt) {
      double prod = 1.0;
      for (size_t c = 0; c < nc; ++c) {
        double y = fs[c].eval(pt);
        if (c + 1 == nc) y -= shift;
        prod *= window_kernel(Rs, y);
      }
      return CC(prod, 0.0);
    };
    Estimate est = integrate_cube(static_cast<int>(exp.ms()), 1.0, Rs * bound + std::abs(shift) * Rs, fn, spec);
    out.trace.emplace_back(Rs, est.value.real());
    if (scale == 1.0) {
      out.value = est.value.real();
      out.err = est.err;
      out.converged = est.converged;
      out.imag_mag = std::abs(est.value.imag());
    }
  }
  return out;
}

Estimate chi_inf_nested(const ParametricExpansion &exp, const ZZ &b, long P, double R,
                        const QuadratureSpec &outer, const QuadratureSpec &inner) {
  if (R <= 0) throw ShapeError("chi_inf_nested: window must be positive");
  if (P < 1) throw ShapeError("chi_inf_nested: scale must be positive");
  const int dim = static_cast<int>(exp.r) + 1;
  const double shift = to_double(b) / std::pow(static_cast<double>(P), 2.0 * exp.m);

  QuadratureSpec outer_serial = outer;
  outer_serial.workers = 1;  // serial so the inner-error maximum below is safe
  double worst_inner = 0.0;

  auto fn = [&](const double *bpt) {
    std::vector<double> beta(bpt, bpt + dim);
    Estimate in = box_integral(exp, beta, 1.0, inner);
    worst_inner = std::max(worst_inner, in.err);
    double ang = -2.0 * M_PI * shift * bpt[dim - 1];
    return in.value * CC(std::cos(ang), std::sin(ang));
  };
  // outer oscillation: the integrand magnitude is <= 2^{ms} and turns slowly
  // in beta at small R; scale nodes by R times the worst inner phase bound
  double osc = phase_oscillation(exp, std::vector<double>(dim, R), 1.0);
  Estimate est = integrate_cube(dim, R, osc, fn, outer_serial);
  est.err += worst_inner * std::pow(2.0 * R, dim);  // first-order propagation
  est.converged = est.err <= outer.tolerance * std::max(1.0, std::abs(est.value));
  return est;
}

std::vector<DecayRow> v1_decay_harness(const ParametricExpansion &exp,
                                       const std::vector<std::vector<double>> &directions,
                                       const std::vector<double> &magnitudes, const QQ &k,
                                       const QQ &l, const QuadratureSpec &spec) {
  if (k <= 0 || l <= 0) throw ShapeError("v1_decay_harness: exponent parameters must be positive");
  const double kd = k.get_d(), ld = l.get_d();
  const double d = exp.d, m = exp.m;
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<DecayRow> rows;
  for (size_t di = 0; di < directions.size(); ++di) {
    const auto &dir = directions[di];
    if (static_cast<int64_t>(dir.size()) != exp.r + 1)
      throw ShapeError("v1_decay_harness: direction length must be r+1");
    for (double t : magnitudes) {
      std::vector<double> beta(dir.size());
      for (size_t c = 0; c < dir.size(); ++c) beta[c] = t * dir[c];
      Estimate est = v1(exp, beta, spec);

      double bnorm = 0.0;
      for (int64_t j = 0; j < exp.r; ++j) bnorm = std::max(bnorm, std::abs(beta[j]));
      double b0 = std::abs(beta[exp.r]);

      double bound;
      if (2 * m > d) {
        double t1 = b0 > 0 ? std::pow(b0, -ld / (2 * m - 1)) : inf;
        double t2 =
            bnorm > 0 ? std::pow(bnorm, -1.0 / ((2 * m - 1) / ld + (d - 1) / kd)) : inf;
        bound = std::min({1.0, t1, t2});
      } else if (d > 2 * m) {
        double t1 = bnorm > 0 ? std::pow(bnorm, -kd / (d - 1)) : inf;
        double t2 =
            b0 > 0 ? std::pow(b0, -1.0 / (3 * (d - 1) / kd + (2 * m - 1) / ld)) : inf;
        bound = std::min({1.0, t1, t2});
      } else {
        bound = std::numeric_limits<double>::quiet_NaN();  // excluded case
      }

      DecayRow row;
      row.direction = static_cast<int>(di);
      row.t = t;
      row.abs_v1 = std::abs(est.value);
      row.bound = bound;
      row.ratio = row.abs_v1 / bound;
      row.converged = est.converged;
      rows.push_back(row);
    }
  }
  return rows;
}

DensityEstimate real_density_mc(const ParametricExpansion &exp, const ZZ &b, long P, double eps,
                                uint64_t n_samples, uint64_t seed, int workers) {
  if (eps <= 0) throw ShapeError("real_density_mc: thickness must be positive");
  if (P < 1) throw ShapeError("real_density_mc: scale must be positive");
  if (n_samples == 0) throw ShapeError("real_density_mc: need at least one sample");

  std::vector<const Form *> forms = exp.forms_in_order(true);
  std::vector<RealForm> fs;
  for (const Form *f : forms) fs.push_back(RealForm::compile(*f));
  const size_t nc = fs.size();
  const double shift = to_double(b) / std::pow(static_cast<double>(P), 2.0 * exp.m);
  const int dim = static_cast<int>(exp.ms());

  const uint64_t nchunks = std::min<uint64_t>(1024, n_samples);
  const uint64_t per = n_samples / nchunks, rem = n_samples % nchunks;
  std::vector<uint64_t> hits(nchunks, 0), counts(nchunks, 0);

  parallel_for_chunks(nchunks, workers, [&](uint64_t chunk) {
    Rng rng(mix_seed(seed, chunk));
    uint64_t cnt = per + (chunk < rem ? 1 : 0);
    std::vector<double> pt(dim);
    uint64_t h = 0;
    for (uint64_t i = 0; i < cnt; ++i) {
      for (int k = 0; k < dim; ++k) pt[k] = rng.uniform(-1.0, 1.0);
      bool ok = true;
      for (size_t c = 0; c < nc && ok; ++c) {
        double y = fs[c].eval(pt.data());
        if (c + 1 == nc) y -= shift;
        if (std::abs(y) >= eps) ok = false;
      }
      if (ok) ++h;
    }
    hits[chunk] = h;
    counts[chunk] = cnt;
  });

  uint64_t total_hits = 0;
  for (uint64_t h : hits) total_hits += h;
  const double volume = std::pow(2.0, dim);
  const double norm = std::pow(2.0 * eps, static_cast<double>(exp.r) + 1);
  const double rate = static_cast<double>(total_hits) / static_cast<double>(n_samples);

  double var = 0.0;
  int used = 0;
  for (uint64_t c = 0; c < nchunks; ++c) {
    if (!counts[c]) continue;
    double rc = static_cast<double>(hits[c]) / static_cast<double>(counts[c]);
    var += (rc - rate) * (rc - rate);
    ++used;
  }
  double se = used > 1 ? std::sqrt(var / (static_cast<double>(used) * (used - 1))) : rate;

  DensityEstimate out;
  out.estimate = volume * rate / norm;
  out.ci_low = volume * (rate - 1.96 * se) / norm;
  out.ci_high = volume * (rate + 1.96 * se) / norm;
  out.hits = total_hits;
  out.samples = n_samples;
  return out;
}

}  // namespace circle
