#include "circle/forms.hh"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace circle {

Form Form::constant(int nvars, const ZZ &c) {
  Form f(nvars);
  if (c != 0) f.terms.emplace(std::vector<int>(nvars, 0), c);
  return f;
}

Form Form::variable(int nvars, int var) {
  Form f(nvars);
  std::vector<int> e(nvars, 0);
  e[var] = 1;
  f.terms.emplace(std::move(e), ZZ(1));
  return f;
}

Form &Form::add_term(const std::vector<int> &expo, const ZZ &c) {
  if (c == 0) return *this;
  auto it = terms.find(expo);
  if (it == terms.end()) {
    terms.emplace(expo, c);
  } else {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
  return *this;
}

int Form::degree() const {
  int deg = 0;
  for (const auto &[e, c] : terms)
    deg = std::max(deg, std::accumulate(e.begin(), e.end(), 0));
  return deg;
}

bool Form::is_homogeneous() const {
  int deg = -1;
  for (const auto &[e, c] : terms) {
    int t = std::accumulate(e.begin(), e.end(), 0);
    if (deg < 0) deg = t;
    else if (t != deg) return false;
  }
  return true;
}

ZZ Form::eval(const std::vector<ZZ> &pt) const {
  if (static_cast<int>(pt.size()) != nvars) throw ShapeError("Form::eval: point size mismatch");
  ZZ acc = 0, mono;
  for (const auto &[e, c] : terms) {
    mono = c;
    for (int v = 0; v < nvars; ++v)
      for (int rep = 0; rep < e[v]; ++rep) mono *= pt[v];
    acc += mono;
  }
  return acc;
}

int64_t Form::eval_i64(const int64_t *pt) const {
  int64_t acc = 0;
  for (const auto &[e, c] : terms) {
    int64_t mono = to_i64(c);
    for (int v = 0; v < nvars; ++v)
      for (int rep = 0; rep < e[v]; ++rep) mono *= pt[v];
    acc += mono;
  }
  return acc;
}

double Form::eval_double(const double *pt) const {
  double acc = 0;
  for (const auto &[e, c] : terms) {
    double mono = to_double(c);
    for (int v = 0; v < nvars; ++v)
      for (int rep = 0; rep < e[v]; ++rep) mono *= pt[v];
    acc += mono;
  }
  return acc;
}

double Form::abs_bound(double halfwidth) const {
  double acc = 0;
  for (const auto &[e, c] : terms) {
    double mono = std::abs(to_double(c));
    int deg = std::accumulate(e.begin(), e.end(), 0);
    acc += mono * std::pow(halfwidth, deg);
  }
  return acc;
}

ZZ Form::abs_bound_int(const ZZ &halfwidth) const {
  ZZ acc = 0;
  for (const auto &[e, c] : terms) {
    ZZ mono = abs(c);
    int deg = std::accumulate(e.begin(), e.end(), 0);
    for (int i = 0; i < deg; ++i) mono *= halfwidth;
    acc += mono;
  }
  return acc;
}

Form operator+(const Form &a, const Form &b) {
  if (a.nvars != b.nvars) throw ShapeError("Form +: variable count mismatch");
  Form out = a;
  for (const auto &[e, c] : b.terms) out.add_term(e, c);
  return out;
}

Form operator-(const Form &a, const Form &b) {
  if (a.nvars != b.nvars) throw ShapeError("Form -: variable count mismatch");
  Form out = a;
  for (const auto &[e, c] : b.terms) out.add_term(e, ZZ(-c));
  return out;
}

Form operator*(const Form &a, const Form &b) {
  if (a.nvars != b.nvars) throw ShapeError("Form *: variable count mismatch");
  Form out(a.nvars);
  std::vector<int> e(a.nvars);
  for (const auto &[ea, ca] : a.terms) {
    for (const auto &[eb, cb] : b.terms) {
      for (int v = 0; v < a.nvars; ++v) e[v] = ea[v] + eb[v];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Form Form::scaled(const ZZ &c) const {
  Form out(nvars);
  if (c == 0) return out;
  for (const auto &[e, k] : terms) out.terms.emplace(e, k * c);
  return out;
}

// ---- parsing / printing --------------------------------------------------

namespace {

struct Parser {
  const std::string &text;
  size_t pos = 0;
  int num_vars;

  explicit Parser(const std::string &t, int nv) : text(t), num_vars(nv) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos;
    return true;
  }
  ZZ read_integer() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw ParseError("expected integer", pos);
    return ZZ(text.substr(start, pos - start));
  }
  int read_small_integer(const char *what) {
    size_t at = pos;
    ZZ v = read_integer();
    if (v > 1000000) throw ParseError(std::string(what) + " out of range", at);
    return static_cast<int>(v.get_si());
  }

  // term := [integer] ('*'? factor)* with factor = x<k>[^<e>]
  void read_term(Form &acc, int sign) {
    skip_ws();
    if (pos >= text.size()) throw ParseError("expected term", pos);
    ZZ coef = 1;
    std::vector<int> expo(num_vars, 0);
    bool saw_factor = false, saw_coef = false;

    if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
      coef = read_integer();
      saw_coef = true;
    }
    for (;;) {
      skip_ws();
      if (accept('*')) skip_ws();
      if (pos >= text.size() || text[pos] != 'x') break;
      ++pos;
      size_t at = pos;
      int k = read_small_integer("variable index");
      if (k < 1 || k > num_vars)
        throw ParseError("variable index exceeds num_vars", at);
      int e = 1;
      if (accept('^')) e = read_small_integer("exponent");
      expo[k - 1] += e;
      saw_factor = true;
    }
    if (!saw_factor && !saw_coef) throw ParseError("expected coefficient or variable", pos);
    acc.add_term(expo, sign > 0 ? coef : ZZ(-coef));
  }

  Form run() {
    Form acc(num_vars);
    skip_ws();
    if (pos >= text.size()) throw ParseError("empty input", pos);
    int sign = 1;
    if (accept('+')) sign = 1;
    else if (accept('-')) sign = -1;
    read_term(acc, sign);
    for (;;) {
      skip_ws();
      if (pos >= text.size()) break;
      if (accept('+')) sign = 1;
      else if (accept('-')) sign = -1;
      else throw ParseError("expected '+' or '-'", pos);
      read_term(acc, sign);
    }
    return acc;
  }
};

}  // namespace

Form parse_form(const std::string &text, int num_vars) {
  if (num_vars < 1) throw ShapeError("parse_form: num_vars must be positive");
  Parser p(text, num_vars);
  return p.run();
}

std::string print_form(const Form &f) {
  if (f.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // reverse map order so leading variables print first ("x1^2 + x1*x2 + ...")
  for (auto it = f.terms.rbegin(); it != f.terms.rend(); ++it) {
    const auto &[e, c] = *it;
    ZZ mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    bool has_var = std::any_of(e.begin(), e.end(), [](int x) { return x > 0; });
    bool printed = false;
    if (mag != 1 || !has_var) {
      os << mag.get_str();
      printed = true;
    }
    for (int v = 0; v < f.nvars; ++v) {
      if (e[v] == 0) continue;
      if (printed) os << "*";
      os << "x" << (v + 1);
      if (e[v] > 1) os << "^" << e[v];
      printed = true;
    }
  }
  return os.str();
}

int64_t rank_r(int m, int d) {
  if (m < 1 || d < 1) throw ShapeError("rank_r: m and d must be positive");
  ZZ b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(m + d - 1),
               static_cast<unsigned long>(d));
  if (!fits_i64(b)) throw std::overflow_error("rank_r: binomial exceeds 64-bit range");
  return to_i64(b);
}

// ---- multi-indices and the parametric expansion ---------------------------

std::map<int, int> MultiIndex::multiplicities() const {
  std::map<int, int> mult;
  for (int v : entries) ++mult[v];
  return mult;
}

std::string MultiIndex::str() const {
  std::string out = "(";
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(entries[i]);
  }
  return out + ")";
}

std::vector<MultiIndex> make_index_set(int m, int d) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(d, 1);
  for (;;) {
    out.emplace_back(cur);
    int i = d - 1;
    while (i >= 0 && cur[i] == m) --i;
    if (i < 0) break;
    int v = cur[i] + 1;
    for (int j = i; j < d; ++j) cur[j] = v;
  }
  return out;
}

const Form &ParametricExpansion::phi(const MultiIndex &j) const {
  auto it = phi_map.find(j);
  if (it == phi_map.end()) throw ShapeError("phi: index not in expansion");
  return it->second;
}

std::vector<const Form *> ParametricExpansion::forms_in_order(bool with_disc) const {
  std::vector<const Form *> out;
  out.reserve(index_set.size() + (with_disc ? 1 : 0));
  for (const MultiIndex &j : index_set) out.push_back(&phi(j));
  if (with_disc) out.push_back(&disc);
  return out;
}

namespace {

// polynomial in t_1..t_m with Form coefficients (the ms-variable ring)
using TPoly = std::map<std::vector<int>, Form>;

TPoly tpoly_mul(const TPoly &a, const TPoly &b, int m) {
  TPoly out;
  std::vector<int> e(m);
  for (const auto &[ea, fa] : a) {
    for (const auto &[eb, fb] : b) {
      for (int v = 0; v < m; ++v) e[v] = ea[v] + eb[v];
      Form prod = fa * fb;
      if (prod.is_zero()) continue;
      auto it = out.find(e);
      if (it == out.end()) out.emplace(e, std::move(prod));
      else it->second = it->second + prod;
    }
  }
  return out;
}

Form gram_form_det(std::vector<std::vector<Form>> g, int m, int nv) {
  if (m == 1) return g[0][0];
  // Laplace expansion along the first row; m stays small in practice
  Form acc(nv);
  for (int j = 0; j < m; ++j) {
    if (g[0][j].is_zero()) continue;
    std::vector<std::vector<Form>> sub(m - 1, std::vector<Form>(m - 1, Form(nv)));
    for (int i = 1; i < m; ++i) {
      int t = 0;
      for (int jj = 0; jj < m; ++jj) {
        if (jj == j) continue;
        sub[i - 1][t++] = g[i][jj];
      }
    }
    Form term = g[0][j] * gram_form_det(std::move(sub), m - 1, nv);
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

ParametricExpansion expand_parametric(const Form &F, int m) {
  if (m < 2) throw ShapeError("expand_parametric: m must be at least 2");
  if (F.is_zero()) throw ShapeError("expand_parametric: zero form");
  if (!F.is_homogeneous()) throw ShapeError("expand_parametric: form must be homogeneous");
  int s = F.nvars;
  int d = F.degree();
  if (d < 2) throw ShapeError("expand_parametric: degree must be at least 2");

  ParametricExpansion out;
  out.base = F;
  out.s = s;
  out.m = m;
  out.d = d;
  out.r = rank_r(m, d);
  out.index_set = make_index_set(m, d);
  int nv = m * s;

  // substitute x_n -> sum_i t_i * X_{i,n} monomial by monomial
  TPoly total;
  for (const auto &[expo, c] : F.terms) {
    TPoly prod;
    prod.emplace(std::vector<int>(m, 0), Form::constant(nv, c));
    for (int n = 0; n < s; ++n) {
      if (expo[n] == 0) continue;
      TPoly lin;
      for (int i = 0; i < m; ++i) {
        std::vector<int> te(m, 0);
        te[i] = 1;
        lin.emplace(std::move(te), Form::variable(nv, i * s + n));
      }
      for (int rep = 0; rep < expo[n]; ++rep) prod = tpoly_mul(prod, lin, m);
    }
    for (auto &[te, form] : prod) {
      auto it = total.find(te);
      if (it == total.end()) total.emplace(te, std::move(form));
      else it->second = it->second + form;
    }
  }

  ZZ dfact = 1;
  for (int i = 2; i <= d; ++i) dfact *= i;
  for (const MultiIndex &j : out.index_set) {
    std::vector<int> te(m, 0);
    for (int v : j.entries) ++te[v - 1];
    auto it = total.find(te);
    out.phi_map.emplace(j, it == total.end() ? Form(nv) : it->second);
    ZZ denom = 1;
    for (const auto &[idx, mult] : j.multiplicities())
      for (int i = 2; i <= mult; ++i) denom *= i;
    out.a_factors.emplace(j, QQ(dfact) / QQ(denom));
  }

  // D = det(X^t X) as a polynomial in the ms variables
  std::vector<std::vector<Form>> g(m, std::vector<Form>(m, Form(nv)));
  for (int i = 0; i < m; ++i) {
    for (int k = i; k < m; ++k) {
      Form dot(nv);
      for (int n = 0; n < s; ++n)
        dot = dot + Form::variable(nv, i * s + n) * Form::variable(nv, k * s + n);
      g[i][k] = dot;
      g[k][i] = dot;
    }
  }
  out.disc = gram_form_det(std::move(g), m, nv);
  return out;
}

ZZ gram_disc(const TupleMatrix &x) {
  if (x.s < x.m) throw ShapeError("gram_disc: need s >= m");
  return gram_det(x);
}

ZZ det_T(const std::vector<std::vector<ZZ>> &h) {
  if (h.empty() || h.size() % 2 != 0) throw ShapeError("det_T: need 2m vectors");
  int m = static_cast<int>(h.size()) / 2;
  int s = static_cast<int>(h[0].size());
  if (s < m) throw ShapeError("det_T: need vector length >= m");
  for (const auto &v : h)
    if (static_cast<int>(v.size()) != s) throw ShapeError("det_T: ragged vectors");

  ZZ acc = 0;
  std::vector<ZZ> gm(static_cast<size_t>(m) * m);
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    // tau swaps k <-> m+k exactly for the k in mask
    for (int u = 0; u < m; ++u) {
      const auto &left = (mask >> u & 1) ? h[m + u] : h[u];
      for (int v = 0; v < m; ++v) {
        const auto &right = (mask >> v & 1) ? h[v] : h[m + v];
        ZZ dot = 0;
        for (int n = 0; n < s; ++n) dot += left[n] * right[n];
        gm[u * m + v] = dot;
      }
    }
    acc += det_exact(gm, m);
  }
  return acc;
}

ZZ d_form(const std::vector<std::vector<ZZ>> &h, int n) {
  if (h.empty() || h.size() % 2 != 1) throw ShapeError("d_form: need 2m-1 vectors");
  int s = static_cast<int>(h[0].size());
  if (n < 1 || n > s) throw ShapeError("d_form: unit-vector index out of range");
  std::vector<std::vector<ZZ>> full = h;
  std::vector<ZZ> en(s, ZZ(0));
  en[n - 1] = 1;
  full.push_back(std::move(en));
  return det_T(full);
}

QQ eval_phi(const Form &F, const std::vector<std::vector<ZZ>> &v) {
  int d = F.degree();
  if (static_cast<int>(v.size()) != d) throw ShapeError("eval_phi: need d vectors");
  int s = F.nvars;
  for (const auto &vec : v)
    if (static_cast<int>(vec.size()) != s) throw ShapeError("eval_phi: vector length mismatch");

  ZZ acc = 0;
  std::vector<ZZ> pt(s);
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    for (int n = 0; n < s; ++n) pt[n] = 0;
    int bits = 0;
    for (int i = 0; i < d; ++i) {
      if (!(mask >> i & 1)) continue;
      ++bits;
      for (int n = 0; n < s; ++n) pt[n] += v[i][n];
    }
    ZZ val = F.eval(pt);
    if ((d - bits) % 2) acc -= val; else acc += val;
  }
  ZZ dfact = 1;
  for (int i = 2; i <= d; ++i) dfact *= i;
  QQ out(acc, dfact);
  out.canonicalize();
  return out;
}

QQ b_form(const Form &F, const std::vector<std::vector<ZZ>> &v, int n) {
  int d = F.degree();
  if (static_cast<int>(v.size()) != d - 1) throw ShapeError("b_form: need d-1 vectors");
  if (n < 1 || n > F.nvars) throw ShapeError("b_form: unit-vector index out of range");
  std::vector<std::vector<ZZ>> full = v;
  std::vector<ZZ> en(F.nvars, ZZ(0));
  en[n - 1] = 1;
  full.push_back(std::move(en));
  return eval_phi(F, full);
}

TupleFn delta_diff(TupleFn g, int slot, std::vector<ZZ> h) {
  return [g = std::move(g), slot, h = std::move(h)](const TupleMatrix &x) -> ZZ {
    if (slot < 1 || slot > x.m) throw ShapeError("delta_diff: slot out of range");
    if (static_cast<int>(h.size()) != x.s) throw ShapeError("delta_diff: step length mismatch");
    TupleMatrix shifted = x;
    for (int n = 0; n < x.s; ++n) shifted.at(n, slot - 1) += h[n];
    return g(shifted) - g(x);
  };
}

// ---- compiled kernels ------------------------------------------------------

static std::vector<std::pair<int, int>> pack_exponents(const std::vector<int> &e) {
  std::vector<std::pair<int, int>> ve;
  for (size_t v = 0; v < e.size(); ++v)
    if (e[v] > 0) ve.emplace_back(static_cast<int>(v), e[v]);
  return ve;
}

ModForm ModForm::compile(const Form &f, int64_t q) {
  if (q < 1 || q > (int64_t(1) << 31)) throw ShapeError("ModForm: modulus out of range");
  ModForm out;
  out.q = q;
  out.nvars = f.nvars;
  for (const auto &[e, c] : f.terms) {
    ZZ red = c % q;
    if (red < 0) red += q;
    int64_t ci = to_i64(red);
    if (ci == 0) continue;
    out.terms.push_back({ci, pack_exponents(e)});
  }
  return out;
}

int64_t ModForm::eval(const int64_t *pt) const {
  int64_t acc = 0;
  for (const Term &t : terms) {
    int64_t mono = t.c;
    for (const auto &[v, e] : t.ve) {
      int64_t base = pt[v];
      for (int rep = 0; rep < e; ++rep) mono = mono * base % q;
    }
    acc += mono;
    if (acc >= q) acc -= q;
  }
  return acc;
}

LastVarSplit LastVarSplit::compile(const Form &f, int64_t q) {
  LastVarSplit out;
  out.q = q;
  int last = f.nvars - 1;
  out.deg = 0;
  for (const auto &[e, c] : f.terms) out.deg = std::max(out.deg, e[last]);
  std::vector<Form> parts(out.deg + 1, Form(f.nvars > 1 ? f.nvars - 1 : 1));
  for (const auto &[e, c] : f.terms) {
    std::vector<int> outer(e.begin(), e.begin() + last);
    if (outer.empty()) outer.push_back(0);
    parts[e[last]].add_term(outer, c);
  }
  for (Form &p : parts) out.coeff.push_back(ModForm::compile(p, q));
  return out;
}

void LastVarSplit::eval_coeffs(const int64_t *outer, int64_t *out) const {
  for (size_t e = 0; e < coeff.size(); ++e) out[e] = coeff[e].eval(outer);
}

int64_t LastVarSplit::horner(const int64_t *coeffs, int deg, int64_t x, int64_t q) {
  int64_t acc = coeffs[deg];
  for (int e = deg - 1; e >= 0; --e) acc = (acc * x + coeffs[e]) % q;
  return acc;
}

RealForm RealForm::compile(const Form &f) {
  RealForm out;
  out.nvars = f.nvars;
  for (const auto &[e, c] : f.terms) out.terms.push_back({to_double(c), pack_exponents(e)});
  return out;
}

double RealForm::eval(const double *pt) const {
  double acc = 0;
  for (const Term &t : terms) {
    double mono = t.c;
    for (const auto &[v, e] : t.ve) {
      double base = pt[v];
      for (int rep = 0; rep < e; ++rep) mono *= base;
    }
    acc += mono;
  }
  return acc;
}

IntForm IntForm::compile(const Form &f) {
  IntForm out;
  out.nvars = f.nvars;
  for (const auto &[e, c] : f.terms) {
    if (!fits_i64(c)) throw ShapeError("IntForm: coefficient exceeds int64");
    out.terms.push_back({to_i64(c), pack_exponents(e)});
  }
  return out;
}

int64_t IntForm::eval(const int64_t *pt) const {
  int64_t acc = 0;
  for (const Term &t : terms) {
    int64_t mono = t.c;
    for (const auto &[v, e] : t.ve) {
      int64_t base = pt[v];
      for (int rep = 0; rep < e; ++rep) mono *= base;
    }
    acc += mono;
  }
  return acc;
}

}  // namespace circle
