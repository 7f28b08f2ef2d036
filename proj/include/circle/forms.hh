#ifndef CIRCLE_FORMS_HH
#define CIRCLE_FORMS_HH

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "circle/matrix.hh"
#include "circle/numbers.hh"

namespace circle {

// Sparse multivariate polynomial with exact integer coefficients.  Keys are
// exponent vectors of length nvars; stored coefficients are never zero.
struct Form {
  int nvars = 0;
  std::map<std::vector<int>, ZZ> terms;

  Form() = default;
  explicit Form(int nvars_) : nvars(nvars_) {}

  static Form constant(int nvars, const ZZ &c);
  static Form variable(int nvars, int var);  // 0-based var index

  Form &add_term(const std::vector<int> &expo, const ZZ &c);
  int degree() const;           // max total degree; 0 for the zero form
  bool is_homogeneous() const;  // vacuously true for the zero form
  bool is_zero() const { return terms.empty(); }

  ZZ eval(const std::vector<ZZ> &pt) const;
  int64_t eval_i64(const int64_t *pt) const;  // caller guarantees no overflow
  double eval_double(const double *pt) const;

  // sum of |coef| * halfwidth^deg(term): bounds |value| on [-hw, hw]^nvars
  double abs_bound(double halfwidth) const;
  ZZ abs_bound_int(const ZZ &halfwidth) const;

  friend Form operator+(const Form &a, const Form &b);
  friend Form operator-(const Form &a, const Form &b);
  friend Form operator*(const Form &a, const Form &b);
  Form scaled(const ZZ &c) const;
  bool operator==(const Form &o) const { return nvars == o.nvars && terms == o.terms; }
};

// Grammar: terms separated by '+'/'-'; a term is an optional integer
// coefficient and '*'-separated factors `x<k>` or `x<k>^<e>` (k is 1-based);
// whitespace is ignored.  Example: "3*x1^2*x2 - x3^3".
Form parse_form(const std::string &text, int num_vars);
std::string print_form(const Form &f);  // parse(print(f)) == f

// binom(m+d-1, d); throws std::overflow_error if it exceeds int64.
int64_t rank_r(int m, int d);

// Degree-d multiset over slots {1..m}; entries are sorted ascending.
struct MultiIndex {
  std::vector<int> entries;
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) {}
  std::map<int, int> multiplicities() const;
  bool operator<(const MultiIndex &o) const { return entries < o.entries; }
  bool operator==(const MultiIndex &o) const { return entries == o.entries; }
  std::string str() const;  // "(1,2,2)"
};

// All degree-d multisets over {1..m} in lexicographic order.
std::vector<MultiIndex> make_index_set(int m, int d);

// F(t_1 x_1 + ... + t_m x_m) expanded over Z: phi_map[j] is the coefficient
// of t^j, a form in the ms variables (i, n) -> i*s + n; disc is det(X^t X)
// in the same variables.
struct ParametricExpansion {
  Form base;
  int s = 0, m = 0, d = 0;
  int64_t r = 0;
  std::vector<MultiIndex> index_set;
  std::map<MultiIndex, Form> phi_map;
  std::map<MultiIndex, QQ> a_factors;  // multinomial d!/prod(mult!)
  Form disc;

  const Form &phi(const MultiIndex &j) const;
  // the r phi forms in index order; with_disc appends disc as entry r
  std::vector<const Form *> forms_in_order(bool with_disc) const;
  int64_t ms() const { return static_cast<int64_t>(m) * s; }
};

ParametricExpansion expand_parametric(const Form &F, int m);

// det(X^t X) for an s x m tuple with s >= m.
ZZ gram_disc(const TupleMatrix &x);

// Sum over the 2^m subset swaps tau of det((h_tau(1..m))^t (h_tau(m+1..2m))),
// where tau exchanges slot k with slot m+k for k in a subset of {1..m}.
ZZ det_T(const std::vector<std::vector<ZZ>> &h);

// det_T with the 2m-th argument set to the n-th unit vector (n is 1-based).
ZZ d_form(const std::vector<std::vector<ZZ>> &h, int n);

// Polarization of F: the symmetric d-linear form with phi(x,...,x) = F(x).
QQ eval_phi(const Form &F, const std::vector<std::vector<ZZ>> &v);

// Coefficient forms of the last polarization slot: phi(v_1..v_{d-1}, x) =
// sum_n x_n * b_form(v, n); n is 1-based.
QQ b_form(const Form &F, const std::vector<std::vector<ZZ>> &v, int n);

// Discrete differencing: returns x -> G(x with h added to column slot) - G(x).
// slot is 1-based; composable.
using TupleFn = std::function<ZZ(const TupleMatrix &)>;
TupleFn delta_diff(TupleFn g, int slot, std::vector<ZZ> h);

// ---- compiled evaluation kernels ----------------------------------------

// Form with coefficients reduced mod q, evaluated in int64 (q < 2^31).
struct ModForm {
  int64_t q = 1;
  int nvars = 0;
  struct Term {
    int64_t c;
    std::vector<std::pair<int, int>> ve;  // (variable, exponent)
  };
  std::vector<Term> terms;
  static ModForm compile(const Form &f, int64_t q);
  int64_t eval(const int64_t *pt) const;  // inputs in [0,q), result in [0,q)
};

// f viewed as a polynomial in its last variable: f = sum_e coeff[e] * x_last^e.
// Lets box/residue scans hoist everything but the innermost coordinate.
struct LastVarSplit {
  int64_t q = 1;
  int deg = 0;
  std::vector<ModForm> coeff;  // index = exponent of the last variable
  static LastVarSplit compile(const Form &f, int64_t q);
  void eval_coeffs(const int64_t *outer, int64_t *out) const;
  static int64_t horner(const int64_t *coeffs, int deg, int64_t x, int64_t q);
};

// Plain double-precision compiled form for quadrature inner loops.
struct RealForm {
  int nvars = 0;
  struct Term {
    double c;
    std::vector<std::pair<int, int>> ve;
  };
  std::vector<Term> terms;
  static RealForm compile(const Form &f);
  double eval(const double *pt) const;
};

// Exact integer evaluation in int64; valid when abs_bound_int(P) fits.
struct IntForm {
  int nvars = 0;
  struct Term {
    int64_t c;
    std::vector<std::pair<int, int>> ve;
  };
  std::vector<Term> terms;
  static IntForm compile(const Form &f);
  int64_t eval(const int64_t *pt) const;
};

}  // namespace circle

#endif
