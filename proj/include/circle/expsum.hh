#ifndef CIRCLE_EXPSUM_HH
#define CIRCLE_EXPSUM_HH

#include <vector>

#include "circle/archimedean.hh"
#include "circle/forms.hh"
#include "circle/util.hh"

namespace circle {

// Real phase coefficients on the torus: alphas[i] pairs with the i-th entry
// of the expansion's index set, alpha0 with the discriminant.
struct ArcPoint {
  std::vector<double> alphas;
  double alpha0 = 0.0;

  // wrap all components into [0, 1)
  ArcPoint wrapped() const;
};

// Rational phase a/q with a[i] parallel to the index set and a0 for the
// discriminant.
struct RationalPoint {
  long q = 1;
  long a0 = 0;
  std::vector<long> a;

  // divide everything by the joint gcd and normalize entries into [0, q)
  RationalPoint reduced() const;
  bool is_reduced() const;
  ArcPoint to_arc() const;
};

// Exact (alpha * k) mod 1 for integer k: alpha is split into an integer
// mantissa and a binary exponent, so the product's fractional bits are exact.
double frac_mul(double alpha, int64_t k);
double frac_mul_big(double alpha, const ZZ &k);

// Full box sum over [-P,P]^{ms} of e(sum_j alpha_j phi_j(x) + alpha0 disc(x)).
CC t_sum(const ParametricExpansion &exp, long P, const ArcPoint &alpha, int workers = 1,
         Budget *budget = nullptr);

// Complete sum over residues mod q of e with rational phases a/q.
CC s_q(const ParametricExpansion &exp, const RationalPoint &rp, int workers = 1,
       Budget *budget = nullptr);

// Box integral with halfwidth P (real); same conventions as box_integral.
Estimate v_box(const ParametricExpansion &exp, double P, const std::vector<double> &beta,
               const QuadratureSpec &spec);

struct Residual {
  double lhs = 0.0;        // |T_P(alpha) - q^{-ms} S_q(a) v_P(beta)|
  double rhs_scale = 0.0;  // P^{ms-1} q (sum_j |beta_j| P^d + |beta0| P^{2m} + 1)
};

// Major-arc approximation residual at alpha = a/q + beta.
Residual major_arc_residual(const ParametricExpansion &exp, long P, const ArcPoint &alpha,
                            const RationalPoint &rp, const QuadratureSpec &spec,
                            int workers = 1, Budget *budget = nullptr);

// Exact count of box points with all phi_j = 0 and disc = b via discrete
// orthogonality: the dual-window average collapses, per point, to a product
// of normalized geometric sums, one per coefficient form, so the work is
// box * (r + 1) residue evaluations plus a Q^2 kernel table instead of the
// naive Q^{r+1} * box double loop.  The pre-rounding total must sit within
// 1e-6 of an integer or the call refuses (PrecisionError).
ZZ count_via_dft(const ParametricExpansion &exp, long P, const ZZ &b, int workers = 1,
                 Budget *budget = nullptr);

}  // namespace circle

#endif
