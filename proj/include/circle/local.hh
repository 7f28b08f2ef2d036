#ifndef CIRCLE_LOCAL_HH
#define CIRCLE_LOCAL_HH

#include <utility>
#include <vector>

#include "circle/expsum.hh"
#include "circle/forms.hh"
#include "circle/util.hh"

namespace circle {

// Exact number of residue tuples x mod `modulus` with every phi_j congruent
// to zero and disc congruent to b.
ZZ congruence_count(const ParametricExpansion &exp, long modulus, const ZZ &b,
                    int workers = 1, Budget *budget = nullptr);

// The normalized local count at modulus p^i, computed two independent ways:
// a floating character sum over all dual residues (factored per coefficient
// into geometric sums, summed with honest trig) and the exact congruence
// count divided by p^{i(ms-r-1)}.  The two must agree to 1e-6 or the call
// refuses (PrecisionError), since a disagreement means a phase bug.
struct ChiPair {
  double character_form = 0.0;
  double count_form = 0.0;
};
ChiPair chi_p_truncated(const ParametricExpansion &exp, long p, int i, const ZZ &b,
                        int workers = 1, Budget *budget = nullptr);

// Normalized local counts chi^{(i)} for i = 0..max_i with a practical
// stopping flag: stabilized once two consecutive increments fall below the
// tolerance.  Entries are (i, chi^{(i)}).
struct LocalDensitySeries {
  long p = 2;
  std::vector<std::pair<int, double>> values;
  bool stabilized = false;
  double tolerance = 1e-6;
};
LocalDensitySeries chi_p_series(const ParametricExpansion &exp, long p, int max_i,
                                const ZZ &b, int workers = 1, Budget *budget = nullptr);

// One modulus layer of the truncated series: the full dual sum over reduced
// residue tuples (joint gcd with q equal to 1), collapsed by Moebius
// inversion to an exact rational, so the float assertion on the imaginary
// part is vacuous here by construction.
QQ singular_series_layer(const ParametricExpansion &exp, long q, const ZZ &b,
                         int workers = 1, Budget *budget = nullptr);

// Layers for q = 1..Q in order.
std::vector<std::pair<long, QQ>> singular_series_layers(const ParametricExpansion &exp,
                                                        long Q, const ZZ &b, int workers = 1,
                                                        Budget *budget = nullptr);

// Sum of the layers for q <= Q, as a double.
double singular_series_partial(const ParametricExpansion &exp, long Q, const ZZ &b,
                               int workers = 1, Budget *budget = nullptr);

// Term-size table: every reduced dual tuple with modulus q <= q_max, its
// normalized complete-sum magnitude |q^{-ms} S_q|, the applicable decay
// bound at the configured growth exponents k and l, and their ratio.  No
// verdicts are attached because the comparison constant is not explicit.
struct SqBoundRow {
  long q = 1;
  long a0 = 0;
  std::vector<long> a;
  double abs_value = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};
std::vector<SqBoundRow> sq_bound_harness(const ParametricExpansion &exp, long q_max,
                                         const QQ &k, const QQ &l, int workers = 1,
                                         Budget *budget = nullptr);

}  // namespace circle

#endif
