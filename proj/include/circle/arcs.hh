#ifndef CIRCLE_ARCS_HH
#define CIRCLE_ARCS_HH

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "circle/expsum.hh"
#include "circle/forms.hh"
#include "circle/numbers.hh"
#include "circle/util.hh"

namespace circle {

// Width parameters for the rational-approximation families on the torus.
// eta widens the discriminant direction, theta the form directions; k and l
// are the decay capacities of the two differencing steps.  When `coupled` is
// set, k*theta == l*eta must hold to relative precision 1e-12.
struct ArcParams {
  double eta = 0.0;
  double theta = 0.0;
  double k = 1.0;
  double l = 1.0;
  bool coupled = false;

  void validate() const;  // ShapeError on out-of-range values or broken coupling
};

// The six approximation families.  M0 constrains only the discriminant
// coordinate; Md and Md_dagger constrain only the form coordinates (per-slot
// denominators vs. one shared denominator); M_theta_eta and M_d_gt combine a
// form-side family with a discriminant-side refinement; N is the single-
// denominator envelope used for pruning.
enum class ArcFamily { M0, M_theta_eta, N, Md, Md_dagger, M_d_gt };

const char *family_name(ArcFamily family);
ArcFamily family_from_name(const std::string &name);  // ShapeError if unknown

struct ArcMembership {
  bool member = false;
  RationalPoint witness;  // combined reduced fraction; meaningful only when member
};

// Exhaustive witness search within the family's denominator and distance
// cutoffs (all displayed constants read as 1; denominator cutoffs are
// floor(P^exponent + 1e-12)).  Distances |q*alpha - a| are evaluated with
// exact fractional-part arithmetic, so membership is deterministic.
ArcMembership arc_membership(const ParametricExpansion &exp, const ArcPoint &alpha,
                             double P, const ArcParams &params, ArcFamily family);

// Closed-form exponent e with vol(family) <= P^e under the constant-1 reading.
double arc_volume_exponent(const ParametricExpansion &exp, ArcFamily family,
                           const ArcParams &params);

struct ArcVolume {
  double estimate = 0.0;  // hit fraction of uniform torus samples
  double ci_low = 0.0;    // 95% normal-approximation interval
  double ci_high = 0.0;
  double bound = 0.0;  // P^(volume exponent)
  double ratio = 0.0;  // estimate / bound
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
};

// Monte-Carlo volume of the family as a subset of the (r+1)-torus.  Sampling
// is chunked with per-chunk generators seeded by (seed, chunk), so results
// are independent of the worker count.  n_samples must be at least 10^4.
ArcVolume arc_volume_mc(const ParametricExpansion &exp, ArcFamily family, double P,
                        const ArcParams &params, std::uint64_t n_samples,
                        std::uint64_t seed, int workers = 1);

// Best rational approximation of the second kind: a reduced fraction a/q
// with 1 <= q <= q_max minimizing |q*alpha - a|; ties resolve to the
// smallest q.  Computed by walking the continued fraction of the exact
// binary value of alpha.
std::pair<long, long> rational_approx(double alpha, long q_max);

// The four pruning sequences.  Each walks one width parameter monotonically
// from a start value to an end value in steps small enough that every
// consecutive gap obeys the governing saving inequality.
//   eta_from_one:            eta runs 1 -> anchor.
//   theta_from_coupled_eta:  theta runs (l/k)*anchor -> target.
//   theta_from_one:          theta runs 1 -> anchor.
//   eta_from_coupled_theta:  eta runs (k/l)*anchor -> target.
enum class ScheduleKind {
  eta_from_one,
  theta_from_coupled_eta,
  theta_from_one,
  eta_from_coupled_theta,
};

struct ScheduleInput {
  int m = 2;
  int d = 2;
  std::int64_t r = 3;
  double k = 1.0;
  double l = 1.0;
  double anchor = 1.0;   // end value for *_from_one kinds; coupling seed otherwise
  double target = 0.0;   // end value for the coupled kinds; unused otherwise
};

// Strictly decreasing sequence with exact endpoints; throws InfeasibleError
// naming the violated feasibility inequality when no admissible step exists.
// Equal endpoints give a length-1 sequence.
std::vector<double> pruning_schedule(ScheduleKind kind, const ScheduleInput &in);

// One evaluated inequality at the extremal capacities.  `relation` is the
// comparison applied as  lhs <relation> rhs .  Rows that hold with equality
// by construction of the extremal capacities carry boundary = true and never
// enter a verdict.
struct HypothesisRow {
  std::string label;
  std::string relation;  // "<", "<=", or ">"
  QQ lhs, rhs;
  bool satisfied = false;
  bool boundary = false;
  int verdict_group = 0;  // 0 informational, 1 small-degree case, 2 large-degree case
};

struct HypothesisReport {
  long s = 0;
  int d = 0;
  int m = 0;
  long dim_sing = 0;
  std::int64_t r = 0;
  QQ k, l;                 // extremal capacities (s - dim_sing)/2^(d-1), s/2^(2m-1)
  QQ eta_star, theta_star;  // widest admissible width parameters
  bool excluded_case = false;  // d == 2m: no verdict is offered
  std::vector<HypothesisRow> rows;
  bool verdict_small_degree = false;  // conjunction of verdict_group == 1 rows
  bool verdict_large_degree = false;  // conjunction of verdict_group == 2 rows
  bool verdict = false;               // case-appropriate verdict; false when excluded
};

// Evaluates every inequality in exact rational arithmetic with
// k = (s - dim_sing)/2^(d-1) and l = s/2^(2m-1).
HypothesisReport hypothesis_check(long s, int d, int m, long dim_sing = 0);

// Smallest s whose verdict is satisfied (d == 2m is refused).
long min_satisfying_s(int d, int m, long dim_sing = 0);

struct WeylRow {
  long P = 0;
  double exponent = 0.0;          // ms - l*eta (2m > d)  or  ms - k*theta (d > 2m)
  std::uint64_t minor_points = 0;  // grid points outside the reference family
  double max_abs = 0.0;            // largest |T_P| over those points
  double max_ratio = 0.0;          // largest |T_P| / P^exponent
};

// Empirical decay table: for each P, the maximum of |T_P|/P^exponent over
// the grid points that fall outside the reference major family (M0 when
// 2m > d, Md when d > 2m).  Ratios are reported, never asserted against
// unknown constants.
std::vector<WeylRow> weyl_harness(const ParametricExpansion &exp,
                                  const std::vector<long> &P_list,
                                  const ArcParams &params,
                                  const std::vector<ArcPoint> &grid, int workers = 1,
                                  Budget *budget = nullptr);

// Exact count of integer tuples (h_1, ..., h_{2m-1}) in [-H, H]^{(2m-1)s}
// on which the determinant pairing degenerates: every coefficient
// d_form(h, n) of the final slot vanishes.  Work is (2H+1)^{(2m-1)s}
// evaluations, checked against the budget up front.
ZZ dn_zero_count(int m, int s, long H, int workers = 1, Budget *budget = nullptr);

}  // namespace circle

#endif
