#ifndef CIRCLE_ARCHIMEDEAN_HH
#define CIRCLE_ARCHIMEDEAN_HH

#include <functional>
#include <vector>

#include "circle/forms.hh"
#include "circle/util.hh"

namespace circle {

enum class QuadMethod { tensor_gauss, low_discrepancy_mc };

struct QuadratureSpec {
  QuadMethod method = QuadMethod::tensor_gauss;
  int points_per_axis = 0;         // 0 = auto-scaled to the oscillation
  uint64_t sample_count = 200000;  // low-discrepancy path
  double tolerance = 1e-6;
  uint64_t seed = 1;
  int workers = 1;
  // tensor grids whose refined level would exceed this point count fall back
  // to low-discrepancy sampling (auto mode) or refuse (explicit mode)
  uint64_t max_evals = 200000000;
};

struct Estimate {
  CC value{0.0, 0.0};
  double err = 0.0;
  bool converged = false;
};

// Shared quadrature engine: integrates fn over [-halfwidth, halfwidth]^dim.
// osc_hint estimates total phase turns across the box and drives the
// automatic tensor node count.  fn(point) returns (re, im).
Estimate integrate_cube(int dim, double halfwidth, double osc_hint,
                        const std::function<CC(const double *)> &fn,
                        const QuadratureSpec &spec);

// oscillation estimate max_c |beta_c| * max_box |form_c| for the standard
// phase integrand; beta holds the r coefficient entries then the
// discriminant coefficient last
double phase_oscillation(const ParametricExpansion &exp, const std::vector<double> &beta,
                         double halfwidth);

// integral over [-halfwidth, halfwidth]^{ms} of e(sum_j beta_j phi_j + beta0 disc)
Estimate box_integral(const ParametricExpansion &exp, const std::vector<double> &beta,
                      double halfwidth, const QuadratureSpec &spec);

// unit-box normalization of box_integral
Estimate v1(const ParametricExpansion &exp, const std::vector<double> &beta,
            const QuadratureSpec &spec);

struct ChiInfResult {
  double value = 0.0;
  double err = 0.0;
  bool converged = false;
  double imag_mag = 0.0;  // monitored imaginary part magnitude
  // (R', value at R') rows for R/4, R/2, R
  std::vector<std::pair<double, double>> trace;
};

// Truncated dual-window density: the integral of v1(beta) * e(-b beta0 / P^{2m})
// over [-R, R]^{r+1}.  The beta integral is carried out in closed form per
// sample point (it factors into one sinc kernel per coefficient form), which
// leaves a single ms-dimensional smooth integral; see chi_inf_nested for the
// direct nested evaluation used to cross-check this reduction.
ChiInfResult chi_inf_truncated(const ParametricExpansion &exp, const ZZ &b, long P, double R,
                               const QuadratureSpec &spec);

// Direct evaluation as an (r+1)-dimensional outer integral of v1; slow, meant
// for low-resolution cross-validation of chi_inf_truncated.
Estimate chi_inf_nested(const ParametricExpansion &exp, const ZZ &b, long P, double R,
                        const QuadratureSpec &outer, const QuadratureSpec &inner);

struct DecayRow {
  int direction = 0;  // index into the directions argument
  double t = 0.0;
  double abs_v1 = 0.0;
  double bound = 0.0;  // case-dependent min-of-powers envelope; NaN when d = 2m
  double ratio = 0.0;
  bool converged = false;
};

// |v1| along rays t * direction tabulated against the applicable decay
// envelope at prescribed exponent parameters k and l.
std::vector<DecayRow> v1_decay_harness(const ParametricExpansion &exp,
                                       const std::vector<std::vector<double>> &directions,
                                       const std::vector<double> &magnitudes, const QQ &k,
                                       const QQ &l, const QuadratureSpec &spec);

struct DensityEstimate {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  uint64_t hits = 0;
  uint64_t samples = 0;
};

// Monte-Carlo volume of the thickened solution slice
//   {xi in [-1,1]^{ms} : |phi_j(xi)| < eps for all j, |disc(xi) - b/P^{2m}| < eps}
// normalized by (2 eps)^{r+1}; independent positivity indicator for the
// archimedean density.
DensityEstimate real_density_mc(const ParametricExpansion &exp, const ZZ &b, long P, double eps,
                                uint64_t n_samples, uint64_t seed, int workers = 1);

}  // namespace circle

#endif
