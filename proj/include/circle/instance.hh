#ifndef CIRCLE_INSTANCE_HH
#define CIRCLE_INSTANCE_HH

#include <cstdint>
#include <string>
#include <utility>

#include "circle/archimedean.hh"
#include "circle/forms.hh"

namespace circle {

// Everything a reproducible run needs.  k and l equal to zero mean "use the
// extremal growth weights for this shape" (filled in once the expansion is
// known); dim_sing is a user assertion about the form, never computed.
struct InstanceConfig {
  std::string form_text = "x1*x2";
  int s = 2;
  int m = 2;
  ZZ b = ZZ(0);     // target value of the tuple discriminant
  long P = 1;       // box radius for counting
  long qmax = 4;    // modulus cutoff for the truncated series
  double R = 0.25;  // dual-window halfwidth
  long prime = 2;   // default prime for per-prime reports
  int depth = 1;    // prime-power exponent cap
  double k = 0.0;
  double l = 0.0;
  double theta = 0.1;
  double eta = 0.1;
  long dim_sing = 0;
  std::uint64_t seed = 1;
  int workers = 1;
  std::uint64_t max_evals = 200000000;
  QuadratureSpec quad;  // seed / workers / max_evals are mirrored in on use
};

// Strict JSON round trip: unknown keys are rejected so typos cannot silently
// change a run; the integer b travels as a string to keep full precision.
InstanceConfig config_from_json(const std::string &text);
std::string config_to_json(const InstanceConfig &cfg);  // sorted keys

// FNV-1a hash of the canonical JSON form, printed as 16 hex digits.
std::string config_hash(const InstanceConfig &cfg);

// Growth weights actually in force: explicit positives pass through, zeros
// select the extremal weights for the shape ((s - dim_sing) and s scaled by
// the dyadic powers of the two box dimensions).
std::pair<double, double> effective_kl(const InstanceConfig &cfg, int d);

// Hypothesis table as a standalone JSON document (exact rationals travel as
// strings).
struct HypothesisReport;
std::string hypothesis_report_json(const HypothesisReport &rep);

// The headline report: exact count, transform cross-check, truncated
// main-term prediction, and the hypothesis table, as one JSON document.
// Per-component budget refusals are recorded in status fields and leave the
// rest of the report intact.  Byte-identical for identical configs.
std::string predict_report_json(const InstanceConfig &cfg);

// key;value flattening of the report (dotted paths, arrays indexed), for
// spreadsheet use; derived purely from the JSON text.
std::string report_csv_from_json(const std::string &report_json);

}  // namespace circle

#endif
