#ifndef CIRCLE_LATTICE_HH
#define CIRCLE_LATTICE_HH

#include <functional>
#include <map>
#include <ostream>

#include "circle/forms.hh"
#include "circle/matrix.hh"
#include "circle/util.hh"

namespace circle {

// One box point where every coefficient form vanishes, classified by its
// discriminant, rank, and (at full rank) the saturation data.
struct SolutionRecord {
  TupleMatrix x;
  ZZ disc_value;
  int rank = 0;
  bool has_sat = false;  // true exactly when rank == m
  ZZ sat_index;          // defined only when has_sat
  bool primitive = false;
};

struct EnumOptions {
  bool has_filter = false;  // when true keep only disc_value == b
  ZZ b;
  int workers = 1;
  Budget *budget = nullptr;  // optional cap on box points visited
};

using SolutionSink = std::function<void(const SolutionRecord &)>;

// Every x with |entries| <= P and phi_j(x) = 0 for all j, in ascending
// lexicographic order of the flattened entries.  Branches are pruned at each
// column boundary using the forms supported on the fixed columns only, which
// never changes the emitted set.
void enumerate_solutions(const ParametricExpansion &exp, long P, const EnumOptions &opt,
                         const SolutionSink &sink);

ZZ count_Nm(const ParametricExpansion &exp, long P, int workers = 1, Budget *budget = nullptr);
ZZ count_Nm_b(const ParametricExpansion &exp, long P, const ZZ &b, int workers = 1,
              Budget *budget = nullptr);

// Solution counts keyed by realized discriminant value.
std::map<ZZ, ZZ> count_by_disc(const ParametricExpansion &exp, long P, int workers = 1,
                               Budget *budget = nullptr);

// CSV sink: entries(flattened);disc;rank;sat_index;primitive with the
// sat_index and primitive fields left empty below full rank.
void write_solutions_csv(std::ostream &os, const ParametricExpansion &exp, long P,
                         const EnumOptions &opt);

SolutionRecord classify_tuple(const ParametricExpansion &exp, TupleMatrix x);

}  // namespace circle

#endif
