#ifndef CIRCLE_MATRIX_HH
#define CIRCLE_MATRIX_HH

#include <vector>

#include "circle/errors.hh"
#include "circle/numbers.hh"

namespace circle {

// s x m integer matrix; column i holds the i-th vector of the tuple.
// Storage is column-major, so e is also the flattened entry list in the
// variable order (i, n) -> i*s + n shared with the forms module.
struct TupleMatrix {
  int s = 0, m = 0;
  std::vector<ZZ> e;
  TupleMatrix() = default;
  TupleMatrix(int s_, int m_) : s(s_), m(m_), e(static_cast<size_t>(s_) * m_, ZZ(0)) {}
  ZZ &at(int n, int i) { return e[static_cast<size_t>(i) * s + n]; }
  const ZZ &at(int n, int i) const { return e[static_cast<size_t>(i) * s + n]; }
  std::vector<ZZ> col(int i) const {
    return std::vector<ZZ>(e.begin() + static_cast<size_t>(i) * s,
                           e.begin() + static_cast<size_t>(i + 1) * s);
  }
  bool operator==(const TupleMatrix &o) const { return s == o.s && m == o.m && e == o.e; }
};

// Exact determinant of an n x n matrix, row-major.  Cofactor expansion for
// n <= 4, fraction-free elimination above.
ZZ det_exact(std::vector<ZZ> a, int n);

// Rank over the rationals of a rows x cols matrix, row-major.
int rank_exact(std::vector<ZZ> a, int rows, int cols);

// det(X^t X); zero iff the columns are linearly dependent.
ZZ gram_det(const TupleMatrix &x);

int rank_of(const TupleMatrix &x);

// Smith normal form data for the column lattice L of X.  sat_basis spans
// the saturation (L tensor Q) intersect Z^s; divisors are the nonzero
// elementary divisors in divisibility order, so [sat(L) : L] is their product.
struct SmithResult {
  std::vector<ZZ> divisors;
  TupleMatrix sat_basis;
};
SmithResult smith_saturation(const TupleMatrix &x);

// Product of the elementary divisors.  Throws RankDeficientError unless the
// columns have full rank m.
ZZ saturation_index(const TupleMatrix &x);

}  // namespace circle

#endif
