#ifndef CIRCLE_NUMBERS_HH
#define CIRCLE_NUMBERS_HH

#include <gmpxx.h>
#include <complex>
#include <cstdint>

namespace circle {

typedef mpz_class ZZ;
typedef mpq_class QQ;
typedef std::complex<double> CC;

using std::int64_t;
using std::uint64_t;

// Round the fraction num/den to the nearest integer (half rounds up).
inline ZZ znearest(ZZ num, ZZ den) {
  if (den < 0) { num = -num; den = -den; }
  ZZ q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (2 * r >= den) ++q;
  return q;
}

inline double to_double(const ZZ &z) { return z.get_d(); }
inline double to_double(const QQ &q) { return q.get_d(); }

inline bool fits_i64(const ZZ &z) {
  return z >= ZZ(INT64_MIN) && z <= ZZ(INT64_MAX);
}

inline int64_t to_i64(const ZZ &z) {
  // valid only when fits_i64(z); callers check unless the value is a priori small
  if (z.fits_slong_p()) return z.get_si();
  // 64-bit long everywhere we build, but keep a safe fallback
  int64_t out = 0;
  ZZ t = z < 0 ? ZZ(-z) : z;
  int shift = 0;
  while (t != 0 && shift < 64) {
    out |= static_cast<int64_t>(mpz_get_ui(t.get_mpz_t()) & 1u) << shift;
    t >>= 1;
    ++shift;
  }
  return z < 0 ? -out : out;
}

}  // namespace circle

#endif
