#ifndef CIRCLE_UTIL_HH
#define CIRCLE_UTIL_HH

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "circle/errors.hh"

namespace circle {

extern const char *kVersion;      // library + CLI version
extern const int kSchemaVersion;  // report schema version

// ---- deterministic RNG ------------------------------------------------

// splitmix64 stream; cheap, seedable, and stable across platforms.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  // unbiased integer in [0, n)
  uint64_t below(uint64_t n) {
    uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do { v = next(); } while (v >= lim);
    return v % n;
  }
};

// Derive an independent stream for a subtask; mixing both inputs keeps
// streams distinct even for adjacent seeds/indices.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

// ---- compensated summation --------------------------------------------

struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double get() const { return s; }
  void merge(const Kahan &o) { add(o.s); add(-o.c); }
};

struct KahanC {
  Kahan re, im;
  void add(double r, double i) { re.add(r); im.add(i); }
  void merge(const KahanC &o) { re.merge(o.re); im.merge(o.im); }
};

// ---- evaluation budget -------------------------------------------------

struct Budget {
  uint64_t max_evals = UINT64_MAX;
  Budget() = default;
  explicit Budget(uint64_t m) : max_evals(m) {}
  void require(uint64_t needed) const {
    if (needed > max_evals) throw BudgetError(needed, max_evals);
  }
};

// ---- deterministic parallel map ----------------------------------------

// Runs body(chunk) for chunk in [0, nchunks) on `workers` threads.  Chunk
// boundaries are fixed by the caller, so any post-hoc combination done in
// chunk order gives results independent of the worker count.
void parallel_for_chunks(uint64_t nchunks, int workers,
                         const std::function<void(uint64_t)> &body);

// ---- quasirandom points ------------------------------------------------

// Van der Corput radical inverse of n in the given base.
double radical_inverse(uint64_t n, uint64_t base);

// Halton point (dim coordinates, distinct prime bases) with a seeded
// Cranley-Patterson rotation so different seeds give different nets.
std::vector<double> halton_point(uint64_t n, int dim, const std::vector<double> &shift);
void halton_fill(uint64_t n, int dim, const std::vector<double> &shift, double *out);
std::vector<double> halton_shift(int dim, uint64_t seed);

// ---- hashing and formatting ---------------------------------------------

uint64_t fnv1a(const std::string &bytes);
std::string hex64(uint64_t v);

// Shortest-round-trip decimal for doubles; used everywhere output must be
// byte-stable.
std::string fmt_double(double x);

}  // namespace circle

#endif
