#include "circle/util.hh"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <mutex>

namespace circle {

const char *kVersion = "0.1.0";
const int kSchemaVersion = 1;

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  // one splitmix round over each word, xored; avoids stream/seed collisions
  Rng a(seed ^ 0x6a09e667f3bcc908ull);
  Rng b(stream ^ 0xbb67ae8584caa73bull);
  return a.next() ^ (b.next() + 0x9e3779b97f4a7c15ull);
}

void parallel_for_chunks(uint64_t nchunks, int workers,
                         const std::function<void(uint64_t)> &body) {
  if (workers < 1) workers = 1;
  if (workers == 1 || nchunks <= 1) {
    for (uint64_t c = 0; c < nchunks; ++c) body(c);
    return;
  }
  std::atomic<uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr err;
  std::mutex err_mu;
  auto run = [&]() {
    for (;;) {
      uint64_t c = next.fetch_add(1);
      if (c >= nchunks || failed.load()) return;
      try {
        body(c);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!failed.exchange(true)) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int nt = static_cast<int>(std::min<uint64_t>(workers, nchunks));
  pool.reserve(nt);
  for (int i = 0; i < nt; ++i) pool.emplace_back(run);
  for (auto &t : pool) t.join();
  if (failed.load() && err) std::rethrow_exception(err);
}

double radical_inverse(uint64_t n, uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv, out = 0.0;
  while (n > 0) {
    out += static_cast<double>(n % base) * f;
    n /= base;
    f *= inv;
  }
  return out;
}

static const uint64_t kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                   31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

std::vector<double> halton_shift(int dim, uint64_t seed) {
  Rng rng(mix_seed(seed, 0x48414c54ull));  // "HALT"
  std::vector<double> shift(dim);
  for (int i = 0; i < dim; ++i) shift[i] = rng.uniform01();
  return shift;
}

void halton_fill(uint64_t n, int dim, const std::vector<double> &shift, double *out) {
  if (dim > static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0])))
    throw ShapeError("halton dimension too large");
  for (int i = 0; i < dim; ++i) {
    double v = radical_inverse(n + 1, kPrimes[i]) + shift[i];
    out[i] = v - std::floor(v);
  }
}

std::vector<double> halton_point(uint64_t n, int dim, const std::vector<double> &shift) {
  std::vector<double> p(dim);
  halton_fill(n, dim, shift, p.data());
  return p;
}

uint64_t fnv1a(const std::string &bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt_double(double x) {
  if (x == 0.0) x = 0.0;  // normalize -0
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace circle
