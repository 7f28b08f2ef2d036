#include "circle/matrix.hh"

#include <algorithm>

namespace circle {

static ZZ det_cofactor(const std::vector<ZZ> &a, int n) {
  if (n == 1) return a[0];
  if (n == 2) return a[0] * a[3] - a[1] * a[2];
  ZZ acc = 0;
  std::vector<ZZ> sub((n - 1) * (n - 1));
  for (int j = 0; j < n; ++j) {
    if (a[j] == 0) continue;
    for (int i = 1; i < n; ++i) {
      int t = 0;
      for (int jj = 0; jj < n; ++jj) {
        if (jj == j) continue;
        sub[(i - 1) * (n - 1) + t++] = a[i * n + jj];
      }
    }
    ZZ term = a[j] * det_cofactor(sub, n - 1);
    if (j & 1) acc -= term; else acc += term;
  }
  return acc;
}

// Bareiss: every division below is exact.
static ZZ det_bareiss(std::vector<ZZ> a, int n) {
  ZZ prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k * n + k] == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (a[i * n + k] != 0) { piv = i; break; }
      if (piv < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
      }
      a[i * n + k] = 0;
    }
    prev = a[k * n + k];
  }
  return sign > 0 ? a[(n - 1) * n + (n - 1)] : ZZ(-a[(n - 1) * n + (n - 1)]);
}

ZZ det_exact(std::vector<ZZ> a, int n) {
  if (n == 0) return 1;
  if (static_cast<int>(a.size()) != n * n) throw ShapeError("det_exact: matrix size mismatch");
  if (n <= 4) return det_cofactor(a, n);
  return det_bareiss(std::move(a), n);
}

int rank_exact(std::vector<ZZ> a, int rows, int cols) {
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int i = rank; i < rows; ++i)
      if (a[i * cols + col] != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != rank)
      for (int j = 0; j < cols; ++j) std::swap(a[rank * cols + j], a[piv * cols + j]);
    for (int i = rank + 1; i < rows; ++i) {
      if (a[i * cols + col] == 0) continue;
      ZZ pv = a[rank * cols + col], iv = a[i * cols + col];
      ZZ g = gcd(pv, iv);
      ZZ fp = pv / g, fi = iv / g;
      for (int j = col; j < cols; ++j)
        a[i * cols + j] = a[i * cols + j] * fp - a[rank * cols + j] * fi;
    }
    ++rank;
  }
  return rank;
}

ZZ gram_det(const TupleMatrix &x) {
  std::vector<ZZ> g(static_cast<size_t>(x.m) * x.m);
  for (int i = 0; i < x.m; ++i) {
    for (int j = i; j < x.m; ++j) {
      ZZ dot = 0;
      for (int n = 0; n < x.s; ++n) dot += x.at(n, i) * x.at(n, j);
      g[i * x.m + j] = dot;
      g[j * x.m + i] = dot;
    }
  }
  return det_exact(std::move(g), x.m);
}

int rank_of(const TupleMatrix &x) {
  // row-major s x m copy
  std::vector<ZZ> a(static_cast<size_t>(x.s) * x.m);
  for (int n = 0; n < x.s; ++n)
    for (int i = 0; i < x.m; ++i) a[n * x.m + i] = x.at(n, i);
  return rank_exact(std::move(a), x.s, x.m);
}

namespace {

// Working state for the Smith reduction of A (s x m, row-major) with the
// inverse of the accumulated row transform tracked column-wise: a row
// operation E applied to A multiplies uinv by E^{-1} on the right.
struct SmithWork {
  int s, m;
  std::vector<ZZ> a;     // s x m
  std::vector<ZZ> uinv;  // s x s, starts as identity
  ZZ &A(int i, int j) { return a[i * m + j]; }
  ZZ &U(int i, int j) { return uinv[i * s + j]; }

  void row_add(int i, int k, const ZZ &c) {  // r_i += c * r_k  =>  ucol_k -= c * ucol_i
    if (c == 0) return;
    for (int j = 0; j < m; ++j) A(i, j) += c * A(k, j);
    for (int n = 0; n < s; ++n) U(n, k) -= c * U(n, i);
  }
  void row_swap(int i, int k) {
    if (i == k) return;
    for (int j = 0; j < m; ++j) std::swap(A(i, j), A(k, j));
    for (int n = 0; n < s; ++n) std::swap(U(n, i), U(n, k));
  }
  void row_negate(int i) {
    for (int j = 0; j < m; ++j) A(i, j) = -A(i, j);
    for (int n = 0; n < s; ++n) U(n, i) = -U(n, i);
  }
  // Column operations touch only A (the right transform is not needed).
  void col_add(int j, int k, const ZZ &c) {
    if (c == 0) return;
    for (int i = 0; i < s; ++i) A(i, j) += c * A(i, k);
  }
  void col_swap(int j, int k) {
    if (j == k) return;
    for (int i = 0; i < s; ++i) std::swap(A(i, j), A(i, k));
  }
};

}  // namespace

SmithResult smith_saturation(const TupleMatrix &x) {
  SmithWork w;
  w.s = x.s;
  w.m = x.m;
  w.a.resize(static_cast<size_t>(x.s) * x.m);
  for (int n = 0; n < x.s; ++n)
    for (int i = 0; i < x.m; ++i) w.A(n, i) = x.at(n, i);
  w.uinv.assign(static_cast<size_t>(x.s) * x.s, ZZ(0));
  for (int n = 0; n < x.s; ++n) w.U(n, n) = 1;

  int lim = std::min(x.s, x.m);
  int t = 0;
  while (t < lim) {
    // locate a pivot of minimal absolute value in the trailing block
    int pi = -1, pj = -1;
    ZZ best = 0;
    for (int i = t; i < w.s; ++i) {
      for (int j = t; j < w.m; ++j) {
        if (w.A(i, j) == 0) continue;
        ZZ v = abs(w.A(i, j));
        if (pi < 0 || v < best) { best = v; pi = i; pj = j; }
      }
    }
    if (pi < 0) break;  // trailing block is zero
    w.row_swap(t, pi);
    w.col_swap(t, pj);

    for (;;) {
      bool clean = true;
      for (int i = t + 1; i < w.s; ++i) {
        if (w.A(i, t) == 0) continue;
        ZZ q = znearest(w.A(i, t), w.A(t, t));
        w.row_add(i, t, -q);
        if (w.A(i, t) != 0) { w.row_swap(i, t); clean = false; }
      }
      for (int j = t + 1; j < w.m; ++j) {
        if (w.A(t, j) == 0) continue;
        ZZ q = znearest(w.A(t, j), w.A(t, t));
        w.col_add(j, t, -q);
        if (w.A(t, j) != 0) { w.col_swap(j, t); clean = false; }
      }
      if (clean) break;
    }

    // divisibility: the pivot must divide the whole trailing block
    bool redo = false;
    for (int i = t + 1; i < w.s && !redo; ++i) {
      for (int j = t + 1; j < w.m && !redo; ++j) {
        if (w.A(i, j) % w.A(t, t) != 0) {
          w.row_add(t, i, ZZ(1));
          redo = true;
        }
      }
    }
    if (redo) continue;
    if (w.A(t, t) < 0) w.row_negate(t);
    ++t;
  }

  SmithResult out;
  for (int i = 0; i < t; ++i) out.divisors.push_back(w.A(i, i));
  out.sat_basis = TupleMatrix(x.s, t);
  for (int n = 0; n < x.s; ++n)
    for (int i = 0; i < t; ++i) out.sat_basis.at(n, i) = w.U(n, i);
  return out;
}

ZZ saturation_index(const TupleMatrix &x) {
  SmithResult sm = smith_saturation(x);
  if (static_cast<int>(sm.divisors.size()) != x.m)
    throw RankDeficientError("saturation_index: columns are rank-deficient");
  ZZ idx = 1;
  for (const ZZ &d : sm.divisors) idx *= d;
  return idx;
}

}  // namespace circle
