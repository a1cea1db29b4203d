#include "sqo/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace sqo::kern::avx2 {

bool supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

void dgemv_acc(const double* M, int n, const double* x, double a, double* y) {
  int r = 0;
  // Two rows at a time for instruction-level parallelism.
  for (; r + 2 <= n; r += 2) {
    const double* row0 = M + static_cast<std::size_t>(r) * n;
    const double* row1 = row0 + n;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    int c = 0;
    for (; c + 4 <= n; c += 4) {
      __m256d xv = _mm256_loadu_pd(x + c);
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row0 + c), xv, acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row1 + c), xv, acc1);
    }
    double s0 = hsum(acc0), s1 = hsum(acc1);
    for (; c < n; ++c) {
      s0 += row0[c] * x[c];
      s1 += row1[c] * x[c];
    }
    y[r] += a * s0;
    y[r + 1] += a * s1;
  }
  for (; r < n; ++r) {
    const double* row = M + static_cast<std::size_t>(r) * n;
    __m256d acc = _mm256_setzero_pd();
    int c = 0;
    for (; c + 4 <= n; c += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc);
    double s = hsum(acc);
    for (; c < n; ++c) s += row[c] * x[c];
    y[r] += a * s;
  }
}

void dgemv_band_acc(const double* M, int n, int bw, const double* x, double a,
                    double* y) {
  int r = 0;
  for (; r + 2 <= n; r += 2) {
    const double* row0 = M + static_cast<std::size_t>(r) * n;
    const double* row1 = row0 + n;
    // shared window covering both rows' bands
    const int lo = r > bw ? r - bw : 0;
    const int hi = r + 1 + bw + 1 < n ? r + 1 + bw + 1 : n;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    int c = lo;
    for (; c + 4 <= hi; c += 4) {
      __m256d xv = _mm256_loadu_pd(x + c);
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row0 + c), xv, acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row1 + c), xv, acc1);
    }
    double s0 = hsum(acc0), s1 = hsum(acc1);
    for (; c < hi; ++c) {
      s0 += row0[c] * x[c];
      s1 += row1[c] * x[c];
    }
    y[r] += a * s0;
    y[r + 1] += a * s1;
  }
  for (; r < n; ++r) {
    const double* row = M + static_cast<std::size_t>(r) * n;
    const int lo = r > bw ? r - bw : 0;
    const int hi = r + bw + 1 < n ? r + bw + 1 : n;
    __m256d acc = _mm256_setzero_pd();
    int c = lo;
    for (; c + 4 <= hi; c += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc);
    double s = hsum(acc);
    for (; c < hi; ++c) s += row[c] * x[c];
    y[r] += a * s;
  }
}

void axpy(const double* x, double a, double* y, int n) {
  __m256d av = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace sqo::kern::avx2

#endif  // x86_64
