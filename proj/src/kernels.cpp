#include "sqo/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace sqo::kern {

namespace {

Backend detect() {
  const char* env = std::getenv("SQO_KERNEL");
  if (env) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (std::strcmp(env, "avx2") == 0 && avx2::supported()) return Backend::Avx2;
#endif
    return Backend::Scalar;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2::supported()) return Backend::Avx2;
#endif
  return Backend::Scalar;
}

Backend g_backend = detect();

}  // namespace

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::Avx2 && !avx2::supported()) b = Backend::Scalar;
#else
  b = Backend::Scalar;
#endif
  g_backend = b;
}

std::string backend_name() {
  return g_backend == Backend::Avx2 ? "avx2" : "scalar";
}

void dgemv_acc(const double* M, int n, const double* x, double a, double* y) {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_backend == Backend::Avx2) {
    avx2::dgemv_acc(M, n, x, a, y);
    return;
  }
#endif
  scalar::dgemv_acc(M, n, x, a, y);
}

void dgemv_band_acc(const double* M, int n, int bw, const double* x, double a,
                    double* y) {
  if (bw >= n - 1) {
    dgemv_acc(M, n, x, a, y);
    return;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (g_backend == Backend::Avx2) {
    avx2::dgemv_band_acc(M, n, bw, x, a, y);
    return;
  }
#endif
  scalar::dgemv_band_acc(M, n, bw, x, a, y);
}

void axpy(const double* x, double a, double* y, int n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_backend == Backend::Avx2) {
    avx2::axpy(x, a, y, n);
    return;
  }
#endif
  scalar::axpy(x, a, y, n);
}

}  // namespace sqo::kern
