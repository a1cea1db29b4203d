#include "sqo/kernels.hpp"

namespace sqo::kern::scalar {

void dgemv_acc(const double* M, int n, const double* x, double a, double* y) {
  for (int r = 0; r < n; ++r) {
    const double* row = M + static_cast<std::size_t>(r) * n;
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += row[c] * x[c];
    y[r] += a * s;
  }
}

void dgemv_band_acc(const double* M, int n, int bw, const double* x, double a,
                    double* y) {
  for (int r = 0; r < n; ++r) {
    const double* row = M + static_cast<std::size_t>(r) * n;
    const int lo = r > bw ? r - bw : 0;
    const int hi = r + bw + 1 < n ? r + bw + 1 : n;
    double s = 0.0;
    for (int c = lo; c < hi; ++c) s += row[c] * x[c];
    y[r] += a * s;
  }
}

void axpy(const double* x, double a, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace sqo::kern::scalar
