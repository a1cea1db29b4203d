#pragma once

#include <cstddef>
#include <string>

// Inner-loop kernels for the propagator. The state is kept in split
// real/imaginary form and every Hamiltonian term is a real symmetric matrix,
// so the hot operation is a real row-major GEMV accumulated into a complex
// vector. Scalar reference implementations and AVX2 variants are provided;
// the backend is picked once at startup from CPUID and can be forced with
// set_backend() or the SQO_KERNEL environment variable ("scalar", "avx2").

namespace sqo::kern {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
void set_backend(Backend b);
std::string backend_name();

// y += a * (M x), M row-major n x n.
void dgemv_acc(const double* M, int n, const double* x, double a, double* y);

// Same, for M banded with half-bandwidth bw (M(i,j) = 0 for |i-j| > bw).
void dgemv_band_acc(const double* M, int n, int bw, const double* x, double a,
                    double* y);

// y += a * x
void axpy(const double* x, double a, double* y, int n);

// Scalar reference implementations (always available, used as test oracles).
namespace scalar {
void dgemv_acc(const double* M, int n, const double* x, double a, double* y);
void dgemv_band_acc(const double* M, int n, int bw, const double* x, double a,
                    double* y);
void axpy(const double* x, double a, double* y, int n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void dgemv_acc(const double* M, int n, const double* x, double a, double* y);
void dgemv_band_acc(const double* M, int n, int bw, const double* x, double a,
                    double* y);
void axpy(const double* x, double a, double* y, int n);
bool supported();
}  // namespace avx2
#endif

}  // namespace sqo::kern
