#pragma once

// Independent oracles used only by tests. These deliberately avoid the
// production code paths: the energies come from the exact transcendental
// eigenvalue condition of the delta-plus-harmonic problem, the integrals from
// Romberg extrapolation, and the displacement elements from the associated
// Laguerre closed form.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace oracles {

// Romberg integration on [a,b] (independent of the production adaptive
// Simpson).
inline double romberg(const std::function<double(double)>& f, double a, double b,
                      int max_k = 22, double tol = 1e-14) {
  std::vector<std::vector<double>> r(1);
  double h = b - a;
  r[0].push_back(0.5 * h * (f(a) + f(b)));
  for (int k = 1; k < max_k; ++k) {
    h *= 0.5;
    double s = 0.0;
    const long n = 1L << (k - 1);
    for (long i = 0; i < n; ++i) s += f(a + (2 * i + 1) * h);
    std::vector<double> row;
    row.push_back(0.5 * r[k - 1][0] + h * s);
    for (int j = 1; j <= k; ++j) {
      const double p = std::pow(4.0, j);
      row.push_back((p * row[j - 1] - r[k - 1][j - 1]) / (p - 1.0));
    }
    if (k > 3 && std::abs(row[k] - r[k - 1][k - 1]) < tol) {
      r.push_back(row);
      return row[k];
    }
    r.push_back(row);
  }
  return r.back().back();
}

inline double g_integral_romberg(int n, double a) {
  if (a == 0.0) return 1.0;
  auto f = [n, a](double x) {
    return std::pow(1.0 + a * a * x * x, -n) * std::exp(-x * x);
  };
  return 2.0 * romberg(f, 0.0, 9.0) / std::sqrt(M_PI);
}

// Gamma-function ratio Gamma(x)/Gamma(y) via argument shifts into (1, 2].
// Works for negative non-integer arguments.
inline double gamma_ratio(double x, double y) {
  double num = 1.0, den = 1.0;
  while (x < 1.0) {
    num /= x;
    x += 1.0;
  }
  while (y < 1.0) {
    den /= y;
    y += 1.0;
  }
  return num / den * std::exp(std::lgamma(x) - std::lgamma(y));
}

// Exact even-parity eigenvalue of H/hw with coupling sqrt(pi) u' delta(r):
// root of -2 Gamma(3/4 - E/2)/Gamma(1/4 - E/2) = sqrt(pi) u' in
// (2n + 1/2, 2n + 3/2). Bisection; the left side is monotone on the window.
inline double exact_relative_level(double u_prime, int n) {
  const double target = std::sqrt(M_PI) * u_prime;
  auto lhs = [](double e) {
    return -2.0 * gamma_ratio(0.75 - 0.5 * e, 0.25 - 0.5 * e);
  };
  double lo = 2.0 * n + 0.5 + 1e-12, hi = 2.0 * n + 1.5 - 1e-12;
  if (u_prime == 0.0) return 2.0 * n + 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lhs(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// <m| D(beta) |n> = sqrt(n!/m!) beta^{m-n} e^{-|b|^2/2} L_n^{m-n}(|b|^2), m >= n.
inline std::complex<double> displacement_element(int m, int n, std::complex<double> beta) {
  // <m|D(b)|n> = conj(<n|D(-b)|m>) handles m < n.
  const bool swap = m < n;
  if (swap) {
    std::swap(m, n);
    beta = -beta;
  }
  const int d = m - n;
  const double b2 = std::norm(beta);
  // L_n^{d}(b2) by the stable three-term recurrence.
  double lk = 1.0, lkm1 = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double lnew = ((2.0 * k - 1.0 + d - b2) * lk - (k - 1.0 + d) * lkm1) / k;
    lkm1 = lk;
    lk = lnew;
  }
  const double lg = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0));
  std::complex<double> bp = 1.0;
  for (int i = 0; i < d; ++i) bp *= beta;
  const std::complex<double> v = std::exp(lg - 0.5 * b2) * bp * lk;
  return swap ? std::conj(v) : v;
}

}  // namespace oracles
