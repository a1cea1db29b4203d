#include "sqo/tomoscope.hpp"

#include <cmath>
#include <sstream>

#include "sqo/errors.hpp"

namespace sqo {

namespace {

Eigen::MatrixXcd displacement(int n, Complex beta) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) a(k, k + 1) = std::sqrt(k + 1.0);
  return expm_antihermitian(beta * a.adjoint() - std::conj(beta) * a);
}

// Apply an operator on one factor of the two-mode state.
Eigen::VectorXcd apply_com(const Eigen::MatrixXcd& op, const TwoModeState& s) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.amps.size());
  for (int n1 = 0; n1 < s.n_com; ++n1)
    for (int n2 = 0; n2 < s.n_com; ++n2) {
      if (op(n1, n2) == Complex(0, 0)) continue;
      for (int m = 0; m < s.n_rel; ++m)
        out(s.index(n1, m)) += op(n1, n2) * s.amps(s.index(n2, m));
    }
  return out;
}

Eigen::VectorXcd apply_rel(const Eigen::MatrixXcd& op, const TwoModeState& s) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.amps.size());
  for (int n = 0; n < s.n_com; ++n)
    for (int m1 = 0; m1 < s.n_rel; ++m1)
      for (int m2 = 0; m2 < s.n_rel; ++m2)
        out(s.index(n, m1)) += op(m1, m2) * s.amps(s.index(n, m2));
  return out;
}

void check_cutoff(const Eigen::VectorXcd& amps, const TwoModeState& ref) {
  double top = 0.0;
  for (int m = 0; m < ref.n_rel; ++m)
    top += std::norm(amps(ref.index(ref.n_com - 1, m))) +
           std::norm(amps(ref.index(ref.n_com - 2, m)));
  for (int n = 0; n < ref.n_com; ++n)
    top += std::norm(amps(ref.index(n, ref.n_rel - 1))) +
           std::norm(amps(ref.index(n, ref.n_rel - 2)));
  if (top > 1e-8)
    throw BasisError("apply_protocol: displacement reaches the Fock cutoff");
}

}  // namespace

TwoModeState two_mode_vacuum(int n_com, int n_rel) {
  TwoModeState s;
  s.n_com = n_com;
  s.n_rel = n_rel;
  s.amps = Eigen::VectorXcd::Zero(n_com * n_rel);
  s.amps(0) = 1.0;
  return s;
}

TwoModeState two_mode_coherent(int n_com, int n_rel, Complex alpha) {
  TwoModeState s = two_mode_vacuum(n_com, n_rel);
  s.amps(0) = 0.0;
  Complex amp = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < n_com; ++n) {
    s.amps(s.index(n, 0)) = amp;
    amp *= alpha / std::sqrt(n + 1.0);
  }
  if (std::norm(s.amps(s.index(n_com - 1, 0))) > 1e-10)
    throw BasisError("two_mode_coherent: coherent state does not fit");
  s.amps.normalize();
  return s;
}

TwoModeState embed_for_tomography(const MotionalState& state,
                                  const RelativeSpectrum& spectrum, int n_rel_full) {
  const ProductBasis& b = state.basis;
  TwoModeState out;
  out.n_com = b.n_com;
  out.n_rel = n_rel_full;
  out.amps = Eigen::VectorXcd::Zero(out.n_com * n_rel_full);
  // Dressed level i -> even harmonic components vectors(m, i), Fock index 2m.
  for (int n = 0; n < b.n_com; ++n)
    for (int i = 0; i < b.n_rel; ++i) {
      const Complex c = state.amps(b.index(n, i));
      if (c == Complex(0, 0)) continue;
      for (int m = 0; 2 * m < n_rel_full && m < spectrum.n_rel; ++m)
        out.amps(out.index(n, 2 * m)) += c * spectrum.vectors(m, i);
    }
  // The dressed-state tail beyond the embedded pairs carries O(u'^2 / n_rel)
  // weight; renormalize so chi(0) = 1 holds exactly for the protocol.
  out.amps.normalize();
  return out;
}

SpinMotionalState apply_protocol(const TwoModeState& psi, Complex beta, double theta) {
  const Complex s2b = std::sqrt(2.0) * beta;
  const Eigen::MatrixXcd dR = displacement(psi.n_com, s2b);
  const Eigen::MatrixXcd dr = displacement(psi.n_rel, s2b);

  SpinMotionalState out;
  out.n_com = psi.n_com;
  out.n_rel = psi.n_rel;
  const Complex half(0.5, 0.0);
  out.branch[0] = half * std::polar(1.0, -theta) * apply_com(dR, psi);            // ++
  out.branch[3] = half * std::polar(1.0, +theta) * apply_com(dR.adjoint(), psi);  // --
  out.branch[1] = half * apply_rel(dr, psi);                                      // +-
  out.branch[2] = half * apply_rel(dr.adjoint(), psi);                            // -+
  check_cutoff(out.branch[0], psi);
  check_cutoff(out.branch[1], psi);
  return out;
}

double joint_sz(const SpinMotionalState& state) {
  // In the |+-> basis S_z flips the spin, so 4 S_z1 S_z2 swaps ++ <-> -- and
  // +- <-> -+.
  const Complex a = state.branch[0].adjoint() * state.branch[3];
  const Complex b = state.branch[1].adjoint() * state.branch[2];
  return 2.0 * (a.real() + b.real());
}

Complex direct_char_com(const TwoModeState& psi, Complex beta_prime) {
  const Eigen::MatrixXcd d = displacement(psi.n_com, beta_prime);
  const Complex v = psi.amps.adjoint() * apply_com(d, psi);
  return v;
}

Complex direct_char_rel(const TwoModeState& psi, Complex beta_prime) {
  const Eigen::MatrixXcd d = displacement(psi.n_rel, beta_prime);
  const Complex v = psi.amps.adjoint() * apply_rel(d, psi);
  return v;
}

Complex CharGrid::point(int ix, int iy) const {
  const double h = 2.0 * extent / (n - 1);
  return Complex(-extent + ix * h, -extent + iy * h);
}

CharGrid reconstruct(const TwoModeState& psi, int n_points, double extent) {
  if (n_points < 3 || n_points % 2 == 0)
    throw ConfigError("reconstruct: grid must be odd-sized and symmetric about 0");
  CharGrid grid;
  grid.n = n_points;
  grid.extent = extent;
  grid.chi_R.resize(n_points, n_points);
  grid.chi_r.resize(n_points, n_points);
  for (int ix = 0; ix < n_points; ++ix)
    for (int iy = 0; iy < n_points; ++iy) {
      const Complex bp = grid.point(ix, iy);
      const Complex beta = bp / (2.0 * std::sqrt(2.0));
      const double m0 = joint_sz(apply_protocol(psi, beta, 0.0));
      const double m1 = joint_sz(apply_protocol(psi, beta, M_PI / 4.0));
      const double m2 = joint_sz(apply_protocol(psi, beta, M_PI / 2.0));
      const double m3 = joint_sz(apply_protocol(psi, beta, 3.0 * M_PI / 4.0));
      grid.chi_R(ix, iy) = Complex(m0 - m2, m1 - m3);
      grid.chi_r(ix, iy) = m0 + m2;
    }
  return grid;
}

std::string CharGrid::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "beta_re,beta_im,chiR_re,chiR_im,chir\n";
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) {
      const Complex bp = point(ix, iy);
      os << bp.real() << "," << bp.imag() << "," << chi_R(ix, iy).real() << ","
         << chi_R(ix, iy).imag() << "," << chi_r(ix, iy) << "\n";
    }
  return os.str();
}

WignerGrid wigner_from_char(const CharGrid& chi, int n_out, double extent_out) {
  WignerGrid w;
  w.n = n_out;
  w.extent = extent_out;
  w.w.resize(n_out, n_out);
  const double h = 2.0 * chi.extent / (chi.n - 1);
  const double cell = h * h / (M_PI * M_PI);

  // Energy remaining at the grid edge signals truncation of the transform.
  double boundary_energy = 0.0;
  for (int i = 0; i < chi.n; ++i) {
    boundary_energy = std::max(
        {boundary_energy, std::norm(chi.chi_R(i, 0)), std::norm(chi.chi_R(i, chi.n - 1)),
         std::norm(chi.chi_R(0, i)), std::norm(chi.chi_R(chi.n - 1, i))});
  }
  w.aliasing_warning = boundary_energy > 1e-4;

  w.min_value = std::numeric_limits<double>::infinity();
  double imag_max = 0.0;
  for (int gx = 0; gx < n_out; ++gx)
    for (int gy = 0; gy < n_out; ++gy) {
      const double u = -extent_out + gx * 2.0 * extent_out / (n_out - 1);
      const double v = -extent_out + gy * 2.0 * extent_out / (n_out - 1);
      Complex acc(0, 0);
      for (int ix = 0; ix < chi.n; ++ix)
        for (int iy = 0; iy < chi.n; ++iy) {
          const Complex bp = chi.point(ix, iy);
          // gamma beta* - gamma* beta = 2i (v*bx - u*by)
          const double arg = 2.0 * (v * bp.real() - u * bp.imag());
          acc += chi.chi_R(ix, iy) * Complex(std::cos(arg), std::sin(arg));
        }
      acc *= cell;
      imag_max = std::max(imag_max, std::abs(acc.imag()));
      w.w(gx, gy) = acc.real();
      w.min_value = std::min(w.min_value, acc.real());
    }
  if (imag_max > 1e-8)
    throw ConvergenceError("wigner_from_char: imaginary residual above 1e-8");

  const double hg = 2.0 * extent_out / (n_out - 1);
  w.integral = w.w.sum() * hg * hg;
  return w;
}

std::string WignerGrid::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "gamma_re,gamma_im,w\n";
  for (int gx = 0; gx < n; ++gx)
    for (int gy = 0; gy < n; ++gy) {
      const double u = -extent + gx * 2.0 * extent / (n - 1);
      const double v = -extent + gy * 2.0 * extent / (n - 1);
      os << u << "," << v << "," << w(gx, gy) << "\n";
    }
  return os.str();
}

}  // namespace sqo
