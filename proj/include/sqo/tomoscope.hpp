#pragma once

#include <Eigen/Dense>
#include <array>

#include "sqo/dynamics.hpp"

namespace sqo {

// Motional state on (COM Fock) x (full relative Fock, even and odd) used by
// the measurement protocol; the contact interaction is neglected here, so the
// relative basis is harmonic. Flat index n*n_rel + m.
struct TwoModeState {
  int n_com = 0;
  int n_rel = 0;
  Eigen::VectorXcd amps;

  int index(int n, int m) const { return n * n_rel + m; }
};

TwoModeState two_mode_vacuum(int n_com, int n_rel);
TwoModeState two_mode_coherent(int n_com, int n_rel, Complex alpha);

// Rotate a gate-produced dressed state into the harmonic relative basis
// (u = 0 during the protocol) and embed into a full relative Fock space.
TwoModeState embed_for_tomography(const MotionalState& state,
                                  const RelativeSpectrum& spectrum, int n_rel_full);

// Internal spins in the |+->_1 (x) |+->_2 basis; branch order ++, +-, -+, --.
struct SpinMotionalState {
  int n_com = 0;
  int n_rel = 0;
  std::array<Eigen::VectorXcd, 4> branch;
};

// S_x rotation by theta on each atom followed by the identical per-atom
// spin-dependent displacement D_j(2 beta S_xj); realized through the
// COM/relative pair as D_R(+-sqrt2 beta), D_r(+-sqrt2 beta).
SpinMotionalState apply_protocol(const TwoModeState& psi, Complex beta, double theta);

// 4 <S_z1 S_z2> of the protocol output.
double joint_sz(const SpinMotionalState& state);

// Direct characteristic functions (oracle route): <psi| D_mode(beta') |psi>.
Complex direct_char_com(const TwoModeState& psi, Complex beta_prime);
Complex direct_char_rel(const TwoModeState& psi, Complex beta_prime);

struct CharGrid {
  int n = 0;          // points per side (odd, grid symmetric about 0)
  double extent = 0;  // beta' in [-extent, extent]^2
  Eigen::MatrixXcd chi_R;
  Eigen::MatrixXd chi_r;

  Complex point(int ix, int iy) const;
  std::string to_csv() const;  // beta_re, beta_im, chiR_re, chiR_im, chir
};

// Measurement-based reconstruction: four joint_sz settings per grid point
// (theta in {0, pi/4} and their pi/2-shifted partners).
CharGrid reconstruct(const TwoModeState& psi, int n_points, double extent);

struct WignerGrid {
  int n = 0;
  double extent = 0;
  Eigen::MatrixXd w;
  double integral = 0.0;
  double min_value = 0.0;
  bool aliasing_warning = false;

  std::string to_csv() const;
};

// W(gamma) = pi^{-2} Int chi(beta) e^{gamma beta* - gamma* beta} d^2 beta,
// discretized on the chi grid.
WignerGrid wigner_from_char(const CharGrid& chi, int n_out, double extent_out);

}  // namespace sqo
