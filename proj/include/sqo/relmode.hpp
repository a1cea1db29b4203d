#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

#include "sqo/geometry.hpp"

namespace sqo {

// Contact-interaction strength. u_prime = u / (hbar omega_x).
struct InteractionParams {
  double u_prime = 0.0;

  bool one_d_valid() const { return u_prime <= 1.0; }
  // u = a_s sqrt(2 hbar m wx wy wz / pi)
  static InteractionParams from_scattering(double a_s, const BeamGeometry& geom,
                                           double omega_y, double omega_z);
};

// Interaction matrix element between even harmonic states |2m>, |2n> per
// Eq-of-motion overlap: u (-1/2)^{m+n} sqrt(C(2m,m) C(2n,n)).
double interaction_matrix_element(int m, int n, double u);

// Dressed relative-mode spectrum from diagonalizing
// H/hw = (2n + 1/2) delta_mn + u' (-1/2)^{m+n} sqrt(C(2m,m) C(2n,n)).
struct RelativeSpectrum {
  double u_prime = 0.0;
  int n_rel = 0;                // basis size used
  Eigen::VectorXd energies;     // all n_rel dressed energies, hbar*omega_x units
  Eigen::MatrixXd vectors;      // column j = |2j~> over harmonic even states
  double doubling_drift = 0.0;  // |E0(n_rel) - E0(n_rel/2)|

  double omega_tilde() const { return energies(1) - energies(0); }        // qubit gap
  double omega_tilde_prime() const { return energies(2) - energies(1); }  // gap to |4~>
  double anharmonicity() const {
    return energies(2) - 2.0 * energies(1) + energies(0);
  }

  // Dressed matrix <i~| r^power |j~> for the lowest nkeep levels. Odd powers
  // vanish identically between even states and return a zero matrix.
  Eigen::MatrixXd power_elements(int power, int nkeep) const;

  std::string to_json() const;
};

// Diagonalize at basis size n_rel (>= 8). If convergence_tol is given, the
// doubling drift must come in under it; n_rel escalates by doubling up to 512
// before failing.
RelativeSpectrum diagonalize_relative(double u_prime, int n_rel = 64,
                                      std::optional<double> convergence_tol = {});

// Quadratic truncations of the perturbative eigenenergies (E0, E2, E4)/hw.
std::array<double, 3> perturbative_energies(double u_prime);

struct QubitCoefficients {
  double c1 = 0.0;   // (<up|r^2|up> - <dn|r^2|dn>)/2
  double c2 = 0.0;   // <up|r^2|dn>
  double c2p = 0.0;  // <2~|r^2|4~>
  double c3 = 0.0;   // <up|r^4|dn>
};

QubitCoefficients qubit_coefficients(const RelativeSpectrum& spec);

}  // namespace sqo
