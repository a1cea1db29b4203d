#pragma once

#include <cmath>

#include "sqo/errors.hpp"

namespace sqo {

inline constexpr double kHbar = 1.054571817e-34;  // J s
inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

// Geometry of the stroboscopic tweezer and the perturbative expansion scales.
// The trap unit V0 = (1/4) m wx^2 W^2 and the oscillator length x0 = eps_x * W
// are fixed by (W, omega_x, eps_x); the implied atomic mass follows from
// x0 = sqrt(hbar / (m omega_x)).
struct BeamGeometry {
  double waist = 700e-9;             // W, m
  double omega_x = 2 * M_PI * 140e3; // rad/s
  double eps_x = 0.041;              // x0 / W
  double eps_y = 0.018;              // y0 / W
  double eps_z = 0.014;              // z0 / z_R
  double trap_unit = 0.0;            // V0, J (derived unless supplied)

  BeamGeometry() { finalize(); }
  BeamGeometry(double w, double wx, double ex, double ey, double ez)
      : waist(w), omega_x(wx), eps_x(ex), eps_y(ey), eps_z(ez) {
    finalize();
  }

  void finalize() {
    if (waist <= 0 || omega_x <= 0)
      throw ConfigError("BeamGeometry: waist and omega_x must be positive");
    for (double e : {eps_x, eps_y, eps_z})
      if (e <= 0 || e >= 0.2)
        throw ConfigError("BeamGeometry: eps parameters must lie in (0, 0.2)");
    const double v0 = kHbar * omega_x / (4.0 * eps_x * eps_x);
    if (trap_unit == 0.0) {
      trap_unit = v0;
    } else if (std::abs(trap_unit - v0) > 1e-12 * v0) {
      throw ConfigError("BeamGeometry: trap_unit inconsistent with omega_x, W, eps_x");
    }
  }

  double x0() const { return eps_x * waist; }
  double mass() const { return kHbar / (x0() * x0() * omega_x); }
  // V0 in units of hbar*omega_x; equals 1/(4 eps_x^2).
  double v0_over_hw() const { return 1.0 / (4.0 * eps_x * eps_x); }
};

}  // namespace sqo
