#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sqo/geometry.hpp"

namespace sqo {

// g(n,a) = pi^{-1/2} Int (1+a^2 x^2)^{-n} e^{-x^2} dx, absolute error <= 1e-12.
double g_integral(int n, double a);

// Coefficient c_m(zeta, eps_y, eps_z) of the ground-state-averaged Gaussian
// beam: <0_y 0_z| f |0_y 0_z> = U * sum_m c_m eps_x^m xhat^m.
// Throws ConvergenceError if the series tail check fails (|zeta| too large
// for the default truncation).
double axial_coefficient(int m, double zeta, const BeamGeometry& geom);

// Stroboscopic beam positions and base depths (depths in units of V0).
struct TrapLayout {
  std::vector<double> positions;    // zeta_j
  std::vector<double> base_depths;  // U^(0)_j / V0 (may be empty before solving)
  bool symmetric = false;
  int k_max = 5;

  int j_max() const { return static_cast<int>(positions.size()); }
  void validate() const;

  static TrapLayout paper3();  // zeta = {-0.6775, 0, 0.6775}, symmetric
  static TrapLayout paper5();  // zeta = {-1.14, -0.56, 0.04, 0.38, 0.90}
};

// C with entries c_{k,j} = axial_coefficient(k, zeta_j), k = 1..k_max.
struct CoefficientMatrix {
  Eigen::MatrixXd c;  // k_max x j_max
  double condition_number = 0.0;
  std::vector<double> positions;

  // Requires a square, well-conditioned matrix; throws otherwise.
  Eigen::VectorXd solve(const Eigen::VectorXd& v_target) const;
  std::string to_csv() const;  // row = order k, column = beam j
};

CoefficientMatrix build_coeff_matrix(const TrapLayout& layout, const BeamGeometry& geom);

// One sinusoidal (or DC) modulation attached to a potential order.
struct Waveform {
  struct Tone {
    double omega = 0.0;  // rad/s (0 = DC)
    double phase = 0.0;
    double sign = 1.0;
    enum Kind { Sin, Cos } kind = Sin;
  };
  int order = 0;          // potential order k it drives
  double amplitude = 0.0; // in units of V0 (carries lambda and any prefactor)
  std::vector<Tone> tones;

  bool dc() const { return tones.size() == 1 && tones[0].omega == 0.0; }
  // Tone sum without the amplitude factor.
  double shape(double t) const;
  // amplitude * shape(t), in units of V0.
  double value(double t) const { return amplitude * shape(t); }
  double max_tone() const;
  // sum of |sign| over tones; bounds |shape|.
  double shape_bound() const;
};

// U_j(t)/V0 = base_j + sum_m response[m]_j * waveform[m].value(t).
struct DepthSchedule {
  std::vector<double> base;  // V0 units
  std::vector<std::vector<double>> responses;
  std::vector<Waveform> waveforms;

  std::vector<double> depths_at(double t) const;
  // Verifies U_j(t) >= 0 on a dense grid (samples_per_period per fastest
  // modulation period) over [0, duration]; throws DepthError naming the
  // first violating time.
  void validate_nonneg(double duration, int samples_per_period = 64) const;
  // Largest lambda scale factor keeping all depths nonnegative (analytic
  // bound from tone amplitudes).
  double feasible_scale() const;
};

// Symmetric 3-beam solve for controlled orders {2,4}. Targets in V0 units.
DepthSchedule solve_depths_symmetric(double v2_target, double v4_target,
                                     double zeta, const BeamGeometry& geom);

// General j_max = k_max solve U = C^{-1} V. Target in V0 units.
DepthSchedule solve_depths_general(const Eigen::VectorXd& v_target,
                                   const TrapLayout& layout, const BeamGeometry& geom);

struct PotentialValue {
  double value = 0.0;          // V0 units
  double tail_estimate = 0.0;  // magnitude of the last retained order
  bool tail_warning = false;   // tail_estimate > 1e-9 V0
};

// Series evaluation of the effective 1D potential at x' = x/W for the given
// static depths (V0 units), truncated at order K_sim.
PotentialValue effective_potential(double xprime, const TrapLayout& layout,
                                   const std::vector<double>& depths,
                                   const BeamGeometry& geom, int k_sim = 14);

// Direct 2D quadrature over the (y,z) ground state: the oracle mode.
double effective_potential_quadrature(double xprime, const TrapLayout& layout,
                                      const std::vector<double>& depths,
                                      const BeamGeometry& geom);

}  // namespace sqo
