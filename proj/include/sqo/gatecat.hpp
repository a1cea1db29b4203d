#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "sqo/dynamics.hpp"

namespace sqo {

enum class GateKind { D, R, SR, S, CD, CR, CS };

GateKind gate_kind_from_string(const std::string& s);
std::string to_string(GateKind k);

// Family defaults (End Matter settings).
double default_u_prime(GateKind k);    // 0.86 for {D, CD}, 0.36 otherwise
int default_n_com(GateKind k);         // 48 for {D, CD, R, SR, CR}, 64 for {S, CS}
double default_dt_divisor(GateKind k); // measured for < 1e-10 norm drift
bool uses_five_beams(GateKind k);      // {D, CD}

struct GateRequest {
  GateKind kind = GateKind::D;
  double magnitude = 1.0;  // |alpha|, gamma, or |xi|
  double theta = 0.0;
  double phi = 0.0;
  std::optional<double> lambda;    // empty = optimize
  std::optional<double> duration;  // s; empty = from the parameter map
  std::optional<double> u_prime;   // empty = family default
  std::optional<double> initial_alpha;  // empty = 0 (|0>) or 1 for R-family
  bool corrections = true;
};

struct RunSettings {
  BeamGeometry geom;
  int n_rel_spectrum = 64;
  int n_rel_dyn = 4;
  std::optional<int> n_com;
  std::optional<double> dt_divisor;
  int k_sim = 14;
  bool strict = false;
  bool richardson = false;
  int threads = 1;
};

struct WaveformPlan {
  TrapLayout layout;
  DepthSchedule schedule;
};

// Waveforms, layout and depth schedule realizing the requested gate at the
// given modulation strength. delta_tone shifts the qubit-resonant drive
// frequency (SR correction); zero otherwise.
WaveformPlan plan_waveforms(const GateRequest& request, const RelativeSpectrum& spectrum,
                            const BeamGeometry& geom, double lambda,
                            double delta_tone = 0.0);

// Gate parameter per unit (omega_x T): alpha, gamma or xi including the
// e^{i theta} phase where applicable.
Complex parameter_rate(GateKind kind, double lambda, const BeamGeometry& geom,
                       const QubitCoefficients& coeffs, double theta);

// Invert the map: duration (s) for a requested |parameter|, or lambda given
// a duration. corrected_rate covers the R-gate second-order rate.
double duration_for_magnitude(GateKind kind, double lambda, double magnitude,
                              const BeamGeometry& geom, const QubitCoefficients& coeffs,
                              double rate_override = 0.0);
double lambda_for_duration(GateKind kind, double duration, double magnitude,
                           const BeamGeometry& geom, const QubitCoefficients& coeffs);

// Target unitary on the {up,dn} x Fock block (flat index n*2 + s).
Eigen::MatrixXcd target_unitary(GateKind kind, Complex parameter, double phi, int n_com,
                                const QubitCoefficients& coeffs);

// Frequency detunings (rad/s) implementing the second-order corrections.
// For R: Delta is the full a'a cancellation (the achieved rotation rate is
// -Delta) and delta twice the achieved sigma_z rate. For SR: Delta and delta
// cancel the a'a and sigma_z terms; delta also shifts the drive tone.
struct CorrectionSettings {
  double Delta = 0.0;  // rad/s
  double delta = 0.0;  // rad/s
  bool enabled = false;
};

CorrectionSettings correction_settings(GateKind kind, double lambda,
                                       const RelativeSpectrum& spectrum);

struct FidelityReport {
  double fidelity = 0.0;
  double infidelity = 1.0;
  double leakage = 0.0;
  double norm_error = 0.0;
  Complex achieved_parameter{0.0, 0.0};
  double lambda_used = 0.0;
  double duration_s = 0.0;
  Diagnostics diagnostics;
  std::string to_json() const;
};

FidelityReport run_gate(const GateRequest& request, const RunSettings& settings);

struct LambdaScan {
  double lambda_star = 0.0;
  double fidelity_star = 0.0;
  FidelityReport best;
  std::vector<std::pair<double, double>> curve;  // (lambda, fidelity), ascending
};

// Evaluates the grid (concurrently, deterministic ordering; ties break to the
// smaller lambda), optionally refining around the best point. Throws
// DepthError if every grid point is infeasible.
LambdaScan optimize_lambda(const GateRequest& request, const RunSettings& settings,
                           std::vector<double> grid, int refine_rounds = 0);

// Default grid: 24 log-spaced points per decade over [1e-3, feasibility limit].
std::vector<double> default_lambda_grid(const GateRequest& request,
                                        const RunSettings& settings);

// Largest feasible lambda for this gate (depth positivity).
double lambda_feasibility_limit(const GateRequest& request, const RunSettings& settings);

}  // namespace sqo
