#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "sqo/beamforge.hpp"
#include "sqo/geometry.hpp"
#include "sqo/relmode.hpp"

namespace sqo {

using Complex = std::complex<double>;

// (COM Fock) x (dressed relative) product basis; flat index = n*n_rel + i.
struct ProductBasis {
  int n_com = 48;
  int n_rel = 4;

  int dim() const { return n_com * n_rel; }
  int index(int n, int i) const { return n * n_rel + i; }
};

// One term of sum_i (x_i/x0)^k = 2^{1-k/2} sum_{even j<=k} C(k,j) R^{k-j} r^j.
struct SymPowerTerm {
  double weight;
  int com_power;
  int rel_power;  // even
};

std::vector<SymPowerTerm> expand_symmetric_power(int k);

// A Hermitian (real symmetric) operator on the product basis with an attached
// waveform. Matrix entries are in units of hbar*omega_x per unit waveform
// value, so H(t)/hw = matrix * waveform.value(t).
struct OperatorTerm {
  Eigen::MatrixXd matrix;
  Waveform waveform;
  std::string tag;
  int bandwidth = 0;  // half-bandwidth of the (banded) matrix
};

struct DriveAssembly {
  ProductBasis basis;
  double omega_x = 0.0;          // rad/s
  Eigen::VectorXd h0;            // diagonal reference energies, hw units
  Eigen::MatrixXd static_term;   // combined beyond-k_max static residual, hw units
  bool has_static = false;
  int static_bandwidth = 0;
  std::vector<OperatorTerm> drives;

  // Largest drive tone in units of omega_x (0 if all DC).
  double max_tone_ratio() const;
};

// Builds H0 + static residual + drive terms on the product basis. The depth
// schedule supplies base depths and per-order modulation responses; k_sim is
// the highest potential order carried.
DriveAssembly assemble(const TrapLayout& layout, const DepthSchedule& schedule,
                       const RelativeSpectrum& spectrum, const BeamGeometry& geom,
                       const ProductBasis& basis, int k_sim = 14);

struct MotionalState {
  ProductBasis basis;
  Eigen::VectorXcd amps;
  double time = 0.0;  // s
};

MotionalState make_up_vacuum(const ProductBasis& basis);
// |up> x |alpha>; throws BasisError if the coherent tail does not fit.
MotionalState make_up_coherent(const ProductBasis& basis, Complex alpha);

struct PropagatorConfig {
  double dt_divisor = 64;     // steps per fastest period
  double norm_tol = 1e-10;
  double cutoff_warn = 1e-6;
  bool strict = false;        // escalate cutoff warning to an error
  bool richardson = false;    // rerun at dt/2 and record overlap fidelity
};

struct Diagnostics {
  double norm_drift = 0.0;
  double cutoff_pop = 0.0;
  long steps = 0;
  double dt = 0.0;  // s
  int n_com = 0, n_rel = 0;
  bool cutoff_warning = false;
  double richardson_fidelity = -1.0;  // -1 = not checked
  std::string to_json() const;
};

// Integrates i hbar dpsi/dt = (H0 + H'(t)) psi for duration T (seconds) and
// returns the lab-frame state. Fourth-order fixed-step integrating-factor
// scheme: H0 phases are applied exactly, only H'(t) is stepped.
std::pair<MotionalState, Diagnostics> propagate(const MotionalState& initial,
                                                const DriveAssembly& assembly,
                                                double T, const PropagatorConfig& config);

// F = |<psi0| U^dag e^{+i H0 T/hbar} psi_lab>|^2. The target unitary acts on
// the {up,dn} x Fock block (flat index n*2 + s) and as identity on leakage.
double gate_fidelity(const MotionalState& final_lab, const Eigen::MatrixXcd& target_qubit_block,
                     const MotionalState& psi0, const DriveAssembly& assembly, double T);

struct Observables {
  double mean_n = 0.0;       // <a^dag a>
  double pop_up = 0.0;       // relative level 0
  double pop_dn = 0.0;       // relative level 1
  double leakage = 0.0;      // sum of relative levels >= 2
  double mean_R = 0.0;       // <(a+a^dag)/sqrt2>
  double mean_R2 = 0.0;
  Complex mean_a{0.0, 0.0};
  Complex mean_a2{0.0, 0.0};
};

Observables observables(const MotionalState& state);

// exp(G) for anti-Hermitian G via Hermitian eigendecomposition of iG.
Eigen::MatrixXcd expm_antihermitian(const Eigen::MatrixXcd& g);

}  // namespace sqo
