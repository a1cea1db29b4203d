#include "sqo/relmode.hpp"

#include <cmath>
#include <sstream>

#include "sqo/errors.hpp"

namespace sqo {

namespace {

// ln C(2n, n)
double log_central_binom(int n) {
  return std::lgamma(2.0 * n + 1.0) - 2.0 * std::lgamma(n + 1.0);
}

Eigen::MatrixXd relative_hamiltonian(double u_prime, int n) {
  Eigen::MatrixXd h(n, n);
  std::vector<double> lc(n);
  for (int i = 0; i < n; ++i) lc[i] = log_central_binom(i);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double mag = std::exp(0.5 * (lc[i] + lc[j]) - (i + j) * std::log(2.0));
      const double v = u_prime * (((i + j) % 2) ? -mag : mag);
      h(i, j) = v;
      h(j, i) = v;
    }
  for (int i = 0; i < n; ++i) h(i, i) += 2.0 * i + 0.5;
  return h;
}

double ground_energy(double u_prime, int n) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(relative_hamiltonian(u_prime, n),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// r^2 on the even (pair-index) basis, size n: tridiagonal.
Eigen::MatrixXd r2_harmonic(int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = (4.0 * i + 1.0) / 2.0;
    if (i + 1 < n) {
      const double v = std::sqrt((2.0 * i + 1.0) * (2.0 * i + 2.0)) / 2.0;
      m(i, i + 1) = v;
      m(i + 1, i) = v;
    }
  }
  return m;
}

}  // namespace

InteractionParams InteractionParams::from_scattering(double a_s, const BeamGeometry& geom,
                                                     double omega_y, double omega_z) {
  const double u = a_s * std::sqrt(2.0 * kHbar * geom.mass() * geom.omega_x *
                                   omega_y * omega_z / M_PI);
  InteractionParams p;
  p.u_prime = u / (kHbar * geom.omega_x);
  if (p.u_prime < 0) throw ConfigError("InteractionParams: negative u");
  return p;
}

double interaction_matrix_element(int m, int n, double u) {
  if (m < 0 || n < 0) throw ConfigError("interaction_matrix_element: m, n >= 0");
  const double mag =
      std::exp(0.5 * (log_central_binom(m) + log_central_binom(n)) -
               (m + n) * std::log(2.0));
  return u * (((m + n) % 2) ? -mag : mag);
}

RelativeSpectrum diagonalize_relative(double u_prime, int n_rel,
                                      std::optional<double> convergence_tol) {
  if (u_prime < 0) throw ConfigError("diagonalize_relative: u' must be >= 0");
  if (n_rel < 8) throw ConfigError("diagonalize_relative: n_rel must be >= 8");

  int n = n_rel;
  for (;;) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(relative_hamiltonian(u_prime, n));
    RelativeSpectrum spec;
    spec.u_prime = u_prime;
    spec.n_rel = n;
    spec.energies = es.eigenvalues();
    spec.vectors = es.eigenvectors();
    // Sign convention: dominant harmonic component positive, so the dressed
    // matrix elements (c2 etc.) come out positive near the harmonic limit.
    for (int j = 0; j < n; ++j) {
      int imax = 0;
      spec.vectors.col(j).cwiseAbs().maxCoeff(&imax);
      if (spec.vectors(imax, j) < 0) spec.vectors.col(j) *= -1.0;
    }
    spec.doubling_drift = std::abs(spec.energies(0) - ground_energy(u_prime, n / 2));
    if (!convergence_tol || spec.doubling_drift < *convergence_tol) return spec;
    if (n >= 512)
      throw ConvergenceError(
          "diagonalize_relative: ground energy drift " +
          std::to_string(spec.doubling_drift) + " above tolerance at n_rel=512");
    n *= 2;
  }
}

std::array<double, 3> perturbative_energies(double u_prime) {
  const double u2 = u_prime * u_prime;
  const double ln2 = std::log(2.0);
  return {0.5 + u_prime - ln2 * u2,
          2.5 + 0.5 * u_prime + (1.0 - 2.0 * ln2) / 8.0 * u2,
          4.5 + 0.375 * u_prime + (21.0 - 36.0 * ln2) / 256.0 * u2};
}

Eigen::MatrixXd RelativeSpectrum::power_elements(int power, int nkeep) const {
  if (power < 0) throw ConfigError("power_elements: power >= 0");
  if (nkeep > n_rel) throw ConfigError("power_elements: nkeep > n_rel");
  if (power == 0) return Eigen::MatrixXd::Identity(nkeep, nkeep);
  if (power % 2) return Eigen::MatrixXd::Zero(nkeep, nkeep);  // parity

  // (r^2)^{power/2} on a padded even basis, truncated back to n_rel, then
  // rotated into the dressed basis. Padding keeps the truncated block exact.
  const int q = power / 2;
  const int npad = n_rel + q;
  Eigen::MatrixXd p = r2_harmonic(npad);
  Eigen::MatrixXd acc = p;
  for (int i = 1; i < q; ++i) acc = acc * p;
  const Eigen::MatrixXd block = acc.topLeftCorner(n_rel, n_rel);
  const Eigen::MatrixXd dressed =
      vectors.leftCols(nkeep).transpose() * block * vectors.leftCols(nkeep);
  return dressed;
}

QubitCoefficients qubit_coefficients(const RelativeSpectrum& spec) {
  const Eigen::MatrixXd r2 = spec.power_elements(2, 3);
  const Eigen::MatrixXd r4 = spec.power_elements(4, 3);
  QubitCoefficients c;
  c.c1 = 0.5 * (r2(0, 0) - r2(1, 1));
  c.c2 = r2(0, 1);
  c.c2p = r2(1, 2);
  c.c3 = r4(0, 1);
  return c;
}

std::string RelativeSpectrum::to_json() const {
  const auto c = qubit_coefficients(*this);
  std::ostringstream os;
  os.precision(17);
  os << "{\"u_prime\":" << u_prime << ",\"energies\":[";
  const int nshow = std::min<int>(8, static_cast<int>(energies.size()));
  for (int i = 0; i < nshow; ++i) {
    if (i) os << ",";
    os << energies(i);
  }
  os << "],\"anharmonicity\":" << anharmonicity()
     << ",\"omega_tilde_over_omega_x\":" << omega_tilde()
     << ",\"coefficients\":{\"c1\":" << c.c1 << ",\"c2\":" << c.c2
     << ",\"c2p\":" << c.c2p << ",\"c3\":" << c.c3 << "}}";
  return os.str();
}

}  // namespace sqo
