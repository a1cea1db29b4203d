#include "sqo/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "sqo/errors.hpp"
#include "sqo/kernels.hpp"

namespace sqo {

namespace {

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

// R^p on the COM Fock basis, computed on a padded basis so the retained
// block carries the exact infinite-basis elements.
std::vector<Eigen::MatrixXd> com_power_matrices(int n_com, int k_sim) {
  const int npad = n_com + k_sim + 1;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(npad, npad);
  for (int n = 0; n + 1 < npad; ++n) {
    const double v = std::sqrt((n + 1.0) / 2.0);  // <n|R|n+1>, R=(a+a')/sqrt2
    r(n, n + 1) = v;
    r(n + 1, n) = v;
  }
  std::vector<Eigen::MatrixXd> out(k_sim + 1);
  out[0] = Eigen::MatrixXd::Identity(n_com, n_com);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(npad, npad);
  for (int p = 1; p <= k_sim; ++p) {
    acc = acc * r;
    out[p] = acc.topLeftCorner(n_com, n_com);
  }
  return out;
}

void check_symmetric(const Eigen::MatrixXd& m, const std::string& tag) {
  const double defect = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (defect > 1e-13)
    throw ConfigError("assemble: non-Hermitian term " + tag);
}

int half_bandwidth(const Eigen::MatrixXd& m) {
  int bw = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) bw = std::max(bw, std::abs(i - j));
  return bw;
}

struct Workspace {
  int dim;
  std::vector<double> cos_t, sin_t, u_re, u_im, v_re, v_im;
  explicit Workspace(int d)
      : dim(d), cos_t(d), sin_t(d), u_re(d), u_im(d), v_re(d), v_im(d) {}
};

struct SplitState {
  std::vector<double> re, im;
  explicit SplitState(int d) : re(d, 0.0), im(d, 0.0) {}
};

}  // namespace

std::vector<SymPowerTerm> expand_symmetric_power(int k) {
  if (k < 1) throw ConfigError("expand_symmetric_power: k >= 1");
  std::vector<SymPowerTerm> terms;
  const double pref = std::pow(2.0, 1.0 - 0.5 * k);
  for (int j = 0; j <= k; j += 2)
    terms.push_back({pref * binom(k, j), k - j, j});
  return terms;
}

double DriveAssembly::max_tone_ratio() const {
  double m = 0.0;
  for (const auto& d : drives) m = std::max(m, d.waveform.max_tone() / omega_x);
  return m;
}

DriveAssembly assemble(const TrapLayout& layout, const DepthSchedule& schedule,
                       const RelativeSpectrum& spectrum, const BeamGeometry& geom,
                       const ProductBasis& basis, int k_sim) {
  layout.validate();
  if (basis.n_com < k_sim + 1)
    throw BasisError("assemble: n_com too small for requested operator powers");
  if (basis.n_rel > spectrum.n_rel)
    throw ConfigError("assemble: basis retains more relative levels than the spectrum");

  DriveAssembly a;
  a.basis = basis;
  a.omega_x = geom.omega_x;

  // Reference diagonal: hw*n + E_i.
  a.h0.resize(basis.dim());
  for (int n = 0; n < basis.n_com; ++n)
    for (int i = 0; i < basis.n_rel; ++i)
      a.h0(basis.index(n, i)) = n + spectrum.energies(i);

  const auto com_pows = com_power_matrices(basis.n_com, k_sim);
  std::vector<Eigen::MatrixXd> rel_pows(k_sim + 1);
  for (int j = 0; j <= k_sim; j += 2) rel_pows[j] = spectrum.power_elements(j, basis.n_rel);

  // c_k(zeta_j) for all carried orders.
  const int j_max = layout.j_max();
  Eigen::MatrixXd ck(k_sim + 1, j_max);
  for (int k = 1; k <= k_sim; ++k)
    for (int j = 0; j < j_max; ++j)
      ck(k, j) = axial_coefficient(k, layout.positions[j], geom);

  auto sym_power_op = [&](int k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis.dim(), basis.dim());
    for (const auto& term : expand_symmetric_power(k)) {
      const Eigen::MatrixXd& cp = com_pows[term.com_power];
      const Eigen::MatrixXd& rp = rel_pows[term.rel_power];
      for (int n1 = 0; n1 < basis.n_com; ++n1)
        for (int n2 = 0; n2 < basis.n_com; ++n2) {
          if (cp(n1, n2) == 0.0) continue;
          const double w = term.weight * cp(n1, n2);
          for (int i1 = 0; i1 < basis.n_rel; ++i1)
            for (int i2 = 0; i2 < basis.n_rel; ++i2)
              m(basis.index(n1, i1), basis.index(n2, i2)) += w * rp(i1, i2);
        }
    }
    return m;
  };

  const double v0 = geom.v0_over_hw();
  const double ex = geom.eps_x;

  // Static residual: uncontrolled orders of the base potential.
  a.static_term = Eigen::MatrixXd::Zero(basis.dim(), basis.dim());
  for (int k = layout.k_max + 1; k <= k_sim; ++k) {
    double amp = 0.0;
    for (int j = 0; j < j_max; ++j) amp += schedule.base[j] * ck(k, j);
    a.static_term += amp * v0 * std::pow(ex, k) * sym_power_op(k);
    a.has_static = true;
  }
  if (a.has_static) {
    check_symmetric(a.static_term, "static residual");
    a.static_bandwidth = half_bandwidth(a.static_term);
  }

  // One drive term per scheduled waveform: controlled order plus the
  // beyond-k_max orders its depth modulation drags along.
  for (std::size_t m = 0; m < schedule.waveforms.size(); ++m) {
    const Waveform& wf = schedule.waveforms[m];
    OperatorTerm term;
    term.waveform = wf;
    term.matrix = v0 * std::pow(ex, wf.order) * sym_power_op(wf.order);
    for (int k = layout.k_max + 1; k <= k_sim; ++k) {
      double rho = 0.0;
      for (int j = 0; j < j_max; ++j) rho += schedule.responses[m][j] * ck(k, j);
      term.matrix += rho * v0 * std::pow(ex, k) * sym_power_op(k);
    }
    std::ostringstream tag;
    tag << "order-" << wf.order << " drive";
    term.tag = tag.str();
    check_symmetric(term.matrix, term.tag);
    term.bandwidth = half_bandwidth(term.matrix);
    a.drives.push_back(std::move(term));
  }
  return a;
}

MotionalState make_up_vacuum(const ProductBasis& basis) {
  MotionalState s;
  s.basis = basis;
  s.amps = Eigen::VectorXcd::Zero(basis.dim());
  s.amps(basis.index(0, 0)) = 1.0;
  return s;
}

MotionalState make_up_coherent(const ProductBasis& basis, Complex alpha) {
  MotionalState s;
  s.basis = basis;
  s.amps = Eigen::VectorXcd::Zero(basis.dim());
  // ln-scaled recursion keeps amplitudes stable for large |alpha|.
  Complex amp = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < basis.n_com; ++n) {
    s.amps(basis.index(n, 0)) = amp;
    amp *= alpha / std::sqrt(n + 1.0);
  }
  const double tail = std::norm(s.amps(basis.index(basis.n_com - 1, 0))) +
                      std::norm(s.amps(basis.index(basis.n_com - 2, 0)));
  if (tail > 1e-8)
    throw BasisError("make_up_coherent: coherent state does not fit in n_com");
  s.amps.normalize();
  return s;
}

namespace {

// One derivative evaluation k = -i P(t) H'(t) P(t)^dag phi, with
// P(t) = diag(e^{+i h0 tau}).
void rhs(const DriveAssembly& a, double tau, const SplitState& phi, Workspace& w,
         SplitState& k) {
  const int dim = w.dim;
  for (int m = 0; m < dim; ++m) {
    const double th = std::fmod(a.h0(m) * tau, 2.0 * M_PI);
    w.cos_t[m] = std::cos(th);
    w.sin_t[m] = std::sin(th);
  }
  // u = P^dag phi
  for (int m = 0; m < dim; ++m) {
    w.u_re[m] = w.cos_t[m] * phi.re[m] + w.sin_t[m] * phi.im[m];
    w.u_im[m] = w.cos_t[m] * phi.im[m] - w.sin_t[m] * phi.re[m];
  }
  std::fill(w.v_re.begin(), w.v_re.end(), 0.0);
  std::fill(w.v_im.begin(), w.v_im.end(), 0.0);
  if (a.has_static) {
    kern::dgemv_band_acc(a.static_term.data(), dim, a.static_bandwidth, w.u_re.data(),
                         1.0, w.v_re.data());
    kern::dgemv_band_acc(a.static_term.data(), dim, a.static_bandwidth, w.u_im.data(),
                         1.0, w.v_im.data());
  }
  const double t_phys = tau / a.omega_x;
  for (const auto& d : a.drives) {
    const double wv = d.waveform.value(t_phys);
    if (wv == 0.0) continue;
    kern::dgemv_band_acc(d.matrix.data(), dim, d.bandwidth, w.u_re.data(), wv,
                         w.v_re.data());
    kern::dgemv_band_acc(d.matrix.data(), dim, d.bandwidth, w.u_im.data(), wv,
                         w.v_im.data());
  }
  // k = -i P v
  for (int m = 0; m < dim; ++m) {
    k.re[m] = w.cos_t[m] * w.v_im[m] + w.sin_t[m] * w.v_re[m];
    k.im[m] = w.sin_t[m] * w.v_im[m] - w.cos_t[m] * w.v_re[m];
  }
}

SplitState run_ifrk4(const DriveAssembly& a, const Eigen::VectorXcd& psi0, double tau_total,
                     long steps) {
  const int dim = static_cast<int>(psi0.size());
  SplitState phi(dim), k1(dim), k2(dim), k3(dim), k4(dim), stage(dim);
  Workspace w(dim);
  for (int m = 0; m < dim; ++m) {
    phi.re[m] = psi0(m).real();
    phi.im[m] = psi0(m).imag();
  }
  const double dt = tau_total / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) {
    const double t0 = dt * static_cast<double>(s);
    rhs(a, t0, phi, w, k1);
    stage = phi;
    kern::axpy(k1.re.data(), 0.5 * dt, stage.re.data(), dim);
    kern::axpy(k1.im.data(), 0.5 * dt, stage.im.data(), dim);
    rhs(a, t0 + 0.5 * dt, stage, w, k2);
    stage = phi;
    kern::axpy(k2.re.data(), 0.5 * dt, stage.re.data(), dim);
    kern::axpy(k2.im.data(), 0.5 * dt, stage.im.data(), dim);
    rhs(a, t0 + 0.5 * dt, stage, w, k3);
    stage = phi;
    kern::axpy(k3.re.data(), dt, stage.re.data(), dim);
    kern::axpy(k3.im.data(), dt, stage.im.data(), dim);
    rhs(a, t0 + dt, stage, w, k4);
    const double c1 = dt / 6.0, c2 = dt / 3.0;
    kern::axpy(k1.re.data(), c1, phi.re.data(), dim);
    kern::axpy(k1.im.data(), c1, phi.im.data(), dim);
    kern::axpy(k2.re.data(), c2, phi.re.data(), dim);
    kern::axpy(k2.im.data(), c2, phi.im.data(), dim);
    kern::axpy(k3.re.data(), c2, phi.re.data(), dim);
    kern::axpy(k3.im.data(), c2, phi.im.data(), dim);
    kern::axpy(k4.re.data(), c1, phi.re.data(), dim);
    kern::axpy(k4.im.data(), c1, phi.im.data(), dim);
  }
  return phi;
}

Eigen::VectorXcd to_lab(const DriveAssembly& a, const SplitState& phi, double tau) {
  const int dim = static_cast<int>(phi.re.size());
  Eigen::VectorXcd psi(dim);
  for (int m = 0; m < dim; ++m) {
    const double th = std::fmod(a.h0(m) * tau, 2.0 * M_PI);
    const Complex p(std::cos(th), -std::sin(th));  // e^{-i h0 tau}
    psi(m) = p * Complex(phi.re[m], phi.im[m]);
  }
  return psi;
}

}  // namespace

std::pair<MotionalState, Diagnostics> propagate(const MotionalState& initial,
                                                const DriveAssembly& assembly,
                                                double T, const PropagatorConfig& config) {
  if (T < 0) throw ConfigError("propagate: T must be >= 0");
  const int dim = assembly.basis.dim();
  if (initial.amps.size() != dim) throw ConfigError("propagate: basis mismatch");

  const double tau_total = assembly.omega_x * T;
  const double fast = std::max(1.0, assembly.max_tone_ratio());
  const double dtau = 2.0 * M_PI / (fast * config.dt_divisor);
  const long steps = std::max(1L, static_cast<long>(std::ceil(tau_total / dtau)));

  SplitState phi = run_ifrk4(assembly, initial.amps, tau_total, steps);

  MotionalState out;
  out.basis = assembly.basis;
  out.amps = to_lab(assembly, phi, tau_total);
  out.time = initial.time + T;

  Diagnostics diag;
  diag.steps = steps;
  diag.dt = (tau_total / static_cast<double>(steps)) / assembly.omega_x;
  diag.n_com = assembly.basis.n_com;
  diag.n_rel = assembly.basis.n_rel;
  diag.norm_drift = std::abs(out.amps.norm() - 1.0);
  double cutoff = 0.0;
  for (int n = assembly.basis.n_com - 2; n < assembly.basis.n_com; ++n)
    for (int i = 0; i < assembly.basis.n_rel; ++i)
      cutoff += std::norm(out.amps(assembly.basis.index(n, i)));
  diag.cutoff_pop = cutoff;

  if (diag.norm_drift > config.norm_tol) {
    std::ostringstream os;
    os << "propagate: norm drift " << diag.norm_drift << " exceeds tolerance "
       << config.norm_tol << " after " << steps << " steps (dt=" << diag.dt << " s)";
    throw IntegrationError(os.str());
  }
  if (diag.cutoff_pop > config.cutoff_warn) {
    diag.cutoff_warning = true;
    if (config.strict)
      throw BasisError("propagate: COM cutoff population " +
                       std::to_string(diag.cutoff_pop) + " in strict mode");
  }

  if (config.richardson) {
    SplitState phi2 = run_ifrk4(assembly, initial.amps, tau_total, 2 * steps);
    Complex ov(0.0, 0.0);
    for (int m = 0; m < dim; ++m)
      ov += Complex(phi.re[m], -phi.im[m]) * Complex(phi2.re[m], phi2.im[m]);
    diag.richardson_fidelity = std::norm(ov);
  }
  return {out, diag};
}

double gate_fidelity(const MotionalState& final_lab, const Eigen::MatrixXcd& target_qubit_block,
                     const MotionalState& psi0, const DriveAssembly& assembly, double T) {
  const ProductBasis& b = assembly.basis;
  if (target_qubit_block.rows() != 2 * b.n_com)
    throw ConfigError("gate_fidelity: target block size mismatch");
  const double tau = assembly.omega_x * T;
  // chi = e^{+i H0 T} psi_lab restricted to the qubit block.
  Eigen::VectorXcd chi(2 * b.n_com);
  for (int n = 0; n < b.n_com; ++n)
    for (int i = 0; i < 2; ++i) {
      const double th = std::fmod(assembly.h0(b.index(n, i)) * tau, 2.0 * M_PI);
      chi(n * 2 + i) = Complex(std::cos(th), std::sin(th)) * final_lab.amps(b.index(n, i));
    }
  Eigen::VectorXcd ref(2 * b.n_com);
  for (int n = 0; n < b.n_com; ++n)
    for (int i = 0; i < 2; ++i) ref(n * 2 + i) = psi0.amps(b.index(n, i));
  const Complex ov = (target_qubit_block * ref).adjoint() * chi;
  return std::norm(ov);
}

Observables observables(const MotionalState& state) {
  const ProductBasis& b = state.basis;
  Observables o;
  for (int n = 0; n < b.n_com; ++n)
    for (int i = 0; i < b.n_rel; ++i) {
      const double p = std::norm(state.amps(b.index(n, i)));
      o.mean_n += n * p;
      if (i == 0)
        o.pop_up += p;
      else if (i == 1)
        o.pop_dn += p;
      else
        o.leakage += p;
    }
  for (int n = 0; n + 1 < b.n_com; ++n)
    for (int i = 0; i < b.n_rel; ++i)
      o.mean_a += std::conj(state.amps(b.index(n, i))) * std::sqrt(n + 1.0) *
                  state.amps(b.index(n + 1, i));
  for (int n = 0; n + 2 < b.n_com; ++n)
    for (int i = 0; i < b.n_rel; ++i)
      o.mean_a2 += std::conj(state.amps(b.index(n, i))) *
                   std::sqrt((n + 1.0) * (n + 2.0)) * state.amps(b.index(n + 2, i));
  o.mean_R = std::sqrt(2.0) * o.mean_a.real();
  // <R^2> = (1/2)<a^2 + a'^2 + 2n + 1>
  o.mean_R2 = o.mean_a2.real() + o.mean_n + 0.5;
  return o;
}

Eigen::MatrixXcd expm_antihermitian(const Eigen::MatrixXcd& g) {
  const double defect = (g + g.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw ConfigError("expm_antihermitian: generator not anti-Hermitian");
  const Eigen::MatrixXcd h = Complex(0.0, 1.0) * g;  // Hermitian
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (int i = 0; i < phases.size(); ++i)
    phases(i) = std::polar(1.0, -es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

std::string Diagnostics::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"norm_drift\":" << norm_drift << ",\"cutoff_pop\":" << cutoff_pop
     << ",\"steps\":" << steps << ",\"dt\":" << dt << ",\"basis\":{\"n_com\":" << n_com
     << ",\"n_rel\":" << n_rel << "}";
  if (richardson_fidelity >= 0) os << ",\"richardson_fidelity\":" << richardson_fidelity;
  os << "}";
  return os.str();
}

}  // namespace sqo
