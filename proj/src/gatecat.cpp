#include "sqo/gatecat.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "sqo/errors.hpp"

namespace sqo {

GateKind gate_kind_from_string(const std::string& s) {
  static const std::map<std::string, GateKind> m = {
      {"D", GateKind::D},   {"R", GateKind::R},   {"SR", GateKind::SR},
      {"S", GateKind::S},   {"CD", GateKind::CD}, {"CR", GateKind::CR},
      {"CS", GateKind::CS}};
  auto it = m.find(s);
  if (it == m.end()) throw ConfigError("unknown gate kind: " + s);
  return it->second;
}

std::string to_string(GateKind k) {
  switch (k) {
    case GateKind::D: return "D";
    case GateKind::R: return "R";
    case GateKind::SR: return "SR";
    case GateKind::S: return "S";
    case GateKind::CD: return "CD";
    case GateKind::CR: return "CR";
    case GateKind::CS: return "CS";
  }
  return "?";
}

bool uses_five_beams(GateKind k) { return k == GateKind::D || k == GateKind::CD; }

double default_u_prime(GateKind k) { return uses_five_beams(k) ? 0.86 : 0.36; }

int default_n_com(GateKind k) {
  return (k == GateKind::S || k == GateKind::CS) ? 64 : 48;
}

double default_dt_divisor(GateKind k) {
  switch (k) {
    case GateKind::D: return 1024;
    case GateKind::R: return 512;
    case GateKind::SR: return 512;
    case GateKind::S: return 192;
    case GateKind::CD: return 96;
    default: return 64;  // CR, CS
  }
}

namespace {

bool r_family(GateKind k) {
  return k == GateKind::R || k == GateKind::SR || k == GateKind::CR;
}

// Unit depth responses for the paper layouts: column C^{-1} e_k.
std::vector<double> order_response(const CoefficientMatrix& C, int order) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(C.c.rows());
  e(order - 1) = 1.0;
  Eigen::VectorXd u = C.solve(e);
  return std::vector<double>(u.data(), u.data() + u.size());
}

}  // namespace

WaveformPlan plan_waveforms(const GateRequest& request, const RelativeSpectrum& spectrum,
                            const BeamGeometry& geom, double lambda, double delta_tone) {
  if (lambda < 0) throw ConfigError("plan_waveforms: lambda must be >= 0");
  const double wx = geom.omega_x;
  const double wt = spectrum.omega_tilde() * wx;  // exact dressed qubit gap, rad/s
  const double th = request.theta, ph = request.phi;
  const auto coeffs = qubit_coefficients(spectrum);

  WaveformPlan plan;
  CoefficientMatrix C;
  if (uses_five_beams(request.kind)) {
    plan.layout = TrapLayout::paper5();
    C = build_coeff_matrix(plan.layout, geom);
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(5);
    v0(1) = 2.0;
    plan.schedule = solve_depths_general(v0, plan.layout, geom);
  } else {
    plan.layout = TrapLayout::paper3();
    C = build_coeff_matrix(plan.layout, geom);
    plan.schedule = solve_depths_symmetric(2.0, 0.0, plan.layout.positions[2], geom);
  }
  plan.layout.base_depths = plan.schedule.base;

  auto add = [&](int order, double amplitude, std::vector<Waveform::Tone> tones) {
    Waveform wf;
    wf.order = order;
    wf.amplitude = amplitude;
    wf.tones = std::move(tones);
    if (uses_five_beams(request.kind)) {
      plan.schedule.responses.push_back(order_response(C, order));
    } else {
      // Symmetric solve controls only even orders {2,4}.
      if (order != 2 && order != 4)
        throw ConfigError("plan_waveforms: order " + std::to_string(order) +
                          " not controllable in the symmetric layout");
      const double c2z = C.c(1, 2), c4z = C.c(3, 2), c20 = C.c(1, 1), c40 = C.c(3, 1);
      const double det = c4z * c20 - c40 * c2z;
      std::vector<double> r(3);
      if (order == 2) {
        r = {-0.5 * c40 / det, c4z / det, -0.5 * c40 / det};
      } else {
        r = {0.5 * c20 / det, -c2z / det, 0.5 * c20 / det};
      }
      plan.schedule.responses.push_back(r);
    }
    plan.schedule.waveforms.push_back(std::move(wf));
  };

  using T = Waveform::Tone;
  switch (request.kind) {
    case GateKind::D:
      add(1, lambda, {T{wx, th, +1.0, T::Sin}});
      break;
    case GateKind::R:
      add(2, lambda, {T{0.0, 0.0, +1.0, T::Cos}});
      break;
    case GateKind::SR:
      add(2, lambda, {T{wt - delta_tone, ph, +1.0, T::Cos}});
      break;
    case GateKind::S:
      add(2, lambda, {T{2.0 * wx, th, -1.0, T::Sin}});
      break;
    case GateKind::CD:
      add(3, lambda, {T{wt + wx, th + ph, +1.0, T::Sin}, T{wt - wx, ph - th, -1.0, T::Sin}});
      break;
    case GateKind::CR:
      add(2, lambda * geom.eps_x * geom.eps_x * (3.0 + coeffs.c3 / coeffs.c2),
          {T{wt, ph, +1.0, T::Cos}});
      add(4, 2.0 * lambda, {T{wt, ph, -1.0, T::Cos}});
      break;
    case GateKind::CS:
      add(4, lambda,
          {T{2.0 * wx + wt, th + ph, -1.0, T::Sin}, T{2.0 * wx - wt, th - ph, -1.0, T::Sin}});
      break;
  }
  return plan;
}

Complex parameter_rate(GateKind kind, double lambda, const BeamGeometry& geom,
                       const QubitCoefficients& coeffs, double theta) {
  const double ex = geom.eps_x;
  const Complex eith = std::polar(1.0, theta);
  switch (kind) {
    case GateKind::D: return lambda / (8.0 * ex) * eith;
    case GateKind::R: return Complex(lambda / 4.0, 0.0);
    case GateKind::SR: return Complex(lambda * coeffs.c2 / 4.0, 0.0);
    case GateKind::S: return lambda / 8.0 * eith;
    case GateKind::CD: return 3.0 * lambda * ex * coeffs.c2 / 16.0 * eith;
    case GateKind::CR: return Complex(3.0 * lambda * ex * ex * coeffs.c2 / 4.0, 0.0);
    case GateKind::CS: return 3.0 * lambda * ex * ex * coeffs.c2 / 8.0 * eith;
  }
  return {};
}

double duration_for_magnitude(GateKind kind, double lambda, double magnitude,
                              const BeamGeometry& geom, const QubitCoefficients& coeffs,
                              double rate_override) {
  const double rate = rate_override > 0.0
                          ? rate_override
                          : std::abs(parameter_rate(kind, lambda, geom, coeffs, 0.0));
  if (rate <= 0) throw ConfigError("duration_for_magnitude: zero rate");
  return magnitude / rate / geom.omega_x;
}

double lambda_for_duration(GateKind kind, double duration, double magnitude,
                           const BeamGeometry& geom, const QubitCoefficients& coeffs) {
  const double per_lambda =
      std::abs(parameter_rate(kind, 1.0, geom, coeffs, 0.0)) * geom.omega_x * duration;
  if (per_lambda <= 0) throw ConfigError("lambda_for_duration: degenerate map");
  return magnitude / per_lambda;
}

namespace {

Eigen::MatrixXcd com_annihilation(int n_com) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_com, n_com);
  for (int n = 0; n + 1 < n_com; ++n) a(n, n + 1) = std::sqrt(n + 1.0);
  return a;
}

Eigen::MatrixXcd displacement_u(int n_com, Complex alpha) {
  const Eigen::MatrixXcd a = com_annihilation(n_com);
  return expm_antihermitian(alpha * a.adjoint() - std::conj(alpha) * a);
}

Eigen::MatrixXcd squeeze_u(int n_com, Complex xi) {
  const Eigen::MatrixXcd a = com_annihilation(n_com);
  return expm_antihermitian(0.5 * (std::conj(xi) * a * a - xi * a.adjoint() * a.adjoint()));
}

// kron(COM op, qubit op) with COM as the slow index: flat = n*2 + s.
Eigen::MatrixXcd qubit_kron(const Eigen::MatrixXcd& com, const Eigen::Matrix2cd& q) {
  const int n = static_cast<int>(com.rows());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int n1 = 0; n1 < n; ++n1)
    for (int n2 = 0; n2 < n; ++n2) {
      if (com(n1, n2) == Complex(0, 0)) continue;
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
          out(n1 * 2 + s1, n2 * 2 + s2) = com(n1, n2) * q(s1, s2);
    }
  return out;
}

Eigen::Matrix2cd proj_phi(double phi, int sign) {
  const Complex e = std::polar(0.5, -phi);
  Eigen::Matrix2cd p;
  p << 0.5, static_cast<double>(sign) * e,
      static_cast<double>(sign) * std::conj(e), 0.5;
  return p;
}

}  // namespace

Eigen::MatrixXcd target_unitary(GateKind kind, Complex parameter, double phi, int n_com,
                                const QubitCoefficients& coeffs) {
  const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
  switch (kind) {
    case GateKind::D: {
      if (std::abs(parameter) > n_com / 10.0)
        throw BasisError("target_unitary: |alpha| too large for basis");
      return qubit_kron(displacement_u(n_com, parameter), id2);
    }
    case GateKind::S: {
      if (std::abs(parameter) > 1.5)
        throw BasisError("target_unitary: |xi| too large for basis");
      return qubit_kron(squeeze_u(n_com, parameter), id2);
    }
    case GateKind::R: {
      // exp(-i gamma (n + c1 sigma_z)); see ledgered sign convention.
      const double g = parameter.real();
      Eigen::MatrixXcd rot = Eigen::MatrixXcd::Zero(n_com, n_com);
      for (int n = 0; n < n_com; ++n) rot(n, n) = std::polar(1.0, -g * n);
      Eigen::Matrix2cd q = Eigen::Matrix2cd::Zero();
      q(0, 0) = std::polar(1.0, -g * coeffs.c1);
      q(1, 1) = std::polar(1.0, g * coeffs.c1);
      return qubit_kron(rot, q);
    }
    case GateKind::SR: {
      const double g = parameter.real();
      Eigen::Matrix2cd sphi;
      sphi << 0.0, std::polar(1.0, -phi), std::polar(1.0, phi), 0.0;
      const Eigen::Matrix2cd q =
          std::cos(0.5 * g) * id2 - Complex(0, 1) * std::sin(0.5 * g) * sphi;
      return qubit_kron(Eigen::MatrixXcd::Identity(n_com, n_com), q);
    }
    case GateKind::CD: {
      if (std::abs(parameter) > n_com / 10.0)
        throw BasisError("target_unitary: |alpha| too large for basis");
      return qubit_kron(displacement_u(n_com, parameter), proj_phi(phi, +1)) +
             qubit_kron(displacement_u(n_com, -parameter), proj_phi(phi, -1));
    }
    case GateKind::CR: {
      const double g = parameter.real();
      Eigen::MatrixXcd rp = Eigen::MatrixXcd::Zero(n_com, n_com);
      Eigen::MatrixXcd rm = Eigen::MatrixXcd::Zero(n_com, n_com);
      for (int n = 0; n < n_com; ++n) {
        rp(n, n) = std::polar(1.0, g * n);
        rm(n, n) = std::polar(1.0, -g * n);
      }
      return qubit_kron(rp, proj_phi(phi, +1)) + qubit_kron(rm, proj_phi(phi, -1));
    }
    case GateKind::CS: {
      if (std::abs(parameter) > 1.5)
        throw BasisError("target_unitary: |xi| too large for basis");
      return qubit_kron(squeeze_u(n_com, parameter), proj_phi(phi, +1)) +
             qubit_kron(squeeze_u(n_com, -parameter), proj_phi(phi, -1));
    }
  }
  throw ConfigError("target_unitary: unhandled kind");
}

CorrectionSettings correction_settings(GateKind kind, double lambda,
                                       const RelativeSpectrum& spectrum) {
  if (kind != GateKind::R && kind != GateKind::SR)
    throw ConfigError("correction_settings: only R and SR are supported");
  if (lambda >= 1.0) throw ConfigError("correction_settings: lambda must be < 1");
  const double wx = 1.0;  // work in units of omega_x, convert at the end
  const double wt = spectrum.omega_tilde();
  const double wtp = spectrum.omega_tilde_prime();
  if (std::abs(wt - wtp) < 1e-3)
    throw ConfigError("correction_settings: omega_tilde ~ omega_tilde' (degenerate)");
  const auto c = qubit_coefficients(spectrum);
  const double l2 = lambda * lambda;
  CorrectionSettings out;
  out.enabled = true;
  if (kind == GateKind::R) {
    out.Delta = -lambda * wx / 4.0 + l2 * wx * wx / (32.0 * wt);
    out.delta = 2.0 * (lambda * wx * c.c1 / 4.0 - l2 * wx * wx * c.c2 * c.c2 / (16.0 * wt) +
                       l2 * wx * wx * c.c2p * c.c2p / (32.0 * wtp));
  } else {
    out.Delta = l2 * wx * wx / 64.0 * (1.0 / (2.0 * wx - wt) + 1.0 / (2.0 * wx + wt));
    out.delta = -2.0 * (l2 * wx * wx * c.c2 * c.c2 / (128.0 * wt) +
                        l2 * wx * wx * c.c2p * c.c2p / 128.0 *
                            (1.0 / (wt - wtp) - 1.0 / (wt + wtp)));
  }
  return out;  // dimensionless (units of omega_x); scaled by callers
}

namespace {

Complex estimate_parameter(GateKind kind, const MotionalState& inter, double phi,
                           Complex alpha0) {
  const ProductBasis& b = inter.basis;
  const auto obs = observables(inter);
  switch (kind) {
    case GateKind::D: return obs.mean_a;
    case GateKind::S: return Complex(std::asinh(std::sqrt(obs.mean_n)), 0.0);
    case GateKind::R:
      return std::abs(alpha0) > 0
                 ? Complex(-std::arg(obs.mean_a / alpha0), 0.0)
                 : Complex(0.0, 0.0);
    case GateKind::SR: {
      const double p = obs.pop_up + obs.pop_dn;
      return Complex(p > 0 ? 2.0 * std::asin(std::sqrt(obs.pop_dn / p)) : 0.0, 0.0);
    }
    default: break;
  }
  // Controlled gates: condition on the qubit |+phi> projection.
  MotionalState cond;
  cond.basis = ProductBasis{b.n_com, 1};
  cond.amps = Eigen::VectorXcd::Zero(b.n_com);
  const Complex ep = std::polar(1.0, -phi);
  for (int n = 0; n < b.n_com; ++n)
    cond.amps(n) = (inter.amps(b.index(n, 0)) + ep * inter.amps(b.index(n, 1))) / std::sqrt(2.0);
  const double nrm = cond.amps.norm();
  if (nrm < 1e-12) return {0.0, 0.0};
  cond.amps /= nrm;
  const auto obs_c = observables(cond);
  switch (kind) {
    case GateKind::CD: return obs_c.mean_a;
    case GateKind::CS: return Complex(std::asinh(std::sqrt(obs_c.mean_n)), 0.0);
    case GateKind::CR:
      return std::abs(alpha0) > 0
                 ? Complex(std::arg(obs_c.mean_a / alpha0), 0.0)
                 : Complex(0.0, 0.0);
    default: break;
  }
  return {0.0, 0.0};
}

}  // namespace

FidelityReport run_gate(const GateRequest& request, const RunSettings& settings) {
  if (!request.lambda)
    throw ConfigError("run_gate: lambda not set (use optimize_lambda)");
  if (request.magnitude <= 0) throw ConfigError("run_gate: magnitude must be > 0");
  const double lambda = *request.lambda;
  const double up = request.u_prime.value_or(default_u_prime(request.kind));
  const auto spectrum = diagonalize_relative(up, settings.n_rel_spectrum);
  const auto coeffs = qubit_coefficients(spectrum);
  const double wx = settings.geom.omega_x;

  CorrectionSettings corr;
  if (request.corrections && (request.kind == GateKind::R || request.kind == GateKind::SR))
    corr = correction_settings(request.kind, lambda, spectrum);

  // Duration from the parameter map unless pinned by the request. The
  // corrected R rate is the negative of the full a'a cancellation Delta.
  double rate_override = 0.0;
  if (corr.enabled && request.kind == GateKind::R) rate_override = -corr.Delta;
  const double T =
      request.duration.value_or(duration_for_magnitude(request.kind, lambda,
                                                       request.magnitude, settings.geom,
                                                       coeffs, rate_override));
  const double delta_tone =
      (corr.enabled && request.kind == GateKind::SR) ? corr.delta * wx : 0.0;

  auto plan = plan_waveforms(request, spectrum, settings.geom, lambda, delta_tone);
  plan.schedule.validate_nonneg(T);

  ProductBasis basis;
  basis.n_com = settings.n_com.value_or(default_n_com(request.kind));
  basis.n_rel = settings.n_rel_dyn;
  const auto assembly =
      assemble(plan.layout, plan.schedule, spectrum, settings.geom, basis, settings.k_sim);

  const Complex alpha0 =
      request.initial_alpha
          ? Complex(*request.initial_alpha, 0.0)
          : (r_family(request.kind) ? Complex(1.0, 0.0) : Complex(0.0, 0.0));
  const MotionalState psi0 =
      std::abs(alpha0) > 0 ? make_up_coherent(basis, alpha0) : make_up_vacuum(basis);

  PropagatorConfig pc;
  pc.dt_divisor = settings.dt_divisor.value_or(default_dt_divisor(request.kind));
  pc.strict = settings.strict;
  pc.richardson = settings.richardson;
  auto [final_state, diag] = propagate(psi0, assembly, T, pc);

  // Target parameter consistent with the map at (lambda, T).
  Complex param;
  if (request.kind == GateKind::R && corr.enabled) {
    param = Complex(-corr.Delta * wx * T, 0.0);
  } else {
    param = parameter_rate(request.kind, lambda, settings.geom, coeffs, request.theta) *
            (wx * T);
  }
  Eigen::MatrixXcd target =
      target_unitary(request.kind, param, request.phi, basis.n_com, coeffs);

  // Second-order frame decorations (rotating-frame reference shift).
  if (corr.enabled) {
    double phase_z = 0.0, phase_aa = 0.0;
    if (request.kind == GateKind::R) {
      phase_z = 0.5 * corr.delta * wx * T - param.real() * coeffs.c1;
    } else {  // SR
      phase_z = 0.5 * corr.delta * wx * T;
      phase_aa = -corr.Delta * wx * T;
    }
    Eigen::VectorXcd deco(2 * basis.n_com);
    for (int n = 0; n < basis.n_com; ++n) {
      deco(n * 2 + 0) = std::polar(1.0, -phase_aa * n - phase_z);
      deco(n * 2 + 1) = std::polar(1.0, -phase_aa * n + phase_z);
    }
    target = deco.asDiagonal() * target;
  }

  FidelityReport rep;
  rep.fidelity = gate_fidelity(final_state, target, psi0, assembly, T);
  rep.infidelity = 1.0 - rep.fidelity;
  rep.lambda_used = lambda;
  rep.duration_s = T;
  rep.diagnostics = diag;
  const auto obs = observables(final_state);
  rep.leakage = obs.leakage;
  rep.norm_error = diag.norm_drift;
  // Achieved parameter read off the interaction-picture state.
  MotionalState inter = final_state;
  const double tau = wx * T;
  for (int m = 0; m < basis.dim(); ++m) {
    const double th = std::fmod(assembly.h0(m) * tau, 2.0 * M_PI);
    inter.amps(m) *= Complex(std::cos(th), std::sin(th));
  }
  rep.achieved_parameter = estimate_parameter(request.kind, inter, request.phi, alpha0);
  return rep;
}

double lambda_feasibility_limit(const GateRequest& request, const RunSettings& settings) {
  const double up = request.u_prime.value_or(default_u_prime(request.kind));
  const auto spectrum = diagonalize_relative(up, settings.n_rel_spectrum);
  const auto plan = plan_waveforms(request, spectrum, settings.geom, 1.0);
  return plan.schedule.feasible_scale();
}

std::vector<double> default_lambda_grid(const GateRequest& request,
                                        const RunSettings& settings) {
  const double hi = 0.98 * lambda_feasibility_limit(request, settings);
  const double lo = 1e-3;
  const int per_decade = 24;
  std::vector<double> grid;
  const double decades = std::log10(hi / lo);
  const int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)));
  for (int i = 0; i <= n; ++i)
    grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
  return grid;
}

LambdaScan optimize_lambda(const GateRequest& request, const RunSettings& settings,
                           std::vector<double> grid, int refine_rounds) {
  if (grid.empty()) throw ConfigError("optimize_lambda: empty grid");
  std::sort(grid.begin(), grid.end());

  std::map<double, double> curve;           // lambda -> fidelity (NaN = infeasible)
  std::map<double, FidelityReport> reports;
  std::mutex mu;

  auto evaluate = [&](const std::vector<double>& lams) {
    std::atomic<std::size_t> next{0};
    const int nthreads = std::max(1, settings.threads);
    std::vector<std::thread> pool;
    auto work = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= lams.size()) break;
        GateRequest req = request;
        req.lambda = lams[i];
        double f = std::numeric_limits<double>::quiet_NaN();
        FidelityReport rep;
        try {
          rep = run_gate(req, settings);
          f = rep.fidelity;
        } catch (const DepthError&) {
          // infeasible point; recorded as NaN
        }
        std::lock_guard<std::mutex> lk(mu);
        curve[lams[i]] = f;
        if (!std::isnan(f)) reports[lams[i]] = rep;
      }
    };
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  };

  evaluate(grid);

  auto best_of = [&]() -> std::pair<double, double> {
    double bl = 0.0, bf = -1.0;
    for (const auto& [l, f] : curve)
      if (!std::isnan(f) && f > bf) {  // ties keep the smaller lambda
        bf = f;
        bl = l;
      }
    return {bl, bf};
  };

  auto [bl, bf] = best_of();
  if (bf < 0) throw DepthError("optimize_lambda: entire grid infeasible");

  for (int round = 0; round < refine_rounds; ++round) {
    // Bracket around the current best and subdivide.
    std::vector<double> keys;
    for (const auto& [l, f] : curve) keys.push_back(l);
    auto it = std::find(keys.begin(), keys.end(), bl);
    const double lo = (it == keys.begin()) ? bl * 0.8 : *(it - 1);
    const double hi = (it + 1 == keys.end()) ? bl * 1.2 : *(it + 1);
    std::vector<double> sub;
    for (int i = 1; i <= 6; ++i) {
      const double l = lo + (hi - lo) * i / 7.0;
      if (!curve.count(l)) sub.push_back(l);
    }
    if (sub.empty()) break;
    evaluate(sub);
    std::tie(bl, bf) = best_of();
  }

  LambdaScan scan;
  scan.lambda_star = bl;
  scan.fidelity_star = bf;
  scan.best = reports.at(bl);
  for (const auto& [l, f] : curve) scan.curve.emplace_back(l, f);
  return scan;
}

std::string FidelityReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"fidelity\":" << fidelity << ",\"infidelity\":" << infidelity
     << ",\"leakage\":" << leakage << ",\"norm_error\":" << norm_error
     << ",\"achieved_parameter\":{\"re\":" << achieved_parameter.real()
     << ",\"im\":" << achieved_parameter.imag() << "},\"lambda\":" << lambda_used
     << ",\"duration_s\":" << duration_s << ",\"diagnostics\":" << diagnostics.to_json()
     << "}";
  return os.str();
}

}  // namespace sqo
