#include "sqo/beamforge.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "sqo/errors.hpp"

namespace sqo {

namespace {

// Adaptive Simpson on [a,b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double h = b - a;
  const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, eps / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, eps / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
  return adaptive_simpson(f, a, b, f(a), f(0.5 * (a + b)), f(b), eps, 48);
}

constexpr int kSMax = 52;
constexpr int kTMax = 12;
constexpr double kTailTol = 1e-13;

// C(-1/2, t) = (2t-1)!! / ((-2)^t t!)
double binom_half(int t) {
  double v = 1.0;
  for (int k = 1; k <= t; ++k) v *= (2.0 * k - 1.0) / (-2.0 * k);
  return v;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

}  // namespace

double g_integral(int n, double a) {
  if (n < 0 || a < 0) throw ConfigError("g_integral: requires n >= 0, a >= 0");
  if (a == 0.0) return 1.0;
  auto f = [n, a](double x) {
    return std::pow(1.0 + a * a * x * x, -n) * std::exp(-x * x);
  };
  // Integrand is even; e^{-64} makes the tail beyond x = 8 irrelevant.
  const double half = integrate(f, 0.0, 8.0, 5e-14);
  return 2.0 * half / std::sqrt(M_PI);
}

double axial_coefficient(int m, double zeta, const BeamGeometry& geom) {
  if (m < 0) throw ConfigError("axial_coefficient: m must be >= 0");
  const double ey2 = 2.0 * geom.eps_y * geom.eps_y;

  // G(s) = sum_t (2 eps_y^2)^t C(-1/2,t) g(s+t+1, eps_z); cache g values.
  static thread_local std::vector<double> g_cache;
  static thread_local double g_cache_eps_z = -1.0;
  if (g_cache_eps_z != geom.eps_z) {
    g_cache.assign(kSMax + kTMax + 2, 0.0);
    for (int n = 0; n <= kSMax + kTMax + 1; ++n) g_cache[n] = g_integral(n, geom.eps_z);
    g_cache_eps_z = geom.eps_z;
  }

  double total = 0.0;
  double last_term = 0.0;
  for (int s = (m + 1) / 2; s <= kSMax; ++s) {
    double gsum = 0.0, eyt = 1.0;
    for (int t = 0; t <= kTMax; ++t) {
      gsum += eyt * binom_half(t) * g_cache[s + t + 1];
      eyt *= ey2;
    }
    double pw = 1.0;  // zeta^(2s-m)
    for (int i = 0; i < 2 * s - m; ++i) pw *= zeta;
    double fact = 1.0, pow2 = 1.0;
    for (int i = 1; i <= s; ++i) {
      fact *= i;
      pow2 *= -2.0;
    }
    last_term = gsum * binom(2 * s, m) * pow2 / fact * pw;
    total += last_term;
  }
  if (std::abs(last_term) > kTailTol * (std::abs(total) + 1e-300))
    throw ConvergenceError("axial_coefficient: series tail check failed at zeta=" +
                           std::to_string(zeta) + ", m=" + std::to_string(m));
  return ((m % 2 == 0) ? -1.0 : 1.0) * total;
}

void TrapLayout::validate() const {
  if (positions.empty()) throw ConfigError("TrapLayout: no beam positions");
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      if (positions[i] == positions[j])
        throw ConfigError("TrapLayout: duplicate beam positions");
  if (!base_depths.empty()) {
    if (base_depths.size() != positions.size())
      throw ConfigError("TrapLayout: depth/position count mismatch");
    for (double u : base_depths)
      if (u < 0) throw DepthError("TrapLayout: negative base depth");
  }
  if (symmetric) {
    const int n = j_max();
    for (int j = 0; j < n; ++j) {
      if (std::abs(positions[j] + positions[n - 1 - j]) > 1e-12)
        throw ConfigError("TrapLayout: positions not mirror-symmetric");
      if (!base_depths.empty() &&
          std::abs(base_depths[j] - base_depths[n - 1 - j]) > 1e-12)
        throw ConfigError("TrapLayout: depths not mirror-symmetric");
    }
  }
}

TrapLayout TrapLayout::paper3() {
  TrapLayout l;
  l.positions = {-0.6775, 0.0, 0.6775};
  l.symmetric = true;
  l.k_max = 5;
  return l;
}

TrapLayout TrapLayout::paper5() {
  TrapLayout l;
  l.positions = {-1.14, -0.56, 0.04, 0.38, 0.90};
  l.symmetric = false;
  l.k_max = 5;
  return l;
}

Eigen::VectorXd CoefficientMatrix::solve(const Eigen::VectorXd& v_target) const {
  if (c.rows() != c.cols())
    throw ConfigError("CoefficientMatrix: solve requires a square system");
  if (condition_number > 1e8) {
    std::ostringstream os;
    os << "CoefficientMatrix: ill-conditioned (cond=" << condition_number
       << ") for layout {";
    for (double z : positions) os << z << " ";
    os << "}";
    throw ConfigError(os.str());
  }
  return c.fullPivLu().solve(v_target);
}

std::string CoefficientMatrix::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  for (int k = 0; k < c.rows(); ++k) {
    for (int j = 0; j < c.cols(); ++j) {
      if (j) os << ",";
      os << c(k, j);
    }
    os << "\n";
  }
  return os.str();
}

CoefficientMatrix build_coeff_matrix(const TrapLayout& layout, const BeamGeometry& geom) {
  layout.validate();
  CoefficientMatrix out;
  out.positions = layout.positions;
  out.c.resize(layout.k_max, layout.j_max());
  for (int k = 1; k <= layout.k_max; ++k)
    for (int j = 0; j < layout.j_max(); ++j)
      out.c(k - 1, j) = axial_coefficient(k, layout.positions[j], geom);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.c);
  const auto& sv = svd.singularValues();
  out.condition_number = sv(sv.size() - 1) > 0
                             ? sv(0) / sv(sv.size() - 1)
                             : std::numeric_limits<double>::infinity();
  return out;
}

double Waveform::shape(double t) const {
  double s = 0.0;
  for (const auto& tone : tones) {
    const double arg = tone.omega * t - tone.phase;
    s += tone.sign * (tone.kind == Tone::Sin ? std::sin(arg) : std::cos(arg));
  }
  return s;
}

double Waveform::max_tone() const {
  double m = 0.0;
  for (const auto& tone : tones) m = std::max(m, std::abs(tone.omega));
  return m;
}

double Waveform::shape_bound() const {
  double b = 0.0;
  for (const auto& tone : tones) b += std::abs(tone.sign);
  return b;
}

std::vector<double> DepthSchedule::depths_at(double t) const {
  std::vector<double> u = base;
  for (std::size_t m = 0; m < waveforms.size(); ++m) {
    const double w = waveforms[m].value(t);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] += responses[m][j] * w;
  }
  return u;
}

void DepthSchedule::validate_nonneg(double duration, int samples_per_period) const {
  double fmax = 0.0;
  for (const auto& w : waveforms) fmax = std::max(fmax, w.max_tone());
  const double period = fmax > 0 ? 2.0 * M_PI / fmax : duration;
  const double dt = period / samples_per_period;
  const long n = std::max(2L, static_cast<long>(std::ceil(duration / dt)));
  for (long i = 0; i <= n; ++i) {
    const double t = duration * static_cast<double>(i) / static_cast<double>(n);
    const auto u = depths_at(t);
    for (std::size_t j = 0; j < u.size(); ++j)
      if (u[j] < 0) {
        std::ostringstream os;
        os << "DepthSchedule: depth U_" << (j + 1) << " negative (" << u[j]
           << " V0) at t=" << t << " s";
        throw DepthError(os.str());
      }
  }
}

double DepthSchedule::feasible_scale() const {
  double scale = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < base.size(); ++j) {
    double swing = 0.0;
    for (std::size_t m = 0; m < waveforms.size(); ++m)
      swing += std::abs(responses[m][j]) * std::abs(waveforms[m].amplitude) *
               waveforms[m].shape_bound();
    if (swing > 0) scale = std::min(scale, base[j] / swing);
  }
  return scale;
}

DepthSchedule solve_depths_symmetric(double v2_target, double v4_target,
                                     double zeta, const BeamGeometry& geom) {
  const double c2z = axial_coefficient(2, zeta, geom);
  const double c4z = axial_coefficient(4, zeta, geom);
  const double c20 = axial_coefficient(2, 0.0, geom);
  const double c40 = axial_coefficient(4, 0.0, geom);
  const double det = c4z * c20 - c40 * c2z;
  if (std::abs(det) < 1e-14)
    throw ConfigError("solve_depths_symmetric: degenerate layout");
  const double u2 = (c4z * v2_target - c2z * v4_target) / det;
  const double u13 = 0.5 * (-c40 * v2_target + c20 * v4_target) / det;
  if (u2 < 0 || u13 < 0)
    throw DepthError("solve_depths_symmetric: negative depth for requested targets");
  DepthSchedule s;
  s.base = {u13, u2, u13};
  return s;
}

DepthSchedule solve_depths_general(const Eigen::VectorXd& v_target,
                                   const TrapLayout& layout, const BeamGeometry& geom) {
  const auto C = build_coeff_matrix(layout, geom);
  if (v_target.size() != C.c.rows())
    throw ConfigError("solve_depths_general: target size mismatch");
  Eigen::VectorXd u = C.solve(v_target);
  const Eigen::VectorXd residual = C.c * u - v_target;
  if (residual.cwiseAbs().maxCoeff() > 1e-10)
    throw ConvergenceError("solve_depths_general: round-trip residual too large");
  DepthSchedule s;
  s.base.assign(u.data(), u.data() + u.size());
  for (double d : s.base)
    if (d < 0) throw DepthError("solve_depths_general: negative depth");
  return s;
}

PotentialValue effective_potential(double xprime, const TrapLayout& layout,
                                   const std::vector<double>& depths,
                                   const BeamGeometry& geom, int k_sim) {
  if (std::abs(xprime) > 1.5)
    throw ConfigError("effective_potential: |x'| outside validity window");
  PotentialValue out;
  for (std::size_t j = 0; j < layout.positions.size(); ++j) {
    double xp = 1.0, beam = 0.0, last = 0.0;
    for (int m = 0; m <= k_sim; ++m) {
      last = axial_coefficient(m, layout.positions[j], geom) * xp;
      beam += last;
      xp *= xprime;
    }
    out.value += depths[j] * beam;
    out.tail_estimate += std::abs(depths[j] * last);
  }
  out.tail_warning = out.tail_estimate > 1e-9;
  return out;
}

double effective_potential_quadrature(double xprime, const TrapLayout& layout,
                                      const std::vector<double>& depths,
                                      const BeamGeometry& geom) {
  const double ey = geom.eps_y, ez = geom.eps_z;
  double total = 0.0;
  for (std::size_t j = 0; j < layout.positions.size(); ++j) {
    const double q = xprime - layout.positions[j];
    auto inner = [&](double zh) {
      const double w = 1.0 + ez * ez * zh * zh;
      auto fy = [&](double yh) {
        return std::exp(-yh * yh) * std::exp(-2.0 * ey * ey * yh * yh / w);
      };
      const double vy = 2.0 * integrate(fy, 0.0, 9.0, 1e-13);
      return std::exp(-zh * zh) / w * std::exp(-2.0 * q * q / w) * vy;
    };
    const double vz = 2.0 * integrate(inner, 0.0, 9.0, 1e-13);
    total += -depths[j] * vz / M_PI;
  }
  return total;
}

}  // namespace sqo
