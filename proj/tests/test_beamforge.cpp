#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sqo/beamforge.hpp"
#include "sqo/errors.hpp"

using namespace sqo;

namespace {

const BeamGeometry kGeom;  // 87Rb reference values

BeamGeometry bare_geometry() {
  // eps_y, eps_z tiny: effectively the plain 1D Gaussian.
  return BeamGeometry(700e-9, 2 * M_PI * 140e3, 0.041, 1e-9, 1e-9);
}

}  // namespace

TEST_CASE("g_integral basics") {
  CHECK(g_integral(5, 0.0) == 1.0);
  CHECK(g_integral(0, 0.3) == doctest::Approx(1.0).epsilon(1e-13));
  // small-a expansion: g(1,a) = 1 - a^2/2 + O(a^4)
  const double a = 0.014;
  CHECK(g_integral(1, a) == doctest::Approx(1.0 - a * a / 2.0).epsilon(3e-8));
  // independent Romberg oracle
  CHECK(g_integral(3, 0.1) ==
        doctest::Approx(oracles::g_integral_romberg(3, 0.1)).epsilon(1e-12));
  CHECK(g_integral(20, 0.05) ==
        doctest::Approx(oracles::g_integral_romberg(20, 0.05)).epsilon(1e-12));
}

TEST_CASE("axial coefficients: closed-form checks") {
  const auto g0 = bare_geometry();
  CHECK(axial_coefficient(1, 0.0, g0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(axial_coefficient(2, 0.0, g0) == doctest::Approx(2.0).epsilon(1e-12));
  // c1(zeta) = -4 zeta e^{-2 zeta^2} for the bare beam
  const double z = 0.5;
  CHECK(axial_coefficient(1, z, g0) ==
        doctest::Approx(-4.0 * z * std::exp(-2.0 * z * z)).epsilon(1e-12));
}

TEST_CASE("axial coefficients: parity") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dz(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const double z = dz(rng);
    for (int m = 0; m <= 8; ++m) {
      const double cp = axial_coefficient(m, z, kGeom);
      const double cm = axial_coefficient(m, -z, kGeom);
      const double expect = (m % 2 == 0) ? cp : -cp;
      CHECK(cm == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("axial coefficients: series tail failure for far beams") {
  CHECK_THROWS_AS(axial_coefficient(2, 2.7, kGeom), ConvergenceError);
}

TEST_CASE("series coefficients match finite differences of the quadrature potential") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dz(-1.0, 1.0), de(0.005, 0.05);
  TrapLayout layout;
  layout.k_max = 5;
  for (int trial = 0; trial < 4; ++trial) {
    const double z = dz(rng);
    const BeamGeometry geom(700e-9, 2 * M_PI * 140e3, 0.041, de(rng), de(rng));
    layout.positions = {z};
    const std::vector<double> depth = {1.0};
    // m-th derivative at x'=0 via central differences on the quadrature oracle.
    const double h = 0.02;
    auto V = [&](double x) {
      return effective_potential_quadrature(x, layout, depth, geom);
    };
    const double f[9] = {V(-4 * h), V(-3 * h), V(-2 * h), V(-h), V(0),
                         V(h),      V(2 * h),  V(3 * h),  V(4 * h)};
    const double d1 = (f[2] - 8 * f[3] + 8 * f[5] - f[6]) / (12 * h);
    const double d2 = (-f[2] + 16 * f[3] - 30 * f[4] + 16 * f[5] - f[6]) /
                      (12 * h * h);
    for (int m = 1; m <= 2; ++m) {
      const double deriv = (m == 1) ? d1 : d2;
      const double fact = (m == 1) ? 1.0 : 2.0;
      const double series = axial_coefficient(m, z, geom);
      CHECK(deriv / fact == doctest::Approx(series).epsilon(1e-6));
    }
    // Higher orders: compare the full series value against quadrature directly.
    for (double x : {0.1, 0.3, -0.25}) {
      const auto pv = effective_potential(x, layout, depth, geom, 16);
      CHECK(pv.value == doctest::Approx(V(x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("paper 3-beam layout reproduces the reference depths") {
  const double z = 0.6775;
  auto s = solve_depths_symmetric(2.0, 0.0, z, kGeom);
  CHECK(s.base[0] == doctest::Approx(1.76).epsilon(0.02));
  CHECK(s.base[1] == doctest::Approx(2.17).epsilon(0.02));
  CHECK(s.base[2] == s.base[0]);
  // round trip: C U = (0, 2, 0, 0, 0) on controlled orders {2,4}
  const auto C = build_coeff_matrix(TrapLayout::paper3(), kGeom);
  Eigen::Vector3d u(s.base[0], s.base[1], s.base[2]);
  const Eigen::VectorXd v = C.c * u;
  CHECK(std::abs(v(1) - 2.0) < 1e-10);
  CHECK(std::abs(v(3)) < 1e-10);
  // odd orders vanish exactly for the symmetric layout
  CHECK(std::abs(v(0)) < 1e-12);
  CHECK(std::abs(v(2)) < 1e-12);
  CHECK(std::abs(v(4)) < 1e-12);
}

TEST_CASE("paper 5-beam layout reproduces the reference depths") {
  Eigen::VectorXd target(5);
  target << 0, 2, 0, 0, 0;
  auto s = solve_depths_general(target, TrapLayout::paper5(), kGeom);
  const std::vector<double> paper = {1.81, 2.94, 2.82, 1.42, 2.88};
  for (int j = 0; j < 5; ++j)
    CHECK(s.base[j] == doctest::Approx(paper[j]).epsilon(0.02));
  // modulation response vectors from the End Matter
  const auto C = build_coeff_matrix(TrapLayout::paper5(), kGeom);
  CHECK(C.condition_number < 1e3);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(5);
  e1(0) = 1.0;
  const Eigen::VectorXd d = C.solve(e1);
  const std::vector<double> dpaper = {3.01, 2.00, 2.04, 0.49, 2.16};
  for (int j = 0; j < 5; ++j)
    CHECK(d(j) == doctest::Approx(dpaper[j]).epsilon(0.02));
  Eigen::VectorXd e3 = Eigen::VectorXd::Zero(5);
  e3(2) = 1.0;
  const Eigen::VectorXd cd = C.solve(e3);
  const std::vector<double> cdpaper = {5.04, 3.16, 3.83, 1.21, 4.91};
  for (int j = 0; j < 5; ++j)
    CHECK(cd(j) == doctest::Approx(cdpaper[j]).epsilon(0.02));
}

TEST_CASE("zero target gives zero depths") {
  auto s = solve_depths_symmetric(0.0, 0.0, 0.6775, kGeom);
  CHECK(s.base[0] == doctest::Approx(0.0));
  CHECK(s.base[1] == doctest::Approx(0.0));
}

TEST_CASE("symmetric solve round-trips a mixed target") {
  const double v2 = 2.0, v4 = 0.1;
  auto s = solve_depths_symmetric(v2, v4, 0.6775, kGeom);
  const double c2z = axial_coefficient(2, 0.6775, kGeom);
  const double c4z = axial_coefficient(4, 0.6775, kGeom);
  const double c20 = axial_coefficient(2, 0.0, kGeom);
  const double c40 = axial_coefficient(4, 0.0, kGeom);
  CHECK(2 * s.base[0] * c2z + s.base[1] * c20 == doctest::Approx(v2).epsilon(1e-12));
  CHECK(2 * s.base[0] * c4z + s.base[1] * c40 == doctest::Approx(v4).epsilon(1e-12));
}

TEST_CASE("negative depths rejected") {
  Eigen::VectorXd target(5);
  target << 0, -2, 0, 0, 0;
  CHECK_THROWS_AS(solve_depths_general(target, TrapLayout::paper5(), kGeom), DepthError);
}

TEST_CASE("single centered beam: singular 1x1 matrix still constructs") {
  TrapLayout l;
  l.positions = {0.0};
  l.k_max = 1;
  const auto C = build_coeff_matrix(l, kGeom);
  CHECK(C.c(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(!std::isfinite(C.condition_number));
  Eigen::VectorXd t(1);
  t << 1.0;
  CHECK_THROWS(C.solve(t));
}

TEST_CASE("harmonic check: series near the trap bottom") {
  auto s = solve_depths_symmetric(2.0, 0.0, 0.6775, kGeom);
  TrapLayout l = TrapLayout::paper3();
  const double x = 0.1;
  const auto v = effective_potential(x, l, s.base, kGeom);
  const auto v0 = effective_potential(0.0, l, s.base, kGeom);
  CHECK(v.value - v0.value == doctest::Approx(2.0 * x * x).epsilon(5e-4));
  // parity of the symmetric layout
  const auto vm = effective_potential(-x, l, s.base, kGeom);
  CHECK(v.value == doctest::Approx(vm.value).epsilon(1e-14));
}

TEST_CASE("depth positivity enforced over the schedule") {
  DepthSchedule s;
  s.base = {1.0, 1.0};
  Waveform w;
  w.order = 1;
  w.amplitude = 0.6;
  w.tones = {{2 * M_PI * 1e5, 0.0, 1.0, Waveform::Tone::Sin}};
  s.waveforms = {w};
  s.responses = {{1.0, 2.0}};  // beam 2 swings to 1 - 1.2 < 0
  CHECK_THROWS_AS(s.validate_nonneg(1e-4), DepthError);
  s.responses = {{1.0, 1.0}};
  CHECK_NOTHROW(s.validate_nonneg(1e-4));
  CHECK(s.feasible_scale() == doctest::Approx(1.0 / 0.6).epsilon(1e-12));
}

TEST_CASE("optimal zeta suppresses the combined 6th-order term") {
  auto c6_comb = [&](double z) {
    auto s = solve_depths_symmetric(2.0, 0.0, z, kGeom);
    return std::abs(s.base[1] * axial_coefficient(6, 0.0, kGeom) +
                    2.0 * s.base[0] * axial_coefficient(6, z, kGeom));
  };
  const double at_opt = c6_comb(0.6775);
  CHECK(at_opt < 0.01);
  CHECK(at_opt < 0.1 * c6_comb(0.6));
  CHECK(at_opt < 0.1 * c6_comb(0.75));
}
