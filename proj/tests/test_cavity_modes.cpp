#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "leakycav/cavity_modes.hpp"
#include "leakycav/errors.hpp"
#include "leakycav/units.hpp"
#include "oracles/cavity.hpp"
#include "oracles/quadrature.hpp"
#include "oracles/support.hpp"

using namespace leakycav;
using oracle::rel_err;

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);

CavityConfig unit_cavity(double gamma) { return CavityConfig{0.0, 1.0, 1.0 + sqrt2, 1.0, 1.0, gamma}; }
oracle::Slab slab(const CavityConfig& c) { return {c.a0, c.b, c.c, c.gamma}; }

}  // namespace

TEST_CASE("construction rejects bad geometry") {
  CHECK_THROWS_AS(make_cavity(1.0, 0.5, 2.0, 1, 1, 10), ValidationError);
  CHECK_THROWS_AS(make_cavity(0.0, 1.0, 2.5, 0, 1, 10), ValidationError);
  CHECK_THROWS_AS(make_cavity(0.0, 1.0, 2.5, 1, 1, -1), ValidationError);
  CHECK_THROWS_AS(make_cavity(0.0, 1.0, 3.0, 1, 1, 10), ValidationError);   // ratio 1/2
  CHECK_THROWS_AS(make_cavity(0.0, 2.0, 3.0, 1, 1, 10), ValidationError);   // ratio 2
  CHECK_NOTHROW(make_cavity(0.0, 1.0, 1.0 + sqrt2, 1, 1, 10));
  CHECK_THROWS_AS(solve_transverse_frequencies(unit_cavity(50), 0, ModeClass::LeftDominated),
                  ValidationError);
}

TEST_CASE("perfect mirror puts roots on the poles") {
  const auto cav = unit_cavity(std::numeric_limits<double>::infinity());
  const auto left = solve_transverse_frequencies(cav, 3, ModeClass::LeftDominated);
  CHECK(left[0] == pi);
  CHECK(left[2] == 3 * pi);
  CHECK(fundamental_eta(cav) == 0.0);
}

TEST_CASE("roots agree with an independent bisection") {
  const auto cav = unit_cavity(200);
  const auto s = slab(cav);
  for (auto cls : {ModeClass::LeftDominated, ModeClass::RightDominated}) {
    const auto roots = solve_transverse_frequencies(cav, 6, cls);
    for (int n = 1; n <= 6; ++n) {
      const double want = oracle::nth_root(s, n, cls == ModeClass::LeftDominated);
      CHECK(rel_err(roots[static_cast<std::size_t>(n - 1)], want) < 1e-12);
      CHECK(std::abs(eigenvalue_residual(cav, roots[static_cast<std::size_t>(n - 1)])) < 1e-10);
    }
    for (std::size_t i = 1; i < roots.size(); ++i) CHECK(roots[i] > roots[i - 1]);
  }
}

TEST_CASE("fundamental root matches the second-order expansion") {
  const auto cav = unit_cavity(50);
  const double root = oracle::nth_root(slab(cav), 1, true);
  CHECK(rel_err(perturbative_frequency(cav, 1, ModeClass::LeftDominated, 2), root) < 1e-4);
}

TEST_CASE("left and right fundamentals sit just below their own poles") {
  const auto cav = unit_cavity(50);
  const double wl = solve_transverse_frequencies(cav, 1, ModeClass::LeftDominated)[0];
  const double wr = solve_transverse_frequencies(cav, 1, ModeClass::RightDominated)[0];
  const double eta = wl / cav.gamma;
  CHECK(wl != wr);
  CHECK(wl < pi);
  CHECK(pi - wl < 2 * eta);
  CHECK(wr < pi / sqrt2);
  CHECK(pi / sqrt2 - wr < 2 * eta);
}

TEST_CASE("each left root lies between consecutive left poles") {
  for (double gamma : {200.0, 500.0, 5000.0}) {
    const auto cav = unit_cavity(gamma);
    const auto roots = solve_transverse_frequencies(cav, 8, ModeClass::LeftDominated);
    for (std::size_t k = 0; k < roots.size(); ++k) {
      CHECK(roots[k] > k * pi);
      CHECK(roots[k] < (k + 1) * pi);
      std::size_t inside = 0;
      for (double r : roots) inside += (r > k * pi && r < (k + 1) * pi);
      CHECK(inside == 1);
    }
  }
}

TEST_CASE("ambiguous class assignment is an error") {
  CHECK_THROWS_AS(solve_transverse_frequencies(unit_cavity(2.0), 1, ModeClass::LeftDominated),
                  NumericError);
}

TEST_CASE("perturbative frequency, direct arithmetic") {
  CHECK(perturbative_frequency(1.0, sqrt2, 1, 0.1, 1) == doctest::Approx(pi - 0.05).epsilon(1e-15));
  CHECK(perturbative_frequency(1.0, sqrt2, 3, 0.0, 1) == 3 * pi);
  CHECK(perturbative_frequency(1.0, sqrt2, 3, 0.0, 2) == 3 * pi);
  const double second = perturbative_frequency(1.0, sqrt2, 1, 0.1, 2);
  CHECK(second == doctest::Approx(pi - 0.05 + 0.01 / (4 * std::tan(pi * sqrt2))).epsilon(1e-14));
  CHECK_THROWS_AS(perturbative_frequency(1.0, 2.0, 1, 0.1, 2), NumericError);
  CHECK_THROWS_AS(perturbative_frequency(1.0, 2.0, 1, 0.1, 3), ValidationError);
  CHECK_THROWS_AS(perturbative_frequency(1.0, 2.0, 0, 0.1, 1), ValidationError);
}

TEST_CASE("second-order error shrinks like eta cubed") {
  for (auto cls : {ModeClass::LeftDominated, ModeClass::RightDominated}) {
    double prev = 0.0;
    for (double gamma = 50.0; gamma < 2000.0; gamma *= 3.0) {
      const auto cav = unit_cavity(gamma);
      const double root = solve_transverse_frequencies(cav, 1, cls)[0];
      const double gap = std::abs(perturbative_frequency(cav, 1, cls, 2) - root) / root;
      if (prev > 0.0) CHECK(prev / gap >= 20.0);
      prev = gap;
    }
  }
}

TEST_CASE("mode frequency composition") {
  CavityConfig cav = unit_cavity(50);
  cav.dy = pi;
  cav.dz = pi;
  Mode m;
  m.omega_x = 3.0;
  CHECK(mode_frequency(cav, m) == doctest::Approx(std::sqrt(11.0)).epsilon(1e-15));

  const double side = 0.01;
  const CavityConfig cube{0.0, side, side * (1 + sqrt2), side, side,
                          std::numeric_limits<double>::infinity()};
  const Mode f = fundamental_mode(cube);
  CHECK(rel_err(f.omega_total, std::sqrt(3.0) * pi / side) < 1e-14);
  const double si = units::rate_to_si(f.omega_total);
  CHECK(std::abs(si / 150e9 - 1.0) < 0.10);
}

TEST_CASE("mode invariants") {
  const auto cav = unit_cavity(200);
  for (auto cls : {ModeClass::LeftDominated, ModeClass::RightDominated}) {
    for (int n = 1; n <= 4; ++n) {
      const Mode m = make_mode(cav, n, 2, 1, cls);
      const double ky = 2 * pi / cav.dy, kz = pi / cav.dz;
      CHECK(rel_err(m.omega_total * m.omega_total, m.omega_x * m.omega_x + ky * ky + kz * kz) < 1e-12);
      CHECK(std::abs(eigenvalue_residual(cav, m.omega_x)) < 1e-10);
      const double left_b = eigenfunction_x(cav, m, std::nextafter(cav.b, 0.0));
      const double right_b = m.norm_right * std::sin(m.omega_x * (cav.c - cav.b));
      CHECK(std::abs(left_b - right_b) < 1e-10);
    }
  }
}

TEST_CASE("eigenfunctions are orthonormal") {
  const auto cav = unit_cavity(200);
  std::vector<Mode> modes;
  for (auto cls : {ModeClass::LeftDominated, ModeClass::RightDominated})
    for (int n = 1; n <= 4; ++n) modes.push_back(make_mode(cav, n, 1, 1, cls));
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i; j < modes.size(); ++j) {
      const auto g = [&](double x) {
        return eigenfunction_x(cav, modes[i], x) * eigenfunction_x(cav, modes[j], x);
      };
      const double overlap = oracle::integrate(g, cav.a0, cav.b) + oracle::integrate(g, cav.b, cav.c);
      CHECK(std::abs(overlap - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("eta parameter") {
  const auto cav = unit_cavity(50);
  std::vector<Mode> modes{make_mode(cav, 1, 1, 1, ModeClass::LeftDominated),
                          make_mode(cav, 3, 1, 1, ModeClass::RightDominated)};
  const EtaParam p = eta_param(cav, modes);
  CHECK(p.eta > 0);
  for (std::size_t i = 0; i < modes.size(); ++i)
    CHECK(rel_err(p.per_mode_eta[i], modes[i].omega_x / modes[0].omega_x * p.eta) < 1e-12);
}

TEST_CASE("geometry factor selection rules") {
  const auto cav = unit_cavity(50);
  const Mode L = fundamental_mode(cav);
  CHECK(geometry_factor(cav, L, make_mode(cav, 1, 2, 1, ModeClass::RightDominated)) == 0.0);
  CHECK(geometry_factor(cav, L, make_mode(cav, 1, 1, 3, ModeClass::RightDominated)) == 0.0);
  const auto ideal = unit_cavity(std::numeric_limits<double>::infinity());
  CHECK(geometry_factor(ideal, fundamental_mode(ideal),
                        make_mode(ideal, 1, 1, 1, ModeClass::RightDominated)) == 0.0);
  CHECK_THROWS_AS(geometry_factor(cav, make_mode(cav, 2, 1, 1, ModeClass::LeftDominated),
                                  make_mode(cav, 1, 1, 1, ModeClass::RightDominated)),
                  ValidationError);
}

TEST_CASE("geometry factor against the finite-difference quadrature") {
  const auto cav = unit_cavity(50);
  const Mode L = fundamental_mode(cav);
  const double eta = fundamental_eta(cav);
  for (int n = 1; n <= 3; ++n) {
    const Mode R = make_mode(cav, n, 1, 1, ModeClass::RightDominated);
    const double closed = geometry_factor(cav, L, R);
    const double numeric = oracle::geometry_factor_fd(slab(cav), n);
    CAPTURE(n);
    CAPTURE(closed);
    CAPTURE(numeric);
    CHECK(rel_err(closed, numeric) < 5 * eta);
    CHECK(std::abs(closed) < 5 * eta);
  }
}

TEST_CASE("the underlying coupling is antisymmetric") {
  const auto s = slab(unit_cavity(50));
  for (int n = 1; n <= 3; ++n) {
    const double m_lr = -oracle::geometry_factor_fd(s, n);
    const double m_rl = -oracle::geometry_factor_fd_reverse(s, n);
    CHECK(std::abs(m_lr + m_rl) < 1e-8);
  }
}

TEST_CASE("quality factor") {
  CHECK(quality_factor_from_eta(std::numeric_limits<double>::infinity()) == doctest::Approx(2 * pi));
  const double q4 = quality_factor_from_eta(1e-4);
  CHECK(q4 == doctest::Approx(2 * pi * (1 + 1e8)).epsilon(1e-14));
  CHECK(q4 / (2 * pi * 1e8) < 2.0);
  CHECK(q4 / (2 * pi * 1e8) > 0.5);
  CHECK(quality_factor_from_eta(1e-3) == doctest::Approx(6.283e6).epsilon(1e-3));
  const auto cav = unit_cavity(50);
  CHECK(quality_factor(cav) == doctest::Approx(quality_factor_from_eta(fundamental_eta(cav))));
}
