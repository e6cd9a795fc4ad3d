#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "leakycav/cavity_modes.hpp"
#include "leakycav/detuning.hpp"
#include "leakycav/effective_dynamics.hpp"
#include "leakycav/propagator.hpp"
#include "oracles/support.hpp"

using namespace leakycav;
using oracle::rel_err;
using cd = std::complex<double>;

namespace {

// Distance between two spectra after the best one-to-one matching.
double spectral_distance(std::vector<cd> a, std::vector<cd> b) {
  double worst = 0.0;
  for (const cd& x : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](const cd& p, const cd& q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

std::vector<cd> eig(const Eigen::Matrix4cd& M) {
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(M, false);
  return {es.eigenvalues().data(), es.eigenvalues().data() + 4};
}

double max_real(const std::vector<cd>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& x : v) m = std::max(m, x.real());
  return m;
}

}  // namespace

TEST_CASE("detuned matrix layout") {
  const DetuningParams p{0.01, 0.02, 100.0};
  const auto A = msa_matrix(1.0, 0.3, p);
  const double s3 = std::sqrt(3.0);
  CHECK(A(0, 0) == cd(0, 1.0));
  CHECK(A(1, 1) == cd(0, -1.0));
  CHECK(A(0, 1) == cd(2.0));
  CHECK(A(0, 2) == cd(s3 * 0.3));
  CHECK(A(2, 0) == cd(-0.3 / s3));
  CHECK(std::abs(A(2, 2) - cd(0, 100.0 * (0.03 - 0.02))) < 1e-15);
  CHECK(std::abs(A.trace()) < 1e-15);
  CHECK(detuning_warnings(p).empty());
  CHECK(detuning_warnings({0.2, 0.0, 1.0}).size() == 1);
}

TEST_CASE("resonant reduction") {
  for (double xi : {0.2, 1.0, 3.0})
    for (double chi : {0.0, 0.1, 0.9, 2.5, 11.0}) {
      const auto a = analytic_eigenvalues(xi, chi);
      const auto m = msa_eigenvalues_numeric(xi, chi, {0.0, 0.0, 50.0});
      const auto u = msa_eigenvalues(xi, chi, {0.0, 0.0, 50.0});
      CHECK(spectral_distance({a.begin(), a.end()}, {m.begin(), m.end()}) < 1e-12 * (xi + chi));
      CHECK(spectral_distance({a.begin(), a.end()}, {u.begin(), u.end()}) < 1e-12 * (xi + chi));
      const UV uv = uv_quantities(xi, chi, {0.0, 0.0, 50.0});
      CHECK(uv.U == doctest::Approx(8 * xi * xi - 4 * chi * chi));
      CHECK(uv.V == doctest::Approx(16 * xi * xi * (xi * xi - chi * chi)));
    }
}

TEST_CASE("no coupling: squeezing spectrum with the drive detuning") {
  for (double od : {0.0, 0.5, 1.5, 3.0}) {
    const DetuningParams p{od / 100.0, 0.004, 100.0};
    const auto ev = msa_eigenvalues_numeric(1.0, 0.0, p);
    const cd want = std::sqrt(cd(4.0 - od * od));
    double best = 1e300;
    for (const auto& l : ev) best = std::min(best, std::abs(l - want));
    CHECK(best < 1e-12);
  }
  const auto pure = msa_eigenvalues(0.7, 0.0, {0.0, 0.0, 1.0});
  CHECK(std::abs(pure[0] - cd(1.4)) < 1e-12);
  CHECK(std::abs(pure[3] - cd(-1.4)) < 1e-12);
}

TEST_CASE("analytic and numeric growth rates agree") {
  const DetuningParams p{0.005, 0.0, 100.0};
  const auto a = msa_eigenvalues(1.0, 0.01, p);
  const auto n = msa_eigenvalues_numeric(1.0, 0.01, p);
  CHECK(std::abs(a[0].real() - n[0].real()) < 1e-10);
  CHECK(std::abs(max_growth_rate(1.0, 0.01, p) - n[0].real()) == 0.0);
}

TEST_CASE("analytic eigenvalues on a grid") {
  int points = 0;
  double worst = 0.0;
  for (double xi : {0.3, 1.0})
    for (double chi : {0.0, 0.05, 0.4, 0.8, 1.7})
      for (double od : oracle::linspace(-2.5, 2.5, 10))
        for (double oD : oracle::linspace(-4.0, 4.0, 10)) {
          const DetuningParams p{od / 100.0, oD / 100.0, 100.0};
          const auto a = msa_eigenvalues(xi, chi, p);
          const auto n = msa_eigenvalues_numeric(xi, chi, p);
          double scale = 1.0;
          for (const auto& l : n) scale = std::max(scale, std::abs(l));
          for (int i = 0; i < 4; ++i) {
            worst = std::max(worst, std::abs(a[i] - n[i]) / scale);
            CHECK(std::abs(std::abs(a[i]) - std::abs(n[i])) < 1e-9 * scale);
          }
          ++points;
        }
  CHECK(points == 1000);
  CAPTURE(worst);
  CHECK(worst < 1e-6);
}

TEST_CASE("spectra come in plus-minus pairs") {
  for (double chi : {0.0, 0.3, 2.0})
    for (double od : {0.0, 0.7, 2.2}) {
      const DetuningParams p{od / 50.0, 0.01, 50.0};
      auto ev = eig(msa_matrix(1.0, chi, p));
      std::vector<cd> neg;
      for (const auto& l : ev) neg.push_back(-l);
      CHECK(spectral_distance(ev, neg) < 1e-10 * 4.0);
      auto em = eig(msa_coefficient_matrix(-1.3, 0.4, 0.2, 0.1 * od, 0.05));
      std::vector<cd> mneg;
      for (const auto& l : em) mneg.push_back(-l);
      CHECK(spectral_distance(em, mneg) < 1e-10 * 4.0);
    }
}

TEST_CASE("oscillatory regime at zero detuning has no real eigenvalue") {
  for (double chi : {1.0 + 1e-6, 1.5, 11.0}) {
    for (const auto& l : msa_eigenvalues_numeric(1.0, chi, {0.0, 0.0, 10.0}))
      CHECK(std::abs(l.imag()) > 1e-4);
    const auto t = growth_threshold(1.0, chi, 10.0, 0.0);
    CHECK_FALSE(t.growth_at_zero);
    CHECK_FALSE(t.delta_c.has_value());
  }
}

TEST_CASE("threshold") {
  const auto ideal = growth_threshold(1.0, 0.0, 1000.0, 0.0);
  REQUIRE(ideal.delta_c);
  CHECK(rel_err(*ideal.delta_c, 0.002) < 1e-9);
  CHECK(ideal.ideal == 0.002);
  CHECK(rel_err(ideal.analytic_bound, 0.002) < 1e-14);

  for (double Delta : {-0.02, -0.01, 0.0, 0.02, 0.03}) {
    const auto t = growth_threshold(1.0, 0.01, 1000.0, Delta);
    REQUIRE(t.delta_c);
    CAPTURE(Delta);
    CHECK(rel_err(*t.delta_c, t.ideal) < 0.01);
    CHECK(rel_err(*t.delta_c, t.analytic_bound) < 1e-4);
    const auto fine = growth_threshold(1.0, 0.01, 1000.0, Delta, 8000);
    CHECK(rel_err(*fine.delta_c, *t.delta_c) < 1e-6);
  }
}

// Where the detuned L and R frequencies cross, the coupling opens a narrow
// band of growth beyond 2 xi / Omega_L; the leading-order bound is singular there.
TEST_CASE("collision band") {
  const double xi = 1.0, chi = 0.01, O = 1000.0, Delta = 0.012;
  const double D = O * Delta;
  const double x = (6.0 * D - std::sqrt(4.0 * D * D - 128.0 * xi * xi)) / 16.0;
  const double d = x / O;
  CHECK(std::abs(O * O * (3 * d - Delta) * (3 * d - Delta) - (O * O * d * d - 4 * xi * xi)) < 1e-9);
  CHECK(max_growth_rate(xi, chi, {d, Delta, O}) > 1e-3);
  CHECK(max_growth_rate(xi, chi, {d * 1.01, Delta, O}) < 1e-9);
  const auto t = growth_threshold(xi, chi, O, Delta);
  REQUIRE(t.delta_c);
  CHECK(*t.delta_c > 1.5 * t.ideal);
  CHECK(std::abs(*t.delta_c - d) < 1e-3 * d);
}

TEST_CASE("ideal threshold from the drive amplitude") {
  const CavityConfig cube{0.0, 0.01, 0.01 * (1 + std::sqrt(2.0)), 0.01, 0.01,
                          std::numeric_limits<double>::infinity()};
  const Mode L = fundamental_mode(cube);
  const double eps = 1e-8;
  const double xi = squeezing_parameter(cube, DriveConfig{eps, 0.0, 0.0});
  const auto t = growth_threshold(xi, 0.0, L.omega_total, 0.0);
  const double drive_form = ideal_threshold_from_drive(eps, L.omega_total, L.omega_x);
  CHECK(rel_err(drive_form, eps / 6.0) < 1e-12);
  CHECK(rel_err(t.ideal, drive_form) < 1e-12);
  REQUIRE(t.delta_c);
  CHECK(rel_err(*t.delta_c, drive_form) < 1e-8);
}

TEST_CASE("coupling coefficients") {
  const auto base = coupling_coefficients(10.0, 5.0, -2.0, 1.0, 0.03, 0.0, 0.0);
  CHECK(base.g_LR == -0.03);
  CHECK(rel_err(base.gamma2, 2 * 10.0 * base.g_LR) < 1e-15);
  CHECK(rel_err(base.gamma3, 2.0 / 3.0 * 10.0 * base.g_LR) < 1e-15);
  CHECK(rel_err(base.gamma2 / base.gamma3, 3.0) < 1e-15);
  CHECK(base.gamma1_approx == -0.5 * 25.0 / 10.0);

  const auto off = coupling_coefficients(10.0, 5.0, -2.0, 1.0, 0.03, 0.2, -0.1);
  CHECK(rel_err(off.gamma2, (20.2) * (20.0 - 0.1 - 0.1) / 20.0 * off.g_LR) < 1e-14);
  CHECK(rel_err(off.gamma3, off.gamma2 / 3.0) < 0.02);

  const auto none = coupling_coefficients(10.0, 5.0, -2.0, 1.0, 0.0, 0.1, 0.1);
  CHECK(none.gamma2 == 0.0);
  CHECK(none.gamma3 == 0.0);

  const CavityConfig cube{0.0, 1.0, 1.0 + std::sqrt(2.0), 1.0, 1.0, std::numeric_limits<double>::infinity()};
  const auto c = coupling_coefficients(cube, 0.0, 0.0);
  const double w = fundamental_mode(cube).omega_total;
  CHECK(rel_err(c.gamma1, -w / 6.0) < 1e-12);
  CHECK(rel_err(c.gamma1_approx, -w / 6.0) < 1e-12);
  CHECK(c.g_LR == 0.0);

  const CavityConfig leaky{0.0, 0.01, 5.012857142857143, 0.02219, 0.02219, 1e6};
  const auto lc = coupling_coefficients(leaky, 0.0, 0.0);
  CHECK(rel_err(lc.gamma1, lc.gamma1_approx) < 1e-3);
  CHECK(lc.g_LR != 0.0);
}

TEST_CASE("length derivative against finite differences") {
  const CavityConfig cav{0.0, 1.0, 1.0 + std::sqrt(2.0), 1.0, 1.0, 50.0};
  const double h = 1e-6;
  CavityConfig lo = cav, hi = cav;
  lo.a0 += h;   // shorter left region
  hi.a0 -= h;
  const double fd = (fundamental_mode(hi).omega_total - fundamental_mode(lo).omega_total) / (2 * h);
  CHECK(rel_err(fundamental_length_derivative(cav), fd) < 1e-7);
}

TEST_CASE("coefficient matrix in multiple-scale variables") {
  const auto pure = eig(msa_coefficient_matrix(0.8, 0.0, 0.0, 0.0, 0.0));
  CHECK(spectral_distance(pure, {0.8, -0.8, 0.0, 0.0}) < 1e-14);

  int agree = 0, total = 0;
  for (double chi : {0.0, 0.01, 0.3, 0.9, 1.4})
    for (double od : oracle::linspace(0.0, 3.0, 5))
      for (double oD : oracle::linspace(-2.0, 2.0, 4)) {
        const DetuningParams p{od / 100.0, oD / 100.0, 100.0};
        const double eps = 1e-3;
        const double ga = max_growth_rate(1.0, chi, p);
        const double gm = max_real(eig(eps * msa_coefficient_matrix_from_effective(1.0, chi, p, eps)));
        CHECK(std::abs(ga - gm) < 1e-9);
        agree += ((ga > 1e-7) == (gm > 1e-7));
        ++total;
      }
  CHECK(total == 100);
  CHECK(agree == total);
}

TEST_CASE("detuned evolution") {
  for (double chi : {0.3, 2.0}) {
    const auto d = detuned_occupations(1.0, chi, {0.0, 0.0, 100.0}, 1.2, 3.0, 1.5);
    const auto f = full_occupations(1.0, chi, 1.2, 3.0, 1.5);
    CHECK(rel_err(d[0], f.n_L) < 1e-11);
    CHECK(rel_err(d[1], f.n_R) < 1e-11);
  }
  // Beyond threshold the squeezing no longer wins: bounded occupation.
  const auto beyond = detuned_occupations(1.0, 0.0, {0.05, 0.0, 100.0}, 20.0, 0.0, 0.0);
  CHECK(beyond[0] < 1.0);
}
