#include <doctest.h>

#include <cmath>
#include <complex>

#include "leakycav/errors.hpp"
#include "leakycav/fock_oracle.hpp"
#include "leakycav/propagator.hpp"
#include "oracles/support.hpp"

using namespace leakycav;
using oracle::rel_err;
using cd = std::complex<double>;

TEST_CASE("Hamiltonian structure") {
  CHECK(build_heff(0.0, 0.0, 5, 4).matrix.cwiseAbs().maxCoeff() == 0.0);

  const auto H = build_heff(1.0, 0.5, 6, 6);
  CHECK((H.matrix - H.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  for (int l = 0; l < 6; ++l)
    for (int r = 0; r < 6; ++r) {
      const int col = H.index(l, r);
      if (l + 2 < 6) CHECK(std::abs(H.matrix(H.index(l + 2, r), col) - cd(0, std::sqrt((l + 1.0) * (l + 2)))) < 1e-14);
      if (l >= 2) CHECK(std::abs(H.matrix(H.index(l - 2, r), col) - cd(0, -std::sqrt(l * (l - 1.0)))) < 1e-14);
      if (l + 1 < 6 && r >= 1)
        CHECK(std::abs(H.matrix(H.index(l + 1, r - 1), col) - cd(0, 0.5 * std::sqrt((l + 1.0) * r))) < 1e-14);
      if (l >= 1 && r + 1 < 6)
        CHECK(std::abs(H.matrix(H.index(l - 1, r + 1), col) - cd(0, -0.5 * std::sqrt(l * (r + 1.0)))) < 1e-14);
    }

  const auto H0 = build_heff(0.7, 0.0, 6, 5);
  for (int i = 0; i < H0.dim(); ++i)
    for (int j = 0; j < H0.dim(); ++j)
      if (i % 5 != j % 5) CHECK(H0.matrix(i, j) == cd(0, 0));

  const auto sparse = build_heff_sparse(1.0, 0.5, 6, 6);
  CHECK((Eigen::MatrixXcd(sparse) - H.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ladder operators") {
  const int d = 8;
  const Eigen::MatrixXd a = truncated_annihilator(d);
  const Eigen::MatrixXd comm = a * a.transpose() - a.transpose() * a;
  for (int k = 0; k < d - 1; ++k) CHECK(comm(k, k) == doctest::Approx(1.0));
  const auto aL = annihilator_L(4, 3);
  const auto aR = annihilator_R(4, 3);
  CHECK((aL.matrix * aR.matrix - aR.matrix * aL.matrix).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("evolution basics") {
  const auto H = build_heff(0.1, 0.03, 40, 20);
  const Eigen::VectorXd w = thermal_two_mode_weights(0.5, 0.2, 40, 20);
  const auto e0 = evolve_expectations(H, w, 0.0);
  CHECK(std::abs(e0.n_L - 0.5) < 1e-8);
  CHECK(std::abs(e0.n_R - 0.2) < 1e-8);

  const auto H1 = build_heff(0.1, 0.0, 60, 4);
  Eigen::VectorXd vac = Eigen::VectorXd::Zero(H1.dim());
  vac(0) = 1.0;
  const double S = std::sinh(0.2);
  CHECK(std::abs(evolve_expectations(H1, vac, 1.0).n_L - S * S) < 1e-6);
}

TEST_CASE("agreement with the closed forms") {
  const auto H = build_heff(0.1, 0.03, 40, 20);
  for (auto occ : {std::pair{0.0, 0.0}, std::pair{0.5, 0.2}}) {
    const Eigen::VectorXd w = thermal_two_mode_weights(occ.first, occ.second, 40, 20);
    FockEvolver ev(H, w);
    for (double T : oracle::linspace(0.0, 2.0, 9)) {
      const auto e = ev.at(T);
      const auto full = full_occupations(0.1, 0.03, T, occ.first, occ.second);
      CHECK(e.truncation_ok);
      if (full.n_L > 0) CHECK(rel_err(e.n_L, full.n_L) < 1e-3);
      if (full.n_R > 0) CHECK(rel_err(e.n_R, full.n_R) < 1e-3);
    }
  }
}

TEST_CASE("invariants of the evolution") {
  const auto H = build_heff(0.1, 0.05, 30, 12);
  Eigen::VectorXd rho0 = Eigen::VectorXd::Zero(H.dim());
  rho0(0) = 1.0;
  FockEvolver ev(H, rho0);
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(H.dim());
  psi0(H.index(0, 0)) = 1.0 / std::sqrt(2.0);
  psi0(H.index(2, 1)) = cd(0.0, 1.0 / std::sqrt(2.0));
  const double e0 = (psi0.adjoint() * H.matrix * psi0)(0, 0).real();
  for (double T : {0.5, 1.0, 2.0}) {
    const Eigen::MatrixXcd U = ev.propagator(T);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(H.dim(), H.dim());
    CHECK((U.adjoint() * U - id).cwiseAbs().maxCoeff() < 1e-9);
    const Eigen::VectorXcd psi = U * psi0;
    CHECK(std::abs((psi.adjoint() * H.matrix * psi)(0, 0).real() - e0) < 1e-9);
  }

  const auto hop = build_heff(0.0, 0.4, 12, 12);
  const Eigen::VectorXd w = thermal_two_mode_weights(1.0, 0.3, 12, 12, 1e-2);
  FockEvolver hev(hop, w);
  const auto start = hev.at(0.0);
  for (double T : {0.5, 3.0, 7.0}) {
    const auto e = hev.at(T);
    CHECK(std::abs(e.n_L + e.n_R - start.n_L - start.n_R) < 1e-8);
  }
}

TEST_CASE("truncation budget") {
  const auto H = build_heff(1.0, 0.1, 10, 4);
  Eigen::VectorXd rho0 = Eigen::VectorXd::Zero(H.dim());
  rho0(0) = 1.0;
  CHECK_THROWS_AS(evolve_expectations(H, rho0, 2.0), NumericError);
  const auto series = evolve_series(1.0, 0.1, 10, 4, rho0, {0.0, 2.0});
  CHECK(series[0].truncation_ok);
  CHECK_FALSE(series[1].truncation_ok);
  CHECK_THROWS_AS(thermal_two_mode_weights(5.0, 0.0, 10, 4), NumericError);
}

TEST_CASE("stepping route agrees with the spectral route") {
  const Eigen::VectorXd w = thermal_two_mode_weights(0.5, 0.2, 24, 12);
  const std::vector<double> times{0.0, 0.7, 1.5};
  const auto spectral = evolve_series(0.1, 0.03, 24, 12, w, times);
  const auto stepped = evolve_series_stepping(build_heff_sparse(0.1, 0.03, 24, 12), 24, 12, w, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(std::abs(spectral[i].n_L - stepped[i].n_L) < 1e-8);
    CHECK(std::abs(spectral[i].n_R - stepped[i].n_R) < 1e-8);
  }
}
