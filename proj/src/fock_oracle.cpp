#include "leakycav/fock_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <string>

#include "leakycav/errors.hpp"
#include "leakycav/lindblad.hpp"

namespace leakycav {

namespace {

using cd = std::complex<double>;

void check_cutoffs(int cutoff_L, int cutoff_R) {
  if (cutoff_L < 2 || cutoff_R < 2) throw ValidationError("cutoffs must be >= 2");
}

// Diagonal observables: N_L, N_R, top-two-level projectors.
struct Diagonals {
  Eigen::VectorXd nL, nR, topL, topR;
};

Diagonals diagonals(int dL, int dR) {
  const int n = dL * dR;
  Diagonals o{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int l = 0; l < dL; ++l) {
    for (int r = 0; r < dR; ++r) {
      const int k = l * dR + r;
      o.nL(k) = l;
      o.nR(k) = r;
      o.topL(k) = l >= dL - 2 ? 1.0 : 0.0;
      o.topR(k) = r >= dR - 2 ? 1.0 : 0.0;
    }
  }
  return o;
}

void finish(FockExpectations& e) {
  e.truncation_ok = e.top_population_L <= truncation_budget && e.top_population_R <= truncation_budget;
}

}  // namespace

Eigen::MatrixXd truncated_annihilator(int cutoff) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cutoff, cutoff);
  for (int k = 0; k + 1 < cutoff; ++k) a(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
  return a;
}

TwoModeOperator annihilator_L(int cutoff_L, int cutoff_R) {
  check_cutoffs(cutoff_L, cutoff_R);
  const Eigen::MatrixXd a = truncated_annihilator(cutoff_L);
  TwoModeOperator op{cutoff_L, cutoff_R, Eigen::MatrixXcd::Zero(cutoff_L * cutoff_R, cutoff_L * cutoff_R)};
  for (int l = 0; l + 1 < cutoff_L; ++l)
    for (int r = 0; r < cutoff_R; ++r) op.matrix(op.index(l, r), op.index(l + 1, r)) = a(l, l + 1);
  return op;
}

TwoModeOperator annihilator_R(int cutoff_L, int cutoff_R) {
  check_cutoffs(cutoff_L, cutoff_R);
  const Eigen::MatrixXd a = truncated_annihilator(cutoff_R);
  TwoModeOperator op{cutoff_L, cutoff_R, Eigen::MatrixXcd::Zero(cutoff_L * cutoff_R, cutoff_L * cutoff_R)};
  for (int l = 0; l < cutoff_L; ++l)
    for (int r = 0; r + 1 < cutoff_R; ++r) op.matrix(op.index(l, r), op.index(l, r + 1)) = a(r, r + 1);
  return op;
}

std::vector<Eigen::Triplet<cd>> heff_entries(double xi, double chi, int cutoff_L, int cutoff_R) {
  check_cutoffs(cutoff_L, cutoff_R);
  if (!std::isfinite(xi) || !std::isfinite(chi)) throw ValidationError("xi and chi must be finite");
  std::vector<Eigen::Triplet<cd>> e;
  const cd I(0.0, 1.0);
  auto idx = [cutoff_R](int l, int r) { return l * cutoff_R + r; };
  for (int l = 0; l < cutoff_L; ++l) {
    for (int r = 0; r < cutoff_R; ++r) {
      const int k = idx(l, r);
      // <l+2, r| i xi a_L^+2 |l, r> and its hermitian partner -i xi a_L^2
      if (l + 2 < cutoff_L && xi != 0.0) {
        const double f = std::sqrt(static_cast<double>((l + 1) * (l + 2)));
        e.emplace_back(idx(l + 2, r), k, I * xi * f);
        e.emplace_back(k, idx(l + 2, r), -I * xi * f);
      }
      // <l+1, r-1| i chi a_L^+ a_R |l, r>
      if (l + 1 < cutoff_L && r > 0 && chi != 0.0) {
        const double f = std::sqrt(static_cast<double>((l + 1) * r));
        e.emplace_back(idx(l + 1, r - 1), k, I * chi * f);
        e.emplace_back(k, idx(l + 1, r - 1), -I * chi * f);
      }
    }
  }
  return e;
}

TwoModeOperator build_heff(double xi, double chi, int cutoff_L, int cutoff_R) {
  TwoModeOperator H{cutoff_L, cutoff_R, Eigen::MatrixXcd::Zero(cutoff_L * cutoff_R, cutoff_L * cutoff_R)};
  for (const auto& t : heff_entries(xi, chi, cutoff_L, cutoff_R)) H.matrix(t.row(), t.col()) += t.value();
  return H;
}

Eigen::SparseMatrix<cd> build_heff_sparse(double xi, double chi, int cutoff_L, int cutoff_R) {
  const auto e = heff_entries(xi, chi, cutoff_L, cutoff_R);
  Eigen::SparseMatrix<cd> H(cutoff_L * cutoff_R, cutoff_L * cutoff_R);
  H.setFromTriplets(e.begin(), e.end());
  return H;
}

Eigen::VectorXd thermal_two_mode_weights(double n_L0, double n_R0, int cutoff_L, int cutoff_R,
                                         double tail_tol) {
  check_cutoffs(cutoff_L, cutoff_R);
  const TruncatedDensity rl = thermal_density(n_L0, cutoff_L, tail_tol);
  const TruncatedDensity rr = thermal_density(n_R0, cutoff_R, tail_tol);
  Eigen::VectorXd w(cutoff_L * cutoff_R);
  for (int l = 0; l < cutoff_L; ++l)
    for (int r = 0; r < cutoff_R; ++r) w(l * cutoff_R + r) = rl.matrix(l, l).real() * rr.matrix(r, r).real();
  return w;
}

FockEvolver::FockEvolver(const TwoModeOperator& H, const Eigen::VectorXd& rho0_diagonal)
    : cutoff_L_(H.cutoff_L), cutoff_R_(H.cutoff_R) {
  const int n = H.dim();
  if (rho0_diagonal.size() != n) throw ValidationError("initial state dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition of H_eff failed");
  lambda_ = es.eigenvalues();
  V_ = es.eigenvectors();
  // rho~ = V^+ rho0 V ; X~ = V^+ X V ; W = rho~ o X~^T so that
  // <X>(T) = phi^T W conj(phi), phi_a = exp(-i lambda_a T).
  const Eigen::MatrixXcd rho_t = V_.adjoint() * rho0_diagonal.asDiagonal() * V_;
  const Diagonals d = diagonals(cutoff_L_, cutoff_R_);
  auto weight = [&](const Eigen::VectorXd& x) -> Eigen::MatrixXcd {
    const Eigen::MatrixXcd xt = V_.adjoint() * x.asDiagonal() * V_;
    return rho_t.cwiseProduct(xt.transpose());
  };
  w_nL_ = weight(d.nL);
  w_nR_ = weight(d.nR);
  w_topL_ = weight(d.topL);
  w_topR_ = weight(d.topR);
}

FockExpectations FockEvolver::at(double T) const {
  const Eigen::VectorXcd phi = (lambda_.cast<cd>() * cd(0.0, -T)).array().exp();
  const Eigen::VectorXcd phic = phi.conjugate();
  auto val = [&](const Eigen::MatrixXcd& w) { return (phi.transpose() * (w * phic)).value().real(); };
  FockExpectations e;
  e.n_L = val(w_nL_);
  e.n_R = val(w_nR_);
  e.top_population_L = val(w_topL_);
  e.top_population_R = val(w_topR_);
  finish(e);
  return e;
}

Eigen::MatrixXcd FockEvolver::propagator(double T) const {
  const Eigen::VectorXcd phi = (lambda_.cast<cd>() * cd(0.0, -T)).array().exp();
  return V_ * phi.asDiagonal() * V_.adjoint();
}

FockExpectations evolve_expectations(const TwoModeOperator& H, const Eigen::VectorXd& rho0_diagonal,
                                     double T) {
  const FockExpectations e = FockEvolver(H, rho0_diagonal).at(T);
  if (!e.truncation_ok)
    throw NumericError("Fock truncation budget exceeded: top-level population " +
                       std::to_string(std::max(e.top_population_L, e.top_population_R)));
  return e;
}

std::vector<FockExpectations> evolve_series(double xi, double chi, int cutoff_L, int cutoff_R,
                                            const Eigen::VectorXd& rho0_diagonal,
                                            const std::vector<double>& times) {
  if (cutoff_L * cutoff_R > dense_dimension_limit)
    return evolve_series_stepping(build_heff_sparse(xi, chi, cutoff_L, cutoff_R), cutoff_L, cutoff_R,
                                  rho0_diagonal, times);
  const FockEvolver ev(build_heff(xi, chi, cutoff_L, cutoff_R), rho0_diagonal);
  std::vector<FockExpectations> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(ev.at(t));
  return out;
}

std::vector<FockExpectations> evolve_series_stepping(const Eigen::SparseMatrix<cd>& Hs, int cutoff_L,
                                                     int cutoff_R, const Eigen::VectorXd& rho0_diagonal,
                                                     const std::vector<double>& times, double rtol,
                                                     double atol) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<cd>;
  check_cutoffs(cutoff_L, cutoff_R);
  const int n = cutoff_L * cutoff_R;
  if (Hs.rows() != n || Hs.cols() != n) throw ValidationError("operator dimension mismatch");
  if (rho0_diagonal.size() != n) throw ValidationError("initial state dimension mismatch");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1]) throw ValidationError("times must be ascending");
  const Diagonals d = diagonals(cutoff_L, cutoff_R);
  std::vector<FockExpectations> out(times.size());
  auto rhs = [&Hs, n](const State& psi, State& dpsi, double) {
    Eigen::Map<const Eigen::VectorXcd> p(psi.data(), n);
    Eigen::Map<Eigen::VectorXcd> dp(dpsi.data(), n);
    dp = cd(0.0, -1.0) * (Hs * p);
  };
  const double span = times.empty() ? 1.0 : std::max(std::abs(times.back()), 1e-300);
  for (int k = 0; k < n; ++k) {
    const double p = rho0_diagonal(k);
    if (p < 1e-14) continue;
    State psi(n, cd(0.0));
    psi[k] = 1.0;
    auto stepper = ode::make_controlled(atol, rtol, ode::runge_kutta_dopri5<State>());
    double t = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] > t) {
        try {
          ode::integrate_adaptive(stepper, rhs, psi, t, times[i], std::min(times[i] - t, 1e-3 * span));
        } catch (const std::exception& e) {
          throw NumericError(std::string("Fock stepping failed: ") + e.what());
        }
        t = times[i];
      }
      for (int j = 0; j < n; ++j) {
        const double a2 = p * std::norm(psi[j]);
        out[i].n_L += a2 * d.nL(j);
        out[i].n_R += a2 * d.nR(j);
        out[i].top_population_L += a2 * d.topL(j);
        out[i].top_population_R += a2 * d.topR(j);
      }
    }
  }
  for (auto& e : out) finish(e);
  return out;
}

}  // namespace leakycav
