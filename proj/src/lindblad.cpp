#include "leakycav/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "leakycav/errors.hpp"

namespace leakycav {

namespace {

// sinh(x)/x
double shc(double x) { return x == 0.0 ? 1.0 : std::sinh(x) / x; }

// (sinh(y) - y)/y^3
double gc(double y) {
  if (std::abs(y) < 0.1) {
    const double y2 = y * y;
    return 1.0 / 6.0 + y2 * (1.0 / 120.0 + y2 * (1.0 / 5040.0 + y2 / 362880.0));
  }
  return (std::sinh(y) - y) / (y * y * y);
}

void check_inputs(double xi, double chi, double n_R0) {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw ValidationError("xi must be finite and >= 0");
  if (!std::isfinite(chi)) throw ValidationError("chi must be finite");
  if (!(n_R0 >= 0.0) || !std::isfinite(n_R0)) throw ValidationError("n_R0 must be finite and >= 0");
}

void check_cutoff(const Eigen::MatrixXcd& rho) {
  const Eigen::Index d = rho.rows();
  if (d < 3 || rho.cols() != d) throw ValidationError("density matrix must be square with cutoff >= 3");
  const double top = rho(d - 1, d - 1).real() + rho(d - 2, d - 2).real();
  if (top > 1e-8)
    throw NumericError("cutoff too small: population in the top two Fock levels is " +
                       std::to_string(top));
}

using State = std::vector<double>;

void pack(const Eigen::MatrixXcd& m, State& x) {
  const Eigen::Index n = m.size();
  x.resize(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x[k] = m.data()[k].real();
    x[n + k] = m.data()[k].imag();
  }
}

void unpack(const State& x, Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.size();
  for (Eigen::Index k = 0; k < n; ++k) m.data()[k] = {x[k], x[n + k]};
}

struct MasterRhs {
  double xi, chi, n_R0;
  Eigen::Index d;
  mutable Eigen::MatrixXcd rho, out;

  void operator()(const State& x, State& dxdt, double t) const {
    rho.resize(d, d);
    unpack(x, rho);
    out = master_generator(rho, master_coefficients(xi, chi, n_R0, t));
    pack(out, dxdt);
  }
};

using Stepper = boost::numeric::odeint::runge_kutta_dopri5<State>;

}  // namespace

double TruncatedDensity::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double thermal_tail(double n0, int cutoff) {
  if (n0 <= 0.0) return 0.0;
  const double q = n0 / (n0 + 1.0);
  return std::pow(q, cutoff);
}

TruncatedDensity thermal_density(double n0, int cutoff, double tail_tol) {
  if (!(n0 >= 0.0) || !std::isfinite(n0)) throw ValidationError("occupation must be finite and >= 0");
  if (cutoff < 1) throw ValidationError("cutoff must be >= 1");
  const double tail = thermal_tail(n0, cutoff);
  if (tail > tail_tol)
    throw NumericError("cutoff too small: thermal tail " + std::to_string(tail) + " beyond " +
                       std::to_string(cutoff) + " levels");
  TruncatedDensity r{Eigen::MatrixXcd::Zero(cutoff, cutoff)};
  const double q = n0 / (n0 + 1.0);
  double p = 1.0 / (n0 + 1.0);
  for (int k = 0; k < cutoff; ++k) {
    r.matrix(k, k) = p;
    p *= q;
  }
  return r;
}

int choose_cutoff(double n0, double tail_tol, int margin) {
  if (!(n0 >= 0.0) || !std::isfinite(n0)) throw ValidationError("occupation must be finite and >= 0");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ValidationError("tail_tol must lie in (0, 1)");
  int d = 1;
  if (n0 > 0.0) {
    const double q = n0 / (n0 + 1.0);
    d = static_cast<int>(std::ceil(std::log(tail_tol) / std::log(q)));
    while (thermal_tail(n0, d) > tail_tol) ++d;
  }
  return std::max(d, 1) + std::max(margin, 2);
}

std::array<double, 5> master_coefficients(double xi, double chi, double n_R0, double t) {
  check_inputs(xi, chi, n_R0);
  if (!(t >= 0.0)) throw ValidationError("t must be >= 0");
  const double N = n_R0;
  const double c2 = chi * chi;
  const double u = 2.0 * xi * t;
  const double C = std::cosh(u);
  const double sh_half = std::sinh(0.5 * u);
  const double Cm1 = 2.0 * sh_half * sh_half;
  const double shc_half = shc(0.5 * u);
  // p = chi^2/(2 xi); every product below is regular at xi = 0.
  const double pS = c2 * t * shc(u);
  const double pG = 3.0 * c2 * xi * t * t * shc(1.5 * u) * shc_half;
  const double pCCm1 = c2 * xi * t * t * C * shc_half * shc_half;
  const double pS2 = 2.0 * c2 * xi * t * t * shc(u) * shc(u);
  return {pS * ((2.0 * N + 1.0) * Cm1 + N), pS * ((2.0 * N + 1.0) * Cm1 + N + 1.0),
          pG * (2.0 * N + 1.0), pG * N + pCCm1, pG * N + pS2};
}

std::array<double, 5> integrated_coefficients(double xi, double chi, double n_R0, double T) {
  check_inputs(xi, chi, n_R0);
  if (!(T >= 0.0)) throw ValidationError("T must be >= 0");
  const double N = n_R0;
  const double c2 = chi * chi;
  const double y = 2.0 * xi * T;
  const double sh = std::sinh(xi * T);
  const double q = shc(xi * T) * shc(xi * T);
  const double w = shc(y) * q;
  const double F1 = 0.5 * c2 * T * T * q * ((2.0 * N + 1.0) * sh * sh + N);
  const double F2 = 0.5 * c2 * T * T * q * ((2.0 * N + 1.0) * sh * sh + N + 1.0);
  const double k = c2 * xi * T * T * T;
  const double F3 = k * (2.0 * N + 1.0) * w;
  const double F4 = k * (0.5 * (2.0 * N + 1.0) * w - gc(y));
  const double F5 = k * (N * w + 4.0 * gc(2.0 * y));
  return {F1, F2, F3, F4, F5};
}

Eigen::MatrixXcd master_generator(const Eigen::MatrixXcd& rho, const std::array<double, 5>& w) {
  const Eigen::Index d = rho.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  auto s = [](Eigen::Index k) { return std::sqrt(static_cast<double>(k)); };
  // (a a^+)_kk in the truncated basis
  auto aad = [d](Eigen::Index k) { return k + 1 < d ? static_cast<double>(k + 1) : 0.0; };
  for (Eigen::Index n = 0; n < d; ++n) {
    for (Eigen::Index m = 0; m < d; ++m) {
      const std::complex<double> r = rho(m, n);
      // 2 a^+ rho a - a a^+ rho - rho a a^+
      std::complex<double> l1 = -(aad(m) + aad(n)) * r;
      if (m > 0 && n > 0) l1 += 2.0 * s(m) * s(n) * rho(m - 1, n - 1);
      // 2 a rho a^+ - a^+ a rho - rho a^+ a
      std::complex<double> l2 = -static_cast<double>(m + n) * r;
      if (m + 1 < d && n + 1 < d) l2 += 2.0 * s(m + 1) * s(n + 1) * rho(m + 1, n + 1);
      // a^+ rho a^+ + a rho a
      std::complex<double> l3 = 0.0;
      if (m > 0 && n + 1 < d) l3 += s(m) * s(n + 1) * rho(m - 1, n + 1);
      if (m + 1 < d && n > 0) l3 += s(m + 1) * s(n) * rho(m + 1, n - 1);
      // a^+2 rho + rho a^2
      std::complex<double> l4 = 0.0;
      if (m > 1) l4 += s(m) * s(m - 1) * rho(m - 2, n);
      if (n > 1) l4 += s(n) * s(n - 1) * rho(m, n - 2);
      // a^2 rho + rho a^+2
      std::complex<double> l5 = 0.0;
      if (m + 2 < d) l5 += s(m + 1) * s(m + 2) * rho(m + 2, n);
      if (n + 2 < d) l5 += s(n + 1) * s(n + 2) * rho(m, n + 2);
      out(m, n) = w[0] * l1 + w[1] * l2 + w[2] * l3 - w[3] * l4 - w[4] * l5;
    }
  }
  return out;
}

TruncatedDensity rho_L_approx(const TruncatedDensity& rho0, const std::array<double, 5>& F) {
  check_cutoff(rho0.matrix);
  return {rho0.matrix + master_generator(rho0.matrix, F)};
}

double squeezed_number_expectation(const TruncatedDensity& rho, double xi, double T) {
  const Eigen::MatrixXcd& r = rho.matrix;
  const Eigen::Index d = r.rows();
  const double S = std::sinh(2.0 * xi * T);
  double n = 0.0, tr = 0.0, off = 0.0;
  for (Eigen::Index m = 0; m < d; ++m) {
    n += static_cast<double>(m) * r(m, m).real();
    tr += r(m, m).real();
    // Tr(a^+2 rho) + Tr(a^2 rho) = 2 Re sum sqrt((m+1)(m+2)) rho(m+2, m)
    if (m + 2 < d) off += 2.0 * std::sqrt(static_cast<double>((m + 1) * (m + 2))) * r(m + 2, m).real();
  }
  return (1.0 + 2.0 * S * S) * n + 0.5 * std::sinh(4.0 * xi * T) * off + S * S * tr;
}

MasterRun propagate_master_numeric(const TruncatedDensity& rho0, double xi, double chi, double n_R0,
                                   double T, int checkpoints, double rtol, double atol) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw ValidationError("T must be finite and >= 0");
  if (checkpoints < 1) throw ValidationError("checkpoints must be >= 1");
  std::vector<double> times(checkpoints + 1);
  for (int i = 0; i <= checkpoints; ++i) times[i] = T * i / checkpoints;
  times.back() = T;

  check_inputs(xi, chi, n_R0);
  check_cutoff(rho0.matrix);
  const Eigen::Index d = rho0.matrix.rows();
  MasterRhs rhs{xi, chi, n_R0, d, {}, {}};
  State x;
  pack(rho0.matrix, x);
  MasterRun run;
  auto stepper = boost::numeric::odeint::make_controlled(atol, rtol, Stepper());
  Eigen::MatrixXcd cur(d, d);
  for (int i = 1; i <= checkpoints; ++i) {
    const double t0 = times[i - 1], t1 = times[i];
    if (t1 > t0) {
      try {
        run.steps_taken += boost::numeric::odeint::integrate_adaptive(
            stepper, rhs, x, t0, t1, std::min(t1 - t0, 1e-3 * std::max(T, 1e-300)));
      } catch (const std::exception& e) {
        throw NumericError(std::string("master integration failed: ") + e.what());
      }
    }
    unpack(x, cur);
    const double lmin = TruncatedDensity{cur}.min_eigenvalue();
    run.checkpoints.push_back(t1);
    run.min_eigenvalues.push_back(lmin);
    if (lmin < -1e-6 && !run.first_positivity_failure) {
      run.first_positivity_failure = t1;
      run.valid = false;
    }
  }
  run.rho.matrix = cur;
  return run;
}

MasterSeries propagate_master_series(const TruncatedDensity& rho0, double xi, double chi,
                                     double n_R0, const std::vector<double>& times, double rtol,
                                     double atol) {
  check_inputs(xi, chi, n_R0);
  check_cutoff(rho0.matrix);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i]))
      throw ValidationError("times must be finite and >= 0");
    if (i > 0 && times[i] < times[i - 1]) throw ValidationError("times must be ascending");
  }
  const Eigen::Index d = rho0.matrix.rows();
  MasterRhs rhs{xi, chi, n_R0, d, {}, {}};
  State x;
  pack(rho0.matrix, x);
  auto stepper = boost::numeric::odeint::make_controlled(atol, rtol, Stepper());
  MasterSeries out;
  Eigen::MatrixXcd cur(d, d);
  double t = 0.0;
  const double span = times.empty() ? 1.0 : std::max(times.back(), 1e-300);
  for (double ti : times) {
    if (ti > t) {
      try {
        boost::numeric::odeint::integrate_adaptive(stepper, rhs, x, t, ti,
                                                   std::min(ti - t, 1e-3 * span));
      } catch (const std::exception& e) {
        throw NumericError(std::string("master integration failed: ") + e.what());
      }
      t = ti;
    }
    unpack(x, cur);
    TruncatedDensity r{cur};
    const double lmin = r.min_eigenvalue();
    out.times.push_back(ti);
    out.n_L.push_back(squeezed_number_expectation(r, xi, ti));
    out.trace.push_back(r.trace());
    out.min_eigenvalue.push_back(lmin);
    out.valid.push_back(lmin >= -1e-6);
    if (lmin < -1e-6 && !out.first_positivity_failure) out.first_positivity_failure = ti;
  }
  return out;
}

}  // namespace leakycav
