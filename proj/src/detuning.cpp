#include "leakycav/detuning.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "leakycav/errors.hpp"
#include "leakycav/expm.hpp"
#include "leakycav/propagator.hpp"

namespace leakycav {

namespace {

using cd = std::complex<double>;
const double sqrt3 = std::sqrt(3.0);

void check(double xi, double chi, const DetuningParams& p) {
  if (!std::isfinite(xi) || !std::isfinite(chi) || !std::isfinite(p.delta) ||
      !std::isfinite(p.Delta) || !std::isfinite(p.omega_L))
    throw ValidationError("detuning inputs must be finite");
  if (!(p.omega_L > 0.0)) throw ValidationError("omega_L must be > 0");
}

bool desc(const cd& a, const cd& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

}  // namespace

std::vector<std::string> detuning_warnings(const DetuningParams& p) {
  std::vector<std::string> w;
  if (std::abs(p.delta) > 0.1) w.emplace_back("|delta| > 0.1: multiple-scale expansion unreliable");
  if (std::abs(p.Delta) > 0.1) w.emplace_back("|Delta| > 0.1: multiple-scale expansion unreliable");
  return w;
}

Eigen::Matrix4cd msa_matrix(double xi, double chi, const DetuningParams& p) {
  check(xi, chi, p);
  const cd I(0.0, 1.0);
  const double od = p.omega_L * p.delta;
  const double orr = p.omega_L * (3.0 * p.delta - p.Delta);
  Eigen::Matrix4cd A = Eigen::Matrix4cd::Zero();
  A(0, 0) = I * od;
  A(0, 1) = 2.0 * xi;
  A(0, 2) = sqrt3 * chi;
  A(1, 0) = 2.0 * xi;
  A(1, 1) = -I * od;
  A(1, 3) = sqrt3 * chi;
  A(2, 0) = -chi / sqrt3;
  A(2, 2) = I * orr;
  A(3, 1) = -chi / sqrt3;
  A(3, 3) = -I * orr;
  return A;
}

UV uv_quantities(double xi, double chi, const DetuningParams& p) {
  check(xi, chi, p);
  const double x2 = xi * xi, c2 = chi * chi;
  const double O2 = p.omega_L * p.omega_L;
  const double d = p.delta, D = p.Delta;
  UV r;
  r.U = 8.0 * x2 - 4.0 * c2 + 12.0 * O2 * d * D - 2.0 * O2 * D * D - 20.0 * O2 * d * d;
  r.V = 16.0 * x2 * (x2 - c2) + 64.0 * O2 * d * d * (x2 + c2 + O2 * d * d) +
        O2 * D * D * (8.0 * x2 + 4.0 * c2 + 52.0 * O2 * d * d + O2 * D * D) -
        4.0 * O2 * d * D * (12.0 * x2 + 8.0 * c2 + 24.0 * O2 * d * d + 3.0 * O2 * D * D);
  return r;
}

std::array<cd, 4> msa_eigenvalues_numeric(double xi, double chi, const DetuningParams& p) {
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(msa_matrix(xi, chi, p), false);
  if (es.info() != Eigen::Success) throw NumericError("eigensolve of the detuned matrix failed");
  std::array<cd, 4> ev;
  for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()(i);
  std::sort(ev.begin(), ev.end(), desc);
  return ev;
}

std::array<cd, 4> msa_eigenvalues(double xi, double chi, const DetuningParams& p) {
  const UV uv = uv_quantities(xi, chi, p);
  const cd s = std::sqrt(cd(uv.V, 0.0));
  const cd r1 = 0.5 * std::sqrt(cd(uv.U, 0.0) + 2.0 * s);
  const cd r2 = 0.5 * std::sqrt(cd(uv.U, 0.0) - 2.0 * s);
  std::array<cd, 4> cand{r1, -r1, r2, -r2};
  // Align with the eigensolver output so both lists share one ordering.
  const std::array<cd, 4> num = msa_eigenvalues_numeric(xi, chi, p);
  std::array<cd, 4> out{};
  std::array<bool, 4> used{};
  for (int i = 0; i < 4; ++i) {
    int best = -1;
    double bd = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (used[j]) continue;
      const double dist = std::abs(cand[j] - num[i]);
      if (best < 0 || dist < bd) {
        best = j;
        bd = dist;
      }
    }
    used[best] = true;
    out[i] = cand[best];
  }
  return out;
}

double max_growth_rate(double xi, double chi, const DetuningParams& p) {
  return msa_eigenvalues_numeric(xi, chi, p)[0].real();
}

double analytic_threshold(double xi, double chi, double omega_L, double Delta) {
  const double O2 = omega_L * omega_L;
  double d = 2.0 * xi / omega_L;
  for (int it = 0; it < 200; ++it) {
    const double den = 4.0 * xi * xi - O2 * d * d + O2 * (3.0 * d - Delta) * (3.0 * d - Delta);
    const double num = 4.0 * xi * xi + O2 * d * Delta - 4.0 * O2 * d * d;
    const double rhs = 4.0 * xi * xi - (den != 0.0 ? 2.0 * chi * chi * num / den : 0.0);
    const double next = std::sqrt(std::max(rhs, 0.0)) / omega_L;
    if (std::abs(next - d) <= 1e-15 * std::max(d, 1e-300)) return next;
    d = next;
  }
  return d;
}

double ideal_threshold_from_drive(double epsilon, double omega_L, double omega_Lx) {
  const double r = omega_Lx / omega_L;
  return 0.5 * r * r * epsilon;
}

ThresholdResult growth_threshold(double xi, double chi, double omega_L, double Delta,
                                 int scan_points) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw ValidationError("xi must be > 0");
  if (!(chi >= 0.0) || !std::isfinite(chi)) throw ValidationError("chi must be >= 0");
  if (!(omega_L > 0.0)) throw ValidationError("omega_L must be > 0");
  if (scan_points < 10) throw ValidationError("scan_points must be >= 10");
  ThresholdResult r;
  r.ideal = 2.0 * xi / omega_L;
  r.analytic_bound = analytic_threshold(xi, chi, omega_L, Delta);
  r.growth_at_zero = chi < xi;
  if (!r.growth_at_zero) return r;

  // Near the threshold the eigenvalues coalesce and the eigensolver's real
  // parts carry O(sqrt(eps)) noise; demand a margin above it.
  const double tol = 1e-7 * std::max(xi, chi);
  auto grows = [&](double d) {
    return max_growth_rate(xi, chi, DetuningParams{d, Delta, omega_L}) > tol;
  };
  const double dmax = 4.0 * (xi + chi) / omega_L;
  int last = -1;
  for (int i = 0; i <= scan_points; ++i)
    if (grows(dmax * i / scan_points)) last = i;
  if (last < 0) return r;
  if (last == scan_points) {
    r.delta_c = dmax;
    return r;
  }
  double lo = dmax * last / scan_points, hi = dmax * (last + 1) / scan_points;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (grows(mid) ? lo : hi) = mid;
  }
  r.delta_c = lo;
  return r;
}

double fundamental_length_derivative(const CavityConfig& cavity) {
  const Mode m = fundamental_mode(cavity);
  const double W = m.omega_x;
  const double l1 = cavity.left_length(), l2 = cavity.right_length();
  double dW;
  if (std::isinf(cavity.gamma)) {
    dW = -W / l1;
  } else {
    const double s1 = std::sin(W * l1), s2 = std::sin(W * l2);
    dW = -W / (l1 + l2 * (s1 * s1) / (s2 * s2) + 2.0 * cavity.gamma * s1 * s1 / (W * W));
  }
  return W / m.omega_total * dW;
}

CouplingCoefficients coupling_coefficients(double omega_L, double omega_Lx, double dOmega_dL,
                                           double left_length, double m_LR, double h, double H) {
  CouplingCoefficients c;
  const double O = omega_L;
  c.g_LR = -left_length * m_LR;
  c.gamma1 = 0.5 * left_length * dOmega_dL;
  c.gamma1_approx = -0.5 * omega_Lx * omega_Lx / O;
  c.gamma2 = (2.0 * O + h) * (2.0 * O + H - 0.5 * h) / (2.0 * O) * c.g_LR;
  c.gamma2_approx = 2.0 * O * c.g_LR;
  c.gamma3 = (2.0 * O + h) * (2.0 * O + 0.5 * h) / (2.0 * (3.0 * O + H)) * c.g_LR;
  c.gamma3_approx = 2.0 / 3.0 * O * c.g_LR;
  return c;
}

CouplingCoefficients coupling_coefficients(const CavityConfig& cavity, double h, double H) {
  validate(cavity);
  const Mode left = fundamental_mode(cavity);
  // Right-dominated partner with ny = nz = 1 closest to 3 Omega_L.
  const double ky = M_PI / cavity.dy, kz = M_PI / cavity.dz;
  const double target = 3.0 * left.omega_total;
  const double wmax2 = 1.21 * target * target - ky * ky - kz * kz;
  double m_LR = 0.0;
  if (wmax2 > 0.0 && std::isfinite(cavity.gamma)) {
    const int kmax = static_cast<int>(std::sqrt(wmax2) * cavity.right_length() / M_PI) + 2;
    const std::vector<double> roots =
        solve_transverse_frequencies(cavity, kmax, ModeClass::RightDominated);
    int best = 0;
    double bd = 0.0;
    for (int k = 0; k < kmax; ++k) {
      const double f = std::sqrt(roots[k] * roots[k] + ky * ky + kz * kz);
      if (k == 0 || std::abs(f - target) < bd) {
        best = k;
        bd = std::abs(f - target);
      }
    }
    m_LR = geometry_factor(cavity, left,
                           make_mode(cavity, best + 1, 1, 1, ModeClass::RightDominated));
  }
  return coupling_coefficients(left.omega_total, left.omega_x, fundamental_length_derivative(cavity),
                               cavity.left_length(), m_LR, h, H);
}

Eigen::Matrix4cd msa_coefficient_matrix(double gamma1, double gamma2, double gamma3, double alpha,
                                        double beta) {
  const cd I(0.0, 1.0);
  Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
  M(0, 0) = -0.5 * I * alpha;
  M(0, 1) = gamma1;
  M(0, 2) = gamma2;
  M(1, 0) = gamma1;
  M(1, 1) = 0.5 * I * alpha;
  M(1, 3) = gamma2;
  M(2, 0) = -gamma3;
  M(2, 2) = -0.5 * I * (3.0 * alpha - 2.0 * beta);
  M(3, 1) = -gamma3;
  M(3, 3) = 0.5 * I * (3.0 * alpha - 2.0 * beta);
  return M;
}

Eigen::Matrix4cd msa_coefficient_matrix_from_effective(double xi, double chi, const DetuningParams& p,
                                                       double epsilon) {
  check(xi, chi, p);
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  return msa_coefficient_matrix(-2.0 * xi / epsilon, sqrt3 * chi / epsilon, chi / (sqrt3 * epsilon),
                                2.0 * p.omega_L * p.delta / epsilon, p.omega_L * p.Delta / epsilon);
}

std::array<double, 2> detuned_occupations(double xi, double chi, const DetuningParams& p, double T,
                                          double n_L0, double n_R0) {
  if (!(T >= 0.0)) throw ValidationError("T must be >= 0");
  const Eigen::Matrix4cd Ap = msa_matrix(xi, chi, p);
  // Back to (a_L, a_L^+, a_R, a_R^+): A = D^-1 A' D, D = diag(1, 1, 1/sqrt3, 1/sqrt3).
  const Eigen::Vector4d dv(1.0, 1.0, 1.0 / sqrt3, 1.0 / sqrt3);
  Eigen::MatrixXcd A = dv.cwiseInverse().asDiagonal() * Ap * dv.asDiagonal();
  A *= T;
  if (A.cwiseAbs().colwise().sum().maxCoeff() > 700.0)
    throw NumericError("detuned evolution overflows: ||A T||_1 > 700");
  const Eigen::MatrixXcd U = expm(A);
  const auto n = assemble_occupations(U, std::vector<double>{n_L0, n_R0});
  return {n[0].real(), n[1].real()};
}

}  // namespace leakycav
