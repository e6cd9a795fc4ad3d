#include "leakycav/propagator.hpp"

#include <cmath>

#include "leakycav/errors.hpp"
#include "leakycav/expm.hpp"

namespace leakycav {

using cplx = std::complex<double>;

CoefficientMatrix build_A(double xi, const std::vector<double>& chis) {
  if (chis.empty()) throw ValidationError("build_A: need at least one coupled mode");
  const int n = static_cast<int>(chis.size());
  CoefficientMatrix A = CoefficientMatrix::Zero(2 * (n + 1), 2 * (n + 1));
  A(0, 1) = 2.0 * xi;
  A(1, 0) = 2.0 * xi;
  for (int i = 0; i < n; ++i) {
    const int r = 2 * (i + 1);
    A(0, r) = chis[i];
    A(1, r + 1) = chis[i];
    A(r, 0) = -chis[i];
    A(r + 1, 1) = -chis[i];
  }
  return A;
}

Eigen::MatrixXd commutator_metric(int n_modes) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    J(2 * m, 2 * m + 1) = 1.0;
    J(2 * m + 1, 2 * m) = -1.0;
  }
  return J;
}

std::array<cplx, 4> analytic_eigenvalues(double xi, double chi) {
  const cplx s = std::sqrt(cplx(xi * xi - chi * chi));
  return {xi + s, xi - s, -xi + s, -xi - s};
}

PropagatorMatrix matrix_exponential(const CoefficientMatrix& A, double T) {
  const Eigen::MatrixXd AT = A * T;
  if (!AT.allFinite()) throw NumericError("matrix_exponential: non-finite entries");
  if (AT.cwiseAbs().colwise().sum().maxCoeff() > 700.0)
    throw NumericError("matrix_exponential: ||A T|| > 700 would overflow; use the closed forms");
  return expm(AT);
}

PropagatorMatrix matrix_exponential_eig(const CoefficientMatrix& A, double T) {
  return expm_eig(A * T).real();
}

namespace {

template <typename MatX, typename MatY>
auto bilinear(const MatX& X, const MatY& Y, const std::vector<double>& occ, int p) {
  using S = decltype(X(0, 0) * Y(0, 0));
  S acc = 0.0;
  for (std::size_t m = 0; m < occ.size(); ++m) {
    const int j = 2 * static_cast<int>(m);
    acc += X(2 * p + 1, j + 1) * Y(2 * p, j) * occ[m] + X(2 * p + 1, j) * Y(2 * p, j + 1) * (occ[m] + 1.0);
  }
  return acc;
}

void check_dims(Eigen::Index rows, Eigen::Index cols, std::size_t modes) {
  if (rows != cols || rows != static_cast<Eigen::Index>(2 * modes))
    throw ValidationError("assemble_occupations: U must be 2n x 2n for n occupations");
}

}  // namespace

std::vector<double> assemble_occupations(const Eigen::MatrixXd& U, const std::vector<double>& occ) {
  check_dims(U.rows(), U.cols(), occ.size());
  std::vector<double> out(occ.size());
  for (std::size_t p = 0; p < occ.size(); ++p) out[p] = bilinear(U, U, occ, static_cast<int>(p));
  return out;
}

std::vector<cplx> assemble_occupations(const Eigen::MatrixXcd& U, const std::vector<double>& occ) {
  check_dims(U.rows(), U.cols(), occ.size());
  std::vector<cplx> out(occ.size());
  for (std::size_t p = 0; p < occ.size(); ++p) out[p] = bilinear(U, U, occ, static_cast<int>(p));
  return out;
}

namespace {

// sinh(r)/r as a function of q = r^2 (r imaginary for q < 0).
double shc_sq(double q) {
  if (std::abs(q) < 1e-3) return 1.0 + q / 6.0 * (1.0 + q / 20.0 * (1.0 + q / 42.0));
  if (q > 0.0) {
    const double r = std::sqrt(q);
    return std::sinh(r) / r;
  }
  const double r = std::sqrt(-q);
  return std::sin(r) / r;
}

// cosh(r) as a function of q = r^2.
double ch_sq(double q) { return q >= 0.0 ? std::cosh(std::sqrt(q)) : std::cos(std::sqrt(-q)); }

// Form written through entire functions of d = xi^2 - chi^2; used near xi = chi.
FullOccupations real_form(double xi, double chi, double T, bool log_domain) {
  const double d = xi * xi - chi * chi;
  const double y = 2.0 * xi * T;
  const double e1 = 2.0 * T * T * std::pow(shc_sq(T * T * d), 2);  // (cosh(2T sqrt d) - 1)/d
  const double e2 = 2.0 * T * shc_sq(4.0 * T * T * d);              // sinh(2T sqrt d)/sqrt d
  const double ch = ch_sq(4.0 * T * T * d);

  double C, S, Cm1, shift = 0.0;
  if (log_domain) {
    const double e = std::exp(-2.0 * y);
    C = 0.5 * (1.0 + e);
    S = 0.5 * (1.0 - e);
    Cm1 = 2.0 * std::pow(0.5 * (1.0 - std::exp(-y)), 2);  // 2 sinh^2(y/2) e^{-y}
    shift = y;
  } else {
    C = std::cosh(y);
    S = std::sinh(y);
    Cm1 = 2.0 * std::pow(std::sinh(0.5 * y), 2);
  }
  FullOccupations r;
  r.real_form = true;
  r.log_domain = log_domain;
  r.left.vacuum = 0.5 * (xi * xi * C * e1 + xi * S * e2 + Cm1);
  r.left.coef_L = 0.5 * (xi * xi * C * e1 + 2.0 * xi * S * e2 + C * (ch + 1.0));
  r.left.coef_R = 0.5 * chi * chi * C * e1;
  r.right.vacuum = 0.5 * (xi * xi * C * e1 - xi * S * e2 + Cm1);
  r.right.coef_L = r.left.coef_R;
  r.right.coef_R = 0.5 * (xi * xi * C * e1 - 2.0 * xi * S * e2 + C * (ch + 1.0));
  if (shift > 0.0) {
    const double f = std::exp(shift);
    for (auto* a : {&r.left, &r.right}) {
      a->vacuum *= f;
      a->coef_L *= f;
      a->coef_R *= f;
    }
  }
  return r;
}

cplx sinh_half_sq2(cplx w) {  // cosh(w) - 1
  const cplx h = std::sinh(0.5 * w);
  return 2.0 * h * h;
}

// e^{-shift} cosh(w), for Re w <= shift.
cplx cosh_scaled(cplx w, double shift) {
  if (shift == 0.0) return std::cosh(w);
  return 0.5 * (std::exp(w - shift) + std::exp(-w - shift));
}

// e^{-shift} (cosh(w) - 1), keeping accuracy for small |w|.
cplx cosh_m1_scaled(cplx w, double shift) {
  if (shift == 0.0 || std::abs(w) < 1.0) return sinh_half_sq2(w) * std::exp(-shift);
  return cosh_scaled(w, shift) - std::exp(-shift);
}

}  // namespace

FullOccupations full_occupations(double xi, double chi, double T, double n_L0, double n_R0,
                                 const FullOptions& opt) {
  if (!(xi >= 0.0) || !(T >= 0.0)) throw ValidationError("full_occupations: need xi >= 0, T >= 0");
  FullOccupations r;
  if (xi == 0.0 && chi == 0.0) {
    r.left = {0.0, 1.0, 0.0};
    r.right = {0.0, 0.0, 1.0};
  } else if (chi == 0.0) {
    // Uncoupled: L is a squeezed mode and R is left untouched.
    const double S = std::sinh(2.0 * xi * T);
    r.left = {S * S, 1.0 + 2.0 * S * S, 0.0};
    r.right = {0.0, 0.0, 1.0};
    r.log_domain = opt.force_log_domain || 2.0 * xi * T > kLogDomainThreshold;
  } else {
    const double d = xi * xi - chi * chi;
    const double y = 2.0 * xi * T;
    const bool log_domain = opt.force_log_domain || y > kLogDomainThreshold;
    if (opt.force_real_form || std::abs(d) < 1e-8 * xi * xi) {
      r = real_form(xi, chi, T, log_domain);
    } else {
      const double chi2 = chi * chi;
      const cplx s = std::sqrt(cplx(d));
      const cplx sp = xi + s;
      const cplx sm = chi2 / sp;  // xi - s without cancellation
      const cplx wp = 2.0 * T * sp;
      const cplx wm = 2.0 * T * sm;
      const cplx ws = 2.0 * T * s;
      const double w0 = 2.0 * T * xi;
      // Leading growth: e^{Re wp} for the squeezed pair, split as e^{w0} e^{Re ws}
      // for the products C (cs +/- 1).
      const double shift_p = log_domain ? wp.real() : 0.0;
      const double shift_0 = log_domain ? w0 : 0.0;
      const double shift_s = log_domain ? ws.real() : 0.0;

      const cplx cp = cosh_scaled(wp, shift_p);
      const cplx cm = cosh_scaled(wm, shift_p);
      const cplx cp1 = cosh_m1_scaled(wp, shift_p);
      const cplx cm1 = cosh_m1_scaled(wm, shift_p);
      const double c1 = cosh_m1_scaled(w0, shift_p).real();
      const double c = cosh_scaled(w0, shift_0).real();
      const cplx cs = cosh_scaled(ws, shift_s);
      const cplx cs1 = cosh_m1_scaled(ws, shift_s);
      const cplx cs_plus = cs + std::exp(-shift_s);

      const cplx vac_L = (xi * sp * cp1 + xi * sm * cm1 - 2.0 * chi2 * c1) / (4.0 * d);
      const cplx ll = (xi * sp * cp + xi * sm * cm - chi2 * c * cs_plus) / (2.0 * d);
      const cplx lr = chi2 * c * cs1 / (2.0 * d);
      const cplx vac_R = (xi * sm * cp1 + xi * sp * cm1 - 2.0 * chi2 * c1) / (4.0 * d);
      const cplx rr = (xi * sm * cp + xi * sp * cm - chi2 * c * cs_plus) / (2.0 * d);

      const double f = log_domain ? std::exp(shift_p) : 1.0;
      r.log_domain = log_domain;
      r.left = {vac_L.real() * f, ll.real() * f, lr.real() * f};
      r.right = {vac_R.real() * f, lr.real() * f, rr.real() * f};
      r.imag_L = std::abs((vac_L + ll * n_L0 + lr * n_R0).imag()) * f;
      r.imag_R = std::abs((vac_R + lr * n_L0 + rr * n_R0).imag()) * f;
    }
  }
  r.n_L = r.left(n_L0, n_R0);
  r.n_R = r.right(n_L0, n_R0);
  return r;
}

double n_left_full(double xi, double chi, double T, double n_L0, double n_R0) {
  return full_occupations(xi, chi, T, n_L0, n_R0).n_L;
}

double n_right_full(double xi, double chi, double T, double n_L0, double n_R0) {
  return full_occupations(xi, chi, T, n_L0, n_R0).n_R;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::ExponentialGrowth: return "exponential-growth";
    case Regime::Oscillatory: return "oscillatory";
    case Regime::OscillatoryDegenerate: return "oscillatory-degenerate";
    case Regime::PureHopping: return "pure-hopping";
  }
  return "?";
}

Regime regime_classify(double xi, double chi) {
  const double a = std::abs(chi);
  if (xi == 0.0) return Regime::PureHopping;
  if (a == xi) return Regime::OscillatoryDegenerate;
  return a > xi ? Regime::Oscillatory : Regime::ExponentialGrowth;
}

std::vector<double> multi_mode_response(double xi, const std::vector<double>& chis, double T,
                                        const std::vector<double>& occupations) {
  if (occupations.size() != chis.size() + 1)
    throw ValidationError("multi_mode_response: need one occupation per mode (L first)");
  return assemble_occupations(matrix_exponential(build_A(xi, chis), T), occupations);
}

Chi2Expansion chi2_expansion(double xi, const std::vector<double>& weights, double T,
                             const std::vector<double>& occ) {
  if (occ.size() != weights.size() + 1)
    throw ValidationError("chi2_expansion: need one occupation per mode (L first)");
  const std::vector<double> zeros(weights.size(), 0.0);
  const Eigen::MatrixXd A0 = build_A(xi, zeros) * T;
  const Eigen::MatrixXd B = build_A(0.0, weights) * T;
  const Eigen::Index n = A0.rows();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (int k = 0; k < 3; ++k) M.block(k * n, k * n, n, n) = A0;
  M.block(0, n, n, n) = B;
  M.block(n, 2 * n, n, n) = B;
  const Eigen::MatrixXd E = expm(M);
  const Eigen::MatrixXd U0 = E.block(0, 0, n, n);
  const Eigen::MatrixXd U1 = E.block(0, n, n, n);
  const Eigen::MatrixXd U2 = E.block(0, 2 * n, n, n);

  Chi2Expansion out;
  for (std::size_t p = 0; p < occ.size(); ++p) {
    const int q = static_cast<int>(p);
    out.zeroth.push_back(bilinear(U0, U0, occ, q));
    out.second.push_back(bilinear(U0, U2, occ, q) + bilinear(U1, U1, occ, q) + bilinear(U2, U0, occ, q));
  }
  return out;
}

}  // namespace leakycav
