#include "leakycav/cavity_modes.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "leakycav/errors.hpp"

namespace leakycav {

namespace {

constexpr double pi = std::numbers::pi;

double cot(double x) { return 1.0 / std::tan(x); }

// Positive above each pole, negative just below the next one.
double secular(const CavityConfig& cav, double w) {
  return cot(w * cav.left_length()) + cot(w * cav.right_length()) + 2.0 * cav.gamma / w;
}

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) < tol; }

double find_root(const CavityConfig& cav, double lower_pole, double upper_pole) {
  if (std::isinf(cav.gamma)) return upper_pole;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double lo = lower_pole > 0.0 ? lower_pole * (1.0 + 4.0 * eps) : upper_pole * 1e-9;
  const double hi = upper_pole * (1.0 - 4.0 * eps);

  constexpr int subdivisions = 64;
  double a = lo;
  double fa = secular(cav, a);
  double b = hi;
  double fb = secular(cav, hi);
  if (fb >= 0.0) return hi;  // closer to the pole than we can resolve
  for (int i = 1; i < subdivisions; ++i) {
    const double x = lo + (hi - lo) * i / subdivisions;
    const double fx = secular(cav, x);
    if (fx <= 0.0) {
      b = x;
      fb = fx;
      break;
    }
    a = x;
    fa = fx;
  }
  if (!(fa > 0.0)) throw NumericError("transverse root: lost sign change in bracket");
  if (fb == 0.0) return b;

  boost::uintmax_t max_iter = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 1);
  const auto f = [&](double w) { return secular(cav, w); };
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, max_iter);
  const double x = 0.5 * (r.first + r.second);
  return std::abs(f(r.first)) < std::abs(f(x)) ? r.first : x;
}

}  // namespace

void validate(const CavityConfig& cav, double ratio_tol) {
  std::ostringstream why;
  if (!(cav.a0 < cav.b && cav.b < cav.c)) why << "need a0 < b < c; ";
  if (!(cav.dy > 0.0)) why << "dy must be positive; ";
  if (!(cav.dz > 0.0)) why << "dz must be positive; ";
  if (!(cav.gamma > 0.0)) why << "gamma must be positive; ";
  if (why.str().empty()) {
    const double r = cav.left_length() / cav.right_length();
    if (near_integer(r, ratio_tol) || near_integer(1.0 / r, ratio_tol))
      why << "length ratio (b-a0)/(c-b) = " << r << " or its inverse is an integer; ";
  }
  if (!why.str().empty()) throw ValidationError("cavity: " + why.str());
}

CavityConfig make_cavity(double a0, double b, double c, double dy, double dz, double gamma,
                         double ratio_tol) {
  CavityConfig cav{a0, b, c, dy, dz, gamma};
  validate(cav, ratio_tol);
  return cav;
}

const char* to_string(ModeClass cls) {
  return cls == ModeClass::LeftDominated ? "l" : "r";
}

double eigenvalue_residual(const CavityConfig& cav, double omega_x) {
  if (std::isinf(cav.gamma)) return 0.0;
  return secular(cav, omega_x) / cav.gamma;
}

std::vector<double> solve_transverse_frequencies(const CavityConfig& cav, int k_max,
                                                 ModeClass cls) {
  if (k_max < 1) throw ValidationError("k_max must be at least 1");
  validate(cav);
  const double step_l = pi / cav.left_length();
  const double step_r = pi / cav.right_length();

  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(k_max));
  long kl = 1;
  long kr = 1;
  double prev = 0.0;
  bool prev_left = false;
  while (static_cast<int>(roots.size()) < k_max) {
    const double pl = step_l * kl;
    const double pr = step_r * kr;
    const bool left = pl < pr;
    const double pole = left ? pl : pr;
    const ModeClass here = left ? ModeClass::LeftDominated : ModeClass::RightDominated;
    if (here == cls) {
      const double w = find_root(cav, prev, pole);
      const double eta_mu = w / cav.gamma;
      if (eta_mu > 0.2 || (pole - w) > 0.5 * (pole - prev)) {
        std::ostringstream msg;
        msg << "class assignment ambiguous: eta_mu = " << eta_mu << " for root " << w
            << " between poles " << prev << " (" << (prev_left ? "left" : "right") << ") and "
            << pole << " (" << (left ? "left" : "right") << " n=" << (left ? kl : kr) << ")";
        throw NumericError(msg.str());
      }
      roots.push_back(w);
    }
    prev = pole;
    prev_left = left;
    if (left) ++kl; else ++kr;
  }
  return roots;
}

double perturbative_frequency(double own_length, double other_length, int n, double eta_mu,
                              int order) {
  if (n < 1) throw ValidationError("perturbative_frequency: n must be >= 1");
  if (order != 1 && order != 2) throw ValidationError("perturbative_frequency: order must be 1 or 2");
  if (!(eta_mu >= 0.0 && eta_mu < 1.0)) throw ValidationError("perturbative_frequency: need 0 <= eta_mu < 1");
  double w = n * pi / own_length - eta_mu / (2.0 * own_length);
  if (order == 2) {
    const double ratio = n * other_length / own_length;
    if (near_integer(ratio, 1e-6)) throw NumericError("perturbative_frequency: cot argument at a pole");
    w += cot(pi * ratio) * eta_mu * eta_mu / (4.0 * own_length);
  }
  return w;
}

double perturbative_frequency(const CavityConfig& cav, int n, ModeClass cls, int order) {
  if (n < 1) throw ValidationError("perturbative_frequency: n must be >= 1");
  if (order != 1 && order != 2) throw ValidationError("perturbative_frequency: order must be 1 or 2");
  const bool left = cls == ModeClass::LeftDominated;
  const double own = left ? cav.left_length() : cav.right_length();
  const double other = left ? cav.right_length() : cav.left_length();
  const double p = n * pi / own;
  if (std::isinf(cav.gamma)) return p;

  // eta_mu = w / gamma on the right-hand side turns the expansion into
  // A w^2 - B w + p = 0; take the root that tends to p.
  const double B = 1.0 + 1.0 / (2.0 * cav.gamma * own);
  double w = p / B;
  if (order == 2) {
    const double ratio = n * other / own;
    if (near_integer(ratio, 1e-6)) throw NumericError("perturbative_frequency: cot argument at a pole");
    const double A = cot(pi * ratio) / (4.0 * cav.gamma * cav.gamma * own);
    const double disc = B * B - 4.0 * A * p;
    if (disc < 0.0) throw NumericError("perturbative_frequency: expansion diverges (eta too large)");
    w = 2.0 * p / (B + std::sqrt(disc));
  }
  if (!(w / cav.gamma < 1.0)) throw ValidationError("perturbative_frequency: eta_mu >= 1");
  return w;
}

Mode make_mode(const CavityConfig& cav, int nx, int ny, int nz, ModeClass cls) {
  if (nx < 1 || ny < 1 || nz < 1) throw ValidationError("mode indices must be positive");
  Mode m;
  m.nx = nx;
  m.ny = ny;
  m.nz = nz;
  m.cls = cls;
  m.omega_x = solve_transverse_frequencies(cav, nx, cls).back();
  m.omega_total = mode_frequency(cav, m);

  const double w = m.omega_x;
  const double l1 = cav.left_length();
  const double l2 = cav.right_length();
  double L = std::sin(w * l2);
  double R = std::sin(w * l1);
  const double i1 = 0.5 * l1 - std::sin(2.0 * w * l1) / (4.0 * w);
  const double i2 = 0.5 * l2 - std::sin(2.0 * w * l2) / (4.0 * w);
  const double k = 1.0 / std::sqrt(L * L * i1 + R * R * i2);
  L *= k;
  R *= k;
  const bool flip = (cls == ModeClass::LeftDominated) ? L < 0.0 : R < 0.0;
  m.norm_left = flip ? -L : L;
  m.norm_right = flip ? -R : R;
  return m;
}

Mode fundamental_mode(const CavityConfig& cav) {
  return make_mode(cav, 1, 1, 1, ModeClass::LeftDominated);
}

double mode_frequency(const CavityConfig& cav, const Mode& mode) {
  const double ky = mode.ny * pi / cav.dy;
  const double kz = mode.nz * pi / cav.dz;
  return std::sqrt(mode.omega_x * mode.omega_x + ky * ky + kz * kz);
}

double eigenfunction_x(const CavityConfig& cav, const Mode& mode, double x) {
  if (x <= cav.a0 || x >= cav.c) return 0.0;
  if (x < cav.b) return mode.norm_left * std::sin(mode.omega_x * (x - cav.a0));
  return mode.norm_right * std::sin(mode.omega_x * (cav.c - x));
}

double fundamental_eta(const CavityConfig& cav) {
  if (std::isinf(cav.gamma)) return 0.0;
  return solve_transverse_frequencies(cav, 1, ModeClass::LeftDominated).front() / cav.gamma;
}

EtaParam eta_param(const CavityConfig& cav, const std::vector<Mode>& modes) {
  EtaParam p;
  p.eta = fundamental_eta(cav);
  p.per_mode_eta.reserve(modes.size());
  for (const auto& m : modes) p.per_mode_eta.push_back(std::isinf(cav.gamma) ? 0.0 : m.omega_x / cav.gamma);
  return p;
}

double geometry_factor(const CavityConfig& cav, const Mode& left, const Mode& right) {
  if (left.cls != ModeClass::LeftDominated || left.nx != 1)
    throw ValidationError("geometry_factor: left mode must be the fundamental left-dominated mode");
  if (right.cls != ModeClass::RightDominated)
    throw ValidationError("geometry_factor: right mode must be right-dominated");
  if (right.ny != left.ny || right.nz != left.nz) return 0.0;
  if (std::isinf(cav.gamma)) return 0.0;

  const double r = cav.left_length() / cav.right_length();
  const int n = right.nx;
  if (near_integer(n * r, 1e-6)) throw NumericError("geometry_factor: n_x (b-a)/(c-b) is an integer");
  const double eta = left.omega_x / cav.gamma;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return n * sign * std::sqrt(r) * (right.omega_x / left.omega_x) * eta /
         (cav.right_length() * std::sin(n * pi * r) * (n * n * r * r - 1.0));
}

double quality_factor_from_eta(double eta) {
  if (eta == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * pi * (1.0 + 1.0 / (eta * eta));
}

double quality_factor(const CavityConfig& cav) {
  if (std::isinf(cav.gamma)) return std::numeric_limits<double>::infinity();
  const double w = solve_transverse_frequencies(cav, 1, ModeClass::LeftDominated).front();
  const double g = cav.gamma / w;
  return 2.0 * pi * (1.0 + g * g);
}

}  // namespace leakycav
