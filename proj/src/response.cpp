#include "leakycav/response.hpp"

#include <cmath>

#include "leakycav/errors.hpp"

namespace leakycav {

namespace {

// Every term of the quadratic formulas, divided by exp(shift).
struct Scaled {
  double one;   // 1
  double c;     // C
  double c2;    // C^2
  double s2;    // S^2
  double ts2;   // xi T S(2T) = (y/2) sinh(2y)
  double shift;
};

Scaled scaled_terms(double xi, double T) {
  const double y = 2.0 * xi * T;
  if (y <= kLogDomainThreshold) {
    const double c = std::cosh(y);
    const double s = std::sinh(y);
    return {1.0, c, c * c, s * s, 0.5 * y * std::sinh(2.0 * y), 0.0};
  }
  const double e1 = std::exp(-y);
  const double e2 = e1 * e1;
  const double cp = 0.5 * (1.0 + e2);  // C e^{-y}
  const double sp = 0.5 * (1.0 - e2);  // S e^{-y}
  return {e2, cp * e1, cp * cp, sp * sp, 0.25 * y * (1.0 - e2 * e2), 2.0 * y};
}

void check(double xi, double T) {
  if (!(xi > 0.0)) throw ValidationError("quadratic response needs xi > 0");
  if (!(T >= 0.0)) throw ValidationError("quadratic response needs T >= 0");
}

AffineOccupation unscale(AffineOccupation a, double shift) {
  if (shift == 0.0) return a;
  const double f = std::exp(shift);
  return {a.vacuum * f, a.coef_L * f, a.coef_R * f};
}

Prediction finish(double v) { return {v, v >= 0.0}; }

}  // namespace

HyperbolicPair HyperbolicPair::at(double xi, double T) {
  const double y = 2.0 * xi * T;
  return {std::cosh(y), std::sinh(y)};
}

AffineOccupation left_quadratic_coefficients(double xi, double chi, double T) {
  check(xi, T);
  const Scaled h = scaled_terms(xi, T);
  const double k = chi * chi / (4.0 * xi * xi);
  AffineOccupation a;
  a.vacuum = h.s2 + k * (3.0 * h.c2 - 2.0 * h.c - h.one - 2.0 * h.ts2);
  a.coef_L = h.one + 2.0 * h.s2 + k * (4.0 * h.c2 - 2.0 * h.c - 2.0 * h.one - 4.0 * h.ts2);
  a.coef_R = k * (2.0 * h.c2 - 2.0 * h.c);
  return unscale(a, h.shift);
}

AffineOccupation right_quadratic_coefficients(double xi, double chi, double T, RightForm form) {
  check(xi, T);
  const Scaled h = scaled_terms(xi, T);
  const double k = chi * chi / (4.0 * xi * xi);
  AffineOccupation a;
  const double lead = form == RightForm::Corrected ? h.c2 : 2.0 * h.c2;
  a.vacuum = k * (lead - 2.0 * h.c + h.one);
  a.coef_L = k * (2.0 * h.c2 - 2.0 * h.c);
  a.coef_R = h.one + k * (2.0 * h.one - 2.0 * h.c);
  return unscale(a, h.shift);
}

Prediction n_left_quadratic(double xi, double chi, double T, double n_L0, double n_R0) {
  return finish(left_quadratic_coefficients(xi, chi, T)(n_L0, n_R0));
}

Prediction n_right_quadratic(double xi, double chi, double T, double n_L0, double n_R0,
                             RightForm form) {
  return finish(right_quadratic_coefficients(xi, chi, T, form)(n_L0, n_R0));
}

}  // namespace leakycav
