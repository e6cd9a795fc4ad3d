#pragma once

namespace leakycav {

struct HyperbolicPair {
  double c_of_t = 1.0;  // cosh(2 xi T)
  double s_of_t = 0.0;  // sinh(2 xi T)

  static HyperbolicPair at(double xi, double T);
};

// An occupation that is affine in the initial occupations.
struct AffineOccupation {
  double vacuum = 0.0;
  double coef_L = 0.0;
  double coef_R = 0.0;

  double operator()(double n_L0, double n_R0) const { return vacuum + coef_L * n_L0 + coef_R * n_R0; }
};

// Negative values mean second order has broken down; they are returned as is.
struct Prediction {
  double value = 0.0;
  bool valid = true;
};

// Which vacuum term to use for the reservoir mode. Corrected has the
// constant (C - 1)^2 and gives N_R(0) = N_R0; AsPrinted keeps
// 2 C^2 - 2 C + 1, which leaves chi^2 / (4 xi^2) at T = 0.
enum class RightForm { Corrected, AsPrinted };

AffineOccupation left_quadratic_coefficients(double xi, double chi, double T);
AffineOccupation right_quadratic_coefficients(double xi, double chi, double T,
                                              RightForm form = RightForm::Corrected);

Prediction n_left_quadratic(double xi, double chi, double T, double n_L0, double n_R0);
Prediction n_right_quadratic(double xi, double chi, double T, double n_L0, double n_R0,
                             RightForm form = RightForm::Corrected);

// Above this value of 2 xi T the hyperbolic products are evaluated with the
// leading exponential factored out.
inline constexpr double kLogDomainThreshold = 300.0;

}  // namespace leakycav
