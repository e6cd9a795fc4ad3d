#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "leakycav/cavity_modes.hpp"

namespace leakycav {

// omega = 2 Omega_L (1 + delta), Omega_R = Omega_L (3 + Delta).
struct DetuningParams {
  double delta = 0.0;
  double Delta = 0.0;
  double omega_L = 0.0;
};

// Returns warnings for |delta| or |Delta| above 0.1.
std::vector<std::string> detuning_warnings(const DetuningParams& p);

// A' in the basis (a_L, a_L^+, a_R/sqrt3, a_R^+/sqrt3).
Eigen::Matrix4cd msa_matrix(double xi, double chi, const DetuningParams& p);

struct UV {
  double U = 0.0;
  double V = 0.0;
};
UV uv_quantities(double xi, double chi, const DetuningParams& p);

// +-(1/2) sqrt(U +- 2 sqrt(V)), branches matched against a numeric eigensolve
// of A'. Sorted by descending real part, then descending imaginary part.
std::array<std::complex<double>, 4> msa_eigenvalues(double xi, double chi, const DetuningParams& p);
// The same four values straight from the eigensolver, same ordering.
std::array<std::complex<double>, 4> msa_eigenvalues_numeric(double xi, double chi,
                                                            const DetuningParams& p);

double max_growth_rate(double xi, double chi, const DetuningParams& p);

struct ThresholdResult {
  bool growth_at_zero = false;       // false when chi >= xi: no real eigenvalue at delta = 0
  std::optional<double> delta_c;     // largest delta > 0 with max Re(lambda) > 0
  double analytic_bound = 0.0;       // leading-order-in-chi^2 estimate of delta_c
  double ideal = 0.0;                // 2 xi / Omega_L
};

// Scan on [0, 4 (xi + chi) / Omega_L], then bisection on the growth rate.
ThresholdResult growth_threshold(double xi, double chi, double omega_L, double Delta,
                                 int scan_points = 4000);

// Positive root of Omega^2 d^2 = 4 xi^2 - 2 chi^2 (4 xi^2 + Omega^2 d Delta - 4 Omega^2 d^2) /
// (4 xi^2 - Omega^2 d^2 + Omega^2 (3 d - Delta)^2) in d, by fixed-point refinement.
double analytic_threshold(double xi, double chi, double omega_L, double Delta);

// Amplitude form of the ideal threshold: (1/2) (Omega_L^x / Omega_L)^2 epsilon.
double ideal_threshold_from_drive(double epsilon, double omega_L, double omega_Lx);

struct CouplingCoefficients {
  double gamma1 = 0.0;         // (L/2) dOmega_L/dL with L the left length
  double gamma1_approx = 0.0;  // -(1/2) (Omega_L^x)^2 / Omega_L
  double gamma2 = 0.0;
  double gamma2_approx = 0.0;  // 2 Omega_L g_LR
  double gamma3 = 0.0;
  double gamma3_approx = 0.0;  // (2/3) Omega_L g_LR
  double g_LR = 0.0;
};

// g_LR = -L m_LR, L = left length, with the fundamental left mode and the
// right-dominated partner (ny = nz = 1) closest to 3 Omega_L.
CouplingCoefficients coupling_coefficients(const CavityConfig& cavity, double h, double H);
// Same from explicit inputs.
CouplingCoefficients coupling_coefficients(double omega_L, double omega_Lx, double dOmega_dL,
                                           double left_length, double m_LR, double h, double H);

// d Omega_L / d(left length) at fixed b, c by implicit differentiation.
double fundamental_length_derivative(const CavityConfig& cavity);

// M acting on (a_k, b_k, a_j, b_j).
Eigen::Matrix4cd msa_coefficient_matrix(double gamma1, double gamma2, double gamma3, double alpha,
                                        double beta);

// M for the effective parameters, fixed so that epsilon M = S conj(A') S,
// S = diag(1, -1, 1, -1): gamma1 = -2 xi/eps, gamma2 = sqrt3 chi/eps,
// gamma3 = chi/(sqrt3 eps), alpha = 2 Omega_L delta/eps, beta = Omega_L Delta/eps.
Eigen::Matrix4cd msa_coefficient_matrix_from_effective(double xi, double chi, const DetuningParams& p,
                                                       double epsilon);

// Occupations <a_L^+ a_L>, <a_R^+ a_R> after time T of the detuned linear
// evolution, thermal diagonal initial state.
std::array<double, 2> detuned_occupations(double xi, double chi, const DetuningParams& p, double T,
                                          double n_L0, double n_R0);

}  // namespace leakycav
