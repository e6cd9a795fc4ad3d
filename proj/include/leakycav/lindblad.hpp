#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

namespace leakycav {

struct TruncatedDensity {
  Eigen::MatrixXcd matrix;  // Fock basis |0> .. |cutoff-1>

  int cutoff() const { return static_cast<int>(matrix.rows()); }
  double trace() const { return matrix.trace().real(); }
  double hermiticity_defect() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const;
};

// Geometric Fock mixture with mean n0. Throws if the weight beyond the
// cutoff exceeds tail_tol.
TruncatedDensity thermal_density(double n0, int cutoff, double tail_tol = 1e-8);
double thermal_tail(double n0, int cutoff);

// Smallest cutoff keeping the thermal tail below tail_tol, plus margin for
// the two-step ladder terms.
int choose_cutoff(double n0, double tail_tol = 1e-8, int margin = 8);

// f_1 .. f_5 of the master equation at time t.
std::array<double, 5> master_coefficients(double xi, double chi, double n_R0, double t);
// F_i(T) = integral of f_i over [0, T], closed form.
std::array<double, 5> integrated_coefficients(double xi, double chi, double n_R0, double T);

// Right-hand side of the master equation with weights w (f_i or F_i).
Eigen::MatrixXcd master_generator(const Eigen::MatrixXcd& rho, const std::array<double, 5>& w);

// rho(0) + six-term update with the integrated coefficients.
TruncatedDensity rho_L_approx(const TruncatedDensity& rho0, const std::array<double, 5>& F);

// Tr{[(1 + 2 S^2) a^+ a + sinh(4 xi T)/2 (a^+2 + a^2) + S^2] rho}.
double squeezed_number_expectation(const TruncatedDensity& rho, double xi, double T);

struct MasterRun {
  TruncatedDensity rho;
  std::vector<double> checkpoints;
  std::vector<double> min_eigenvalues;             // at each checkpoint
  std::optional<double> first_positivity_failure;  // earliest checkpoint with eigenvalue < -1e-6
  bool valid = true;
  std::size_t steps_taken = 0;
};

// Adaptive Dormand-Prince integration of the master equation from 0 to T.
// checkpoints > 0 splits [0, T] for positivity monitoring.
MasterRun propagate_master_numeric(const TruncatedDensity& rho0, double xi, double chi, double n_R0,
                                   double T, int checkpoints = 1, double rtol = 1e-11,
                                   double atol = 1e-13);

struct MasterSeries {
  std::vector<double> times;
  std::vector<double> n_L;             // squeezed <N_L>
  std::vector<double> trace;
  std::vector<double> min_eigenvalue;
  std::vector<bool> valid;
  std::optional<double> first_positivity_failure;
};

// Same integration, sampled on an ascending grid of non-negative times.
MasterSeries propagate_master_series(const TruncatedDensity& rho0, double xi, double chi,
                                     double n_R0, const std::vector<double>& times,
                                     double rtol = 1e-11, double atol = 1e-13);

}  // namespace leakycav
