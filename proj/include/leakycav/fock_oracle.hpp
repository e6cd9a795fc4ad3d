#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <vector>

namespace leakycav {

// Operators on |n_L> (x) |n_R>, flat index n_L * cutoff_R + n_R.
struct TwoModeOperator {
  int cutoff_L = 0;
  int cutoff_R = 0;
  Eigen::MatrixXcd matrix;

  int dim() const { return cutoff_L * cutoff_R; }
  int index(int n_L, int n_R) const { return n_L * cutoff_R + n_R; }
};

// Truncated single-mode annihilator: a(k, k+1) = sqrt(k+1).
Eigen::MatrixXd truncated_annihilator(int cutoff);

TwoModeOperator annihilator_L(int cutoff_L, int cutoff_R);
TwoModeOperator annihilator_R(int cutoff_L, int cutoff_R);

// i xi (a_L^+2 - a_L^2) + i chi (a_L^+ a_R - a_L a_R^+)
TwoModeOperator build_heff(double xi, double chi, int cutoff_L, int cutoff_R);

// Same operator in sparse storage, for dimensions too large for dense work.
Eigen::SparseMatrix<std::complex<double>> build_heff_sparse(double xi, double chi, int cutoff_L,
                                                            int cutoff_R);

// Diagonal of the product of two geometric Fock mixtures. Throws
// NumericError when either marginal tail beyond its cutoff exceeds tail_tol.
Eigen::VectorXd thermal_two_mode_weights(double n_L0, double n_R0, int cutoff_L, int cutoff_R,
                                         double tail_tol = 1e-8);

struct FockExpectations {
  double n_L = 0.0;
  double n_R = 0.0;
  double top_population_L = 0.0;  // weight in the two highest levels of each mode
  double top_population_R = 0.0;
  bool truncation_ok = true;      // both below truncation_budget
};

inline constexpr double truncation_budget = 1e-6;
inline constexpr int dense_dimension_limit = 4096;

// Spectral evolution for a density matrix diagonal in the Fock basis.
// After one eigendecomposition each time point costs O(dim^2).
class FockEvolver {
 public:
  FockEvolver(const TwoModeOperator& H, const Eigen::VectorXd& rho0_diagonal);

  FockExpectations at(double T) const;
  // exp(-i H T)
  Eigen::MatrixXcd propagator(double T) const;

 private:
  int cutoff_L_, cutoff_R_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXcd V_;
  // rho0 and each diagonal observable in the eigenbasis, combined entrywise.
  Eigen::MatrixXcd w_nL_, w_nR_, w_topL_, w_topR_;
};

// Single time point; throws NumericError when the truncation budget is exceeded.
FockExpectations evolve_expectations(const TwoModeOperator& H, const Eigen::VectorXd& rho0_diagonal,
                                     double T);

// Whole grid, flagging rather than throwing. Uses FockEvolver up to
// dense_dimension_limit and adaptive stepping of each Fock component above it.
std::vector<FockExpectations> evolve_series(double xi, double chi, int cutoff_L, int cutoff_R,
                                            const Eigen::VectorXd& rho0_diagonal,
                                            const std::vector<double>& times);

// Stepping route only (exposed for cross-checks).
std::vector<FockExpectations> evolve_series_stepping(
    const Eigen::SparseMatrix<std::complex<double>>& H, int cutoff_L, int cutoff_R,
    const Eigen::VectorXd& rho0_diagonal, const std::vector<double>& times, double rtol = 1e-10,
    double atol = 1e-12);

}  // namespace leakycav
