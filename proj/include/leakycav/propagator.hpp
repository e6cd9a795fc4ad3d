#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "leakycav/response.hpp"

namespace leakycav {

// Basis (a_L, a_L^+, a_R1, a_R1^+, ..., a_Rn, a_Rn^+); dx/dT = A x.
using CoefficientMatrix = Eigen::MatrixXd;
using PropagatorMatrix = Eigen::MatrixXd;

CoefficientMatrix build_A(double xi, const std::vector<double>& chis);

// Block commutator metric: [x_j, x_k] = J_jk.
Eigen::MatrixXd commutator_metric(int n_modes);

std::array<std::complex<double>, 4> analytic_eigenvalues(double xi, double chi);

// U = exp(A T). Throws NumericError when ||A T||_1 > 700.
PropagatorMatrix matrix_exponential(const CoefficientMatrix& A, double T);
// Same through the eigendecomposition (cross-check route).
PropagatorMatrix matrix_exponential_eig(const CoefficientMatrix& A, double T);

// <a_p^+ a_p>(T) for thermal diagonal initial states, one entry per mode.
std::vector<double> assemble_occupations(const Eigen::MatrixXd& U, const std::vector<double>& occ);
// Complex U (detuned evolution); result has real occupations up to rounding.
std::vector<std::complex<double>> assemble_occupations(const Eigen::MatrixXcd& U,
                                                       const std::vector<double>& occ);

struct FullOptions {
  bool force_log_domain = false;  // factor out the leading exponential even for small 2 xi T
  bool force_real_form = false;   // use the form that is regular at xi = chi
};

struct FullOccupations {
  AffineOccupation left;
  AffineOccupation right;
  double n_L = 0.0;
  double n_R = 0.0;
  double imag_L = 0.0;  // |Im| left over from complex evaluation
  double imag_R = 0.0;
  bool log_domain = false;
  bool real_form = false;
};

FullOccupations full_occupations(double xi, double chi, double T, double n_L0, double n_R0,
                                 const FullOptions& opt = {});
double n_left_full(double xi, double chi, double T, double n_L0, double n_R0);
double n_right_full(double xi, double chi, double T, double n_L0, double n_R0);

enum class Regime { ExponentialGrowth, Oscillatory, OscillatoryDegenerate, PureHopping };
const char* to_string(Regime r);
Regime regime_classify(double xi, double chi);

// Exact n-mode evolution. occupations = {N_L0, N_R1_0, ..., N_Rn_0}.
std::vector<double> multi_mode_response(double xi, const std::vector<double>& chis, double T,
                                        const std::vector<double>& occupations);

// Expansion n(s) = zeroth + s^2 second + O(s^4) of the exact occupations for
// couplings chi_i = s * weights_i, from the block-triangular exponential.
struct Chi2Expansion {
  std::vector<double> zeroth;
  std::vector<double> second;
};
Chi2Expansion chi2_expansion(double xi, const std::vector<double>& weights, double T,
                             const std::vector<double>& occupations);

}  // namespace leakycav
