#pragma once

#include <vector>

namespace leakycav {

// Ideal outer walls at a0 and c, delta-potential mirror of strength gamma at b.
// The wall at a0 is the one that vibrates.
struct CavityConfig {
  double a0 = 0.0;
  double b = 1.0;
  double c = 2.5;
  double dy = 1.0;
  double dz = 1.0;
  double gamma = 50.0;  // may be +inf (perfect internal mirror)

  double left_length() const { return b - a0; }
  double right_length() const { return c - b; }
};

// Throws ValidationError unless a0 < b < c, dy, dz, gamma > 0 and neither
// length ratio is within ratio_tol of an integer.
void validate(const CavityConfig& cavity, double ratio_tol = 1e-6);
CavityConfig make_cavity(double a0, double b, double c, double dy, double dz,
                         double gamma, double ratio_tol = 1e-6);

enum class ModeClass { LeftDominated, RightDominated };

const char* to_string(ModeClass cls);

struct Mode {
  int nx = 1;
  int ny = 1;
  int nz = 1;
  ModeClass cls = ModeClass::LeftDominated;
  double omega_x = 0.0;
  double omega_total = 0.0;
  double norm_left = 0.0;   // L in f(x) = L sin(W (x - a)), a < x < b
  double norm_right = 0.0;  // R in f(x) = R sin(W (c - x)), b < x < c
};

struct EtaParam {
  double eta = 0.0;                 // fundamental: Omega_{1l}^x / gamma
  std::vector<double> per_mode_eta; // Omega_mu^x / gamma, same order as input modes
};

// cot(W (b-a)) + cot(W (c-b)) + 2 gamma / W, divided by gamma.
double eigenvalue_residual(const CavityConfig& cavity, double omega_x);

// First k_max roots of the requested class, strictly increasing.
std::vector<double> solve_transverse_frequencies(const CavityConfig& cavity, int k_max,
                                                 ModeClass cls);

// Second-order expansion around the pole n pi / l of the chosen region, with
// eta_mu = Omega_mu^x / gamma resolved self-consistently.
double perturbative_frequency(const CavityConfig& cavity, int n, ModeClass cls, int order);

// Same expansion with eta_mu supplied directly. own_length is (b-a) for a
// left-dominated mode and (c-b) for a right-dominated one.
double perturbative_frequency(double own_length, double other_length, int n, double eta_mu,
                              int order);

Mode make_mode(const CavityConfig& cavity, int nx, int ny, int nz, ModeClass cls);
Mode fundamental_mode(const CavityConfig& cavity);

double mode_frequency(const CavityConfig& cavity, const Mode& mode);

// Piecewise x-eigenfunction, zero outside [a0, c].
double eigenfunction_x(const CavityConfig& cavity, const Mode& mode, double x);

double fundamental_eta(const CavityConfig& cavity);
EtaParam eta_param(const CavityConfig& cavity, const std::vector<Mode>& modes);

// Leading-order closed form m_{L,R}. left must be the fundamental left mode.
double geometry_factor(const CavityConfig& cavity, const Mode& left, const Mode& right);

double quality_factor(const CavityConfig& cavity);
double quality_factor_from_eta(double eta);

}  // namespace leakycav
